// Copyright 2026 The nl2fix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nl2fix/candidate.hpp"

#include "nl2fix/common/hash.hpp"
#include "nl2fix/metrics.hpp"

namespace nl2fix {

CandidatePatch make_candidate(std::string bug_id, int sample_index,
                              std::string raw_response, std::string patch_text) {
  CandidatePatch c;
  c.bug_id = std::move(bug_id);
  c.sample_index = sample_index;
  c.raw_response = std::move(raw_response);
  c.patch_text = std::move(patch_text);
  c.canonical = metrics::canonical_form(c.patch_text);
  c.content_hash = sha256_hex(c.canonical);
  c.empty = c.canonical.empty();
  return c;
}

}  // namespace nl2fix
