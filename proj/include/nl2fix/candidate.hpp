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

#pragma once

#include <string>
#include <vector>

namespace nl2fix {

// One chat message as sent to or received from a provider.
struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  bool operator==(const Message&) const = default;
};

struct CandidatePatch {
  std::string bug_id;
  int sample_index = 0;
  std::string raw_response;
  std::string patch_text;
  std::string canonical;
  std::string content_hash;  // sha256 hex of `canonical`
  bool empty = false;        // extraction produced nothing
  int attempts = 0;          // provider calls spent, 0 when served from cache
  std::vector<Message> transcript;  // reasoning dialogue only

  bool operator==(const CandidatePatch&) const = default;
};

// Fills canonical, content_hash and the empty flag from patch_text.
CandidatePatch make_candidate(std::string bug_id, int sample_index,
                              std::string raw_response, std::string patch_text);

}  // namespace nl2fix
