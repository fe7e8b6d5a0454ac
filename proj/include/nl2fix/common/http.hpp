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
#include <utility>
#include <vector>

namespace nl2fix {

struct HttpResult {
  int status = 0;     // 0 when no response was received
  std::string body;
  std::string error;  // transport error, empty on any HTTP response
};

// POSTs a JSON body to base_url + path. base_url may carry a path prefix,
// e.g. "https://api.example.com/v1". Never throws on network failure.
HttpResult post_json(const std::string& base_url, const std::string& path,
                     const std::string& body,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     double timeout_s);

}  // namespace nl2fix
