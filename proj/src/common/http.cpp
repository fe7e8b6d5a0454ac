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

#include "nl2fix/common/http.hpp"

#include <httplib.h>

#include <chrono>

namespace nl2fix {

HttpResult post_json(const std::string& base_url, const std::string& path,
                     const std::string& body,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     double timeout_s) {
  HttpResult result;
  // Split "scheme://host:port/prefix" into the client origin and a prefix.
  const auto scheme_end = base_url.find("://");
  const auto path_start =
      base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers hs;
  for (const auto& [k, v] : headers) hs.emplace(k, v);

  auto res = client.Post(prefix + path, hs, body, "application/json");
  if (!res) {
    result.error = httplib::to_string(res.error());
    return result;
  }
  result.status = res->status;
  result.body = res->body;
  return result;
}

}  // namespace nl2fix
