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

#include <nlohmann/json.hpp>

#include <cstdlib>

#include "nl2fix/common/fs.hpp"
#include "nl2fix/common/http.hpp"
#include "nl2fix/sampling.hpp"

namespace nl2fix::sampling {

using nlohmann::json;

std::string HttpProvider::id() const {
  return "http-" + sanitize_path_component(config_.model_id);
}

std::string HttpProvider::generate(const GenerationRequest& request) {
  json body{{"model", config_.model_id},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens},
            {"n", 1}};
  std::string path;
  switch (request.mode) {
    case GenMode::Chat: {
      path = "/chat/completions";
      json messages = json::array();
      for (const auto& m : request.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
      }
      body["messages"] = messages;
      break;
    }
    case GenMode::Completion:
      path = "/completions";
      body["prompt"] = request.prompt;
      break;
    case GenMode::Edit:
      path = "/edits";
      body["input"] = request.input;
      body["instruction"] = request.instruction;
      body.erase("max_tokens");
      break;
  }

  std::vector<std::pair<std::string, std::string>> headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) {
      throw ProviderError("environment variable " + config_.api_key_env + " is not set",
                          false);
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }

  const auto res = post_json(config_.base_url, path, body.dump(), headers, config_.timeout_s);
  if (res.status == 0) throw ProviderError("transport error: " + res.error);
  if (res.status == 429 || res.status >= 500) {
    throw ProviderError("HTTP " + std::to_string(res.status));
  }
  if (res.status != 200) {
    throw ProviderError("HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200),
                        false);
  }
  try {
    const auto j = json::parse(res.body);
    const auto& choice = j.at("choices").at(0);
    if (request.mode == GenMode::Chat) {
      return choice.at("message").at("content").get<std::string>();
    }
    return choice.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed provider response: ") + e.what(), false);
  }
}

}  // namespace nl2fix::sampling
