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

#include <cmath>
#include <cstdlib>

#include "nl2fix/codesim/lexer.hpp"
#include "nl2fix/common/fs.hpp"
#include "nl2fix/common/hash.hpp"
#include "nl2fix/common/http.hpp"
#include "nl2fix/ranking.hpp"

namespace nl2fix::ranking {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

LocalEmbedder::LocalEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw DomainError("embedding dimension must be positive");
}

std::string LocalEmbedder::id() const { return "local-" + std::to_string(dimension_); }

Vector LocalEmbedder::embed(std::string_view text) {
  if (text.empty()) throw DomainError("cannot embed empty text");
  Vector v(dimension_, 0.0);
  for (const auto& token : codesim::token_texts(text)) v[fnv1a(token) % dimension_] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) throw DomainError("text has no tokens to embed");
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::string HttpEmbedder::id() const {
  return "http-" + sanitize_path_component(config_.model_id);
}

Vector HttpEmbedder::embed(std::string_view text) {
  if (text.empty()) throw DomainError("cannot embed empty text");
  std::vector<std::pair<std::string, std::string>> headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) {
      throw ProviderError("environment variable " + config_.api_key_env + " is not set", false);
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }
  const json body{{"model", config_.model_id}, {"input", std::string(text)}};
  const auto res = post_json(config_.base_url, "/embeddings", body.dump(), headers,
                             config_.timeout_s);
  if (res.status == 0) throw ProviderError("transport error: " + res.error);
  if (res.status == 429 || res.status >= 500) {
    throw ProviderError("HTTP " + std::to_string(res.status));
  }
  if (res.status != 200) {
    throw ProviderError("HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200),
                        false);
  }
  try {
    return json::parse(res.body).at("data").at(0).at("embedding").get<Vector>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed embedding response: ") + e.what(), false);
  }
}

CachedEmbedder::CachedEmbedder(Embedder& inner, std::filesystem::path cache_root,
                               RetryPolicy retry)
    : inner_(inner), root_(std::move(cache_root)), retry_(std::move(retry)) {}

Vector CachedEmbedder::embed(std::string_view text) {
  if (text.empty()) throw DomainError("cannot embed empty text");
  const auto path = root_ / "embeddings" / sanitize_path_component(inner_.id()) /
                    (sha256_hex(text) + ".json");
  if (const auto cached = try_read_file(path)) {
    try {
      return json::parse(*cached).get<Vector>();
    } catch (const json::exception&) {
      // Damaged entry: recompute below.
    }
  }
  ++calls_;
  Vector v = with_retry(retry_, [&] { return inner_.embed(text); });
  atomic_write_file(path, json(v).dump() + "\n");
  return v;
}

}  // namespace nl2fix::ranking
