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

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nl2fix/common/retry.hpp"
#include "nl2fix/validation.hpp"

namespace nl2fix::ranking {

using Vector = std::vector<double>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  // Throws DomainError on empty text, ProviderError on provider failure.
  virtual Vector embed(std::string_view text) = 0;
};

// Hashed bag of code tokens: FNV-1a of each token picks a bucket, bucket
// counts are L2-normalized.
class LocalEmbedder : public Embedder {
 public:
  explicit LocalEmbedder(std::size_t dimension = 512);
  std::string id() const override;
  Vector embed(std::string_view text) override;

 private:
  std::size_t dimension_;
};

struct HttpEmbedderConfig {
  std::string base_url;
  std::string model_id;
  std::string api_key_env;
  double timeout_s = 60.0;
};

// POST {base_url}/embeddings with {model, input}.
class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {}
  std::string id() const override;
  Vector embed(std::string_view text) override;

 private:
  HttpEmbedderConfig config_;
};

// Adds the on-disk cache cache/embeddings/{provider}/{text digest}.json and
// retries around another embedder.
class CachedEmbedder : public Embedder {
 public:
  CachedEmbedder(Embedder& inner, std::filesystem::path cache_root, RetryPolicy retry = {});
  std::string id() const override { return inner_.id(); }
  Vector embed(std::string_view text) override;
  std::size_t provider_calls() const { return calls_.load(); }

 private:
  Embedder& inner_;
  std::filesystem::path root_;
  RetryPolicy retry_;
  std::atomic<std::size_t> calls_{0};
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t a, std::size_t b)
      : Error("DimensionMismatch", "vector dimensions differ: " + std::to_string(a) + " vs " +
                                       std::to_string(b)) {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("ZeroVector", "cosine of an all-zero vector is undefined") {}
};

class MissingOutcome : public Error {
 public:
  explicit MissingOutcome(const std::string& hash)
      : Error("MissingOutcome", "no validation outcome for patch " + hash) {}
};

double cosine(std::span<const double> u, std::span<const double> v);

enum class Variant { All, CompilePruned };
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);  // "all", "compile-pruned"

struct ScoredPatch {
  std::string content_hash;
  double similarity = 0.0;
};

struct RankedEntry {
  std::string content_hash;
  double similarity = 0.0;
  int rank = 0;  // 1-based

  bool operator==(const RankedEntry&) const = default;
};

struct RankedSuggestions {
  std::string bug_id;
  std::vector<RankedEntry> entries;  // ascending similarity
  std::map<std::string, double> pruned;
  double threshold_used = 0.0;
  Variant variant = Variant::All;

  bool operator==(const RankedSuggestions&) const = default;
};

// Keeps similarity >= threshold, ascending, ties by hash; repeated hashes
// collapse to their first occurrence.
RankedSuggestions prune_and_rank(std::string bug_id, std::span<const ScoredPatch> candidates,
                                 double threshold, Variant variant = Variant::All);

// Interpolated median of every similarity in the run.
double compute_threshold(std::span<const double> similarities);

using OutcomeMap = std::map<std::string, validation::Status>;  // hash -> status

// 1 when any of the first min(k, |entries|) entries is Plausible.
int r_pass_at_k(const RankedSuggestions& ranked, const OutcomeMap& outcomes, int k);

// Percentage of bugs scoring 1; outcomes are looked up by bug_id.
double r_pass_at_k(std::span<const RankedSuggestions> ranked,
                   const std::map<std::string, OutcomeMap>& outcomes, int k);

struct VariantPair {
  RankedSuggestions all;
  RankedSuggestions compile_pruned;
};

// compile_status: hash -> compiled. Variant (b) drops non-compiling
// patches before pruning with the same threshold.
VariantPair rank_variants(const std::string& bug_id, std::span<const ScoredPatch> candidates,
                          const std::map<std::string, bool>& compile_status, double threshold);

}  // namespace nl2fix::ranking
