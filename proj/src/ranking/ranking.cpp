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

#include "nl2fix/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nl2fix/metrics.hpp"

namespace nl2fix::ranking {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) throw DimensionMismatch(u.size(), v.size());
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVector();
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::string_view to_string(Variant v) {
  return v == Variant::All ? "all" : "compile-pruned";
}

Variant parse_variant(std::string_view name) {
  if (name == "all") return Variant::All;
  if (name == "compile-pruned") return Variant::CompilePruned;
  throw ConfigError("unknown ranking variant: " + std::string(name));
}

RankedSuggestions prune_and_rank(std::string bug_id, std::span<const ScoredPatch> candidates,
                                 double threshold, Variant variant) {
  RankedSuggestions out;
  out.bug_id = std::move(bug_id);
  out.threshold_used = threshold;
  out.variant = variant;
  std::set<std::string> seen;
  std::vector<ScoredPatch> kept;
  for (const auto& c : candidates) {
    if (!seen.insert(c.content_hash).second) continue;
    if (c.similarity >= threshold) {
      kept.push_back(c);
    } else {
      out.pruned[c.content_hash] = c.similarity;
    }
  }
  std::sort(kept.begin(), kept.end(), [](const ScoredPatch& a, const ScoredPatch& b) {
    if (a.similarity != b.similarity) return a.similarity < b.similarity;
    return a.content_hash < b.content_hash;
  });
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.entries.push_back({kept[i].content_hash, kept[i].similarity, static_cast<int>(i + 1)});
  }
  return out;
}

double compute_threshold(std::span<const double> similarities) {
  if (similarities.empty()) throw EmptyInput("similarities");
  return metrics::median(similarities);
}

int r_pass_at_k(const RankedSuggestions& ranked, const OutcomeMap& outcomes, int k) {
  if (k < 1) throw DomainError("k must be positive");
  const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.entries.size());
  int hit = 0;
  for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
    const auto it = outcomes.find(ranked.entries[i].content_hash);
    if (it == outcomes.end()) throw MissingOutcome(ranked.entries[i].content_hash);
    if (i < limit && it->second == validation::Status::Plausible) hit = 1;
  }
  return hit;
}

double r_pass_at_k(std::span<const RankedSuggestions> ranked,
                   const std::map<std::string, OutcomeMap>& outcomes, int k) {
  if (ranked.empty()) throw EmptyInput("ranked suggestions");
  static const OutcomeMap kNone;
  int hits = 0;
  for (const auto& r : ranked) {
    const auto it = outcomes.find(r.bug_id);
    hits += r_pass_at_k(r, it == outcomes.end() ? kNone : it->second, k);
  }
  return 100.0 * hits / static_cast<double>(ranked.size());
}

VariantPair rank_variants(const std::string& bug_id, std::span<const ScoredPatch> candidates,
                          const std::map<std::string, bool>& compile_status, double threshold) {
  std::vector<ScoredPatch> compiled;
  for (const auto& c : candidates) {
    const auto it = compile_status.find(c.content_hash);
    if (it == compile_status.end()) throw MissingOutcome(c.content_hash);
    if (it->second) compiled.push_back(c);
  }
  return {prune_and_rank(bug_id, candidates, threshold, Variant::All),
          prune_and_rank(bug_id, compiled, threshold, Variant::CompilePruned)};
}

}  // namespace nl2fix::ranking
