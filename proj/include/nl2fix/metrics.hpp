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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nl2fix::metrics {

// Per-bug tallies produced by validation.
struct BugResult {
  std::string bug_id;
  std::string project;
  std::int64_t n = 0;              // total candidates
  std::int64_t c = 0;              // plausible candidates
  std::int64_t compile_count = 0;  // candidates that compile
  std::int64_t unique_count = 0;   // distinct canonical forms
  std::int64_t em_count = 0;       // exact matches with the developer fix
};

/// Unbiased pass@k estimate 1 - C(n-c, k) / C(n, k).
///
/// Evaluated as 1 - prod_{i=n-c+1..n} (1 - k/i), which never forms a
/// binomial coefficient and stays accurate for large n. k == 1 returns
/// c/n exactly. Throws DomainError unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k);

// Mean of per-bug pass@k (each bug one vote). Throws EmptyInput on an
// empty sequence and DomainError when some bug has n < k.
double aggregate_pass_at_k(std::span<const BugResult> results, std::int64_t k);

// Removes every whitespace byte (space, tab, CR, LF, VT, FF).
std::string canonical_form(std::string_view code);

// Exact match ignoring whitespace.
bool exact_match(std::string_view a, std::string_view b);

// What summary_stats needs to know about one bug's candidate set.
struct BugCandidateCounts {
  std::int64_t total = 0;
  std::int64_t unique = 0;
  std::int64_t compiled = 0;
  std::int64_t plausible = 0;
};

struct SummaryStats {
  double duplicate_pct = 0.0;
  double compile_pct = 0.0;
  double plausible_pct = 0.0;
};

// Per-bug percentages, then unweighted mean across bugs.
SummaryStats summary_stats(std::span<const BugCandidateCounts> bugs);

struct OverlapReport {
  // Region label -> count. Labels join member model ids with '&' in the
  // input order, e.g. "A", "A&B", "A&B&C". Every nonempty region is listed.
  std::map<std::string, std::size_t> regions;
  std::map<std::string, std::size_t> per_model;
  std::size_t union_count = 0;
};

// Venn-style breakdown of which bugs each model fixed (1 to 3 models).
OverlapReport overlap(
    const std::vector<std::pair<std::string, std::set<std::string>>>&
        fixed_sets);

struct DistributionSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  // Absent when every sample is equal.
  std::optional<double> kurtosis;
};

// Quantile with linear interpolation at position (n-1)*p of the sorted data.
double quantile(std::span<const double> samples, double p);

double median(std::span<const double> samples);

// Fisher excess kurtosis m4/m2^2 - 3 with biased central moments.
// Throws InsufficientData with fewer than two distinct values.
double excess_kurtosis(std::span<const double> samples);

// Throws InsufficientData for fewer than 4 samples.
DistributionSummary distribution_summary(std::span<const double> samples);

struct WilcoxonResult {
  double p_value = 1.0;
  double w_plus = 0.0;       // sum of ranks of positive differences
  std::size_t pairs = 0;     // nonzero differences used
  bool exact = true;
};

// Largest number of nonzero pairs evaluated by exact enumeration.
inline constexpr std::size_t kWilcoxonExactLimit = 20;

/// One-sided Wilcoxon signed-rank test of H1: median(x - y) > 0.
///
/// Zero differences are dropped and tied |d| receive mid-ranks. Up to
/// kWilcoxonExactLimit pairs the p-value is P(W+ >= observed) under the
/// exact sign-flip null; beyond that a normal approximation with tie and
/// continuity corrections is used. Throws DomainError on length mismatch,
/// AllZeroDifferences when nothing is left, TooFewPairs below 5 pairs.
WilcoxonResult wilcoxon_signed_rank_one_sided(std::span<const double> x,
                                              std::span<const double> y);

// Both branches exposed for cross-checking. `diffs` must be nonzero.
double wilcoxon_exact_p(std::span<const double> diffs);
double wilcoxon_normal_p(std::span<const double> diffs);

}  // namespace nl2fix::metrics
