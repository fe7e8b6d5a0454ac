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

#include "nl2fix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nl2fix/common/errors.hpp"

namespace nl2fix::metrics {

double pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n) {
    throw DomainError("pass_at_k requires 0 <= c <= n and 1 <= k <= n (n=" +
                      std::to_string(n) + ", c=" + std::to_string(c) +
                      ", k=" + std::to_string(k) + ")");
  }
  if (k == 1) return static_cast<double>(c) / static_cast<double>(n);
  if (n - c < k) return 1.0;
  // C(n-c,k)/C(n,k) = prod_{i=n-c+1}^{n} (1 - k/i)
  double miss = 1.0;
  const double kk = static_cast<double>(k);
  for (std::int64_t i = n - c + 1; i <= n; ++i) {
    miss *= 1.0 - kk / static_cast<double>(i);
  }
  return 1.0 - miss;
}

double aggregate_pass_at_k(std::span<const BugResult> results, std::int64_t k) {
  if (results.empty()) throw EmptyInput("aggregate_pass_at_k");
  double sum = 0.0;
  for (const auto& r : results) sum += pass_at_k(r.n, r.c, k);
  return sum / static_cast<double>(results.size());
}

std::string canonical_form(std::string_view code) {
  std::string out;
  out.reserve(code.size());
  for (char ch : code) {
    switch (ch) {
      case ' ':
      case '\t':
      case '\r':
      case '\n':
      case '\v':
      case '\f':
        break;
      default:
        out.push_back(ch);
    }
  }
  return out;
}

bool exact_match(std::string_view a, std::string_view b) {
  return canonical_form(a) == canonical_form(b);
}

SummaryStats summary_stats(std::span<const BugCandidateCounts> bugs) {
  if (bugs.empty()) throw EmptyInput("summary_stats");
  SummaryStats acc;
  for (const auto& b : bugs) {
    if (b.total < 1) {
      throw DomainError("summary_stats: every bug needs at least one candidate");
    }
    const double total = static_cast<double>(b.total);
    acc.duplicate_pct += 100.0 * static_cast<double>(b.total - b.unique) / total;
    acc.compile_pct += 100.0 * static_cast<double>(b.compiled) / total;
    acc.plausible_pct += 100.0 * static_cast<double>(b.plausible) / total;
  }
  const double count = static_cast<double>(bugs.size());
  acc.duplicate_pct /= count;
  acc.compile_pct /= count;
  acc.plausible_pct /= count;
  return acc;
}

OverlapReport overlap(
    const std::vector<std::pair<std::string, std::set<std::string>>>&
        fixed_sets) {
  const std::size_t models = fixed_sets.size();
  if (models < 1 || models > 3) {
    throw DomainError("overlap supports 1 to 3 models, got " +
                      std::to_string(models));
  }
  std::map<std::string, unsigned> membership;
  for (std::size_t m = 0; m < models; ++m) {
    for (const auto& bug : fixed_sets[m].second) membership[bug] |= 1u << m;
  }
  OverlapReport report;
  std::vector<std::size_t> by_mask(1u << models, 0);
  for (const auto& [bug, mask] : membership) ++by_mask[mask];
  for (unsigned mask = 1; mask < (1u << models); ++mask) {
    std::string label;
    for (std::size_t m = 0; m < models; ++m) {
      if (!(mask & (1u << m))) continue;
      if (!label.empty()) label += '&';
      label += fixed_sets[m].first;
    }
    report.regions[label] = by_mask[mask];
  }
  for (const auto& [model, bugs] : fixed_sets) report.per_model[model] = bugs.size();
  report.union_count = membership.size();
  return report;
}

double quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw EmptyInput("quantile");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile p outside [0,1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> samples) { return quantile(samples, 0.5); }

double excess_kurtosis(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw InsufficientData("kurtosis needs at least two distinct values");
  }
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : samples) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (m2 == 0.0) {
    throw InsufficientData("kurtosis needs at least two distinct values");
  }
  return m4 / (m2 * m2) - 3.0;
}

DistributionSummary distribution_summary(std::span<const double> samples) {
  if (samples.size() < 4) {
    throw InsufficientData("quartiles need at least 4 samples, got " +
                           std::to_string(samples.size()));
  }
  DistributionSummary s;
  s.median = quantile(samples, 0.5);
  s.q1 = quantile(samples, 0.25);
  s.q3 = quantile(samples, 0.75);
  s.iqr = s.q3 - s.q1;
  try {
    s.kurtosis = excess_kurtosis(samples);
  } catch (const InsufficientData&) {
    s.kurtosis.reset();
  }
  return s;
}

namespace {

// Mid-ranks of |d|, 1-based.
std::vector<double> abs_midranks(std::span<const double> diffs) {
  const std::size_t m = diffs.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(diffs[a]) < std::fabs(diffs[b]);
  });
  std::vector<double> ranks(m);
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m &&
           std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]])) {
      ++j;
    }
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double positive_rank_sum(std::span<const double> diffs,
                         std::span<const double> ranks) {
  double w = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0) w += ranks[i];
  }
  return w;
}

}  // namespace

double wilcoxon_exact_p(std::span<const double> diffs) {
  const std::size_t m = diffs.size();
  if (m == 0 || m > 62) throw DomainError("exact Wilcoxon needs 1..62 pairs");
  const auto ranks = abs_midranks(diffs);
  // Mid-ranks are multiples of 1/2, so doubled ranks are exact integers and
  // the null distribution of W+ is a subset-sum count over them.
  std::vector<std::size_t> doubled(m);
  std::size_t total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    doubled[i] = static_cast<std::size_t>(std::lround(ranks[i] * 2.0));
    total += doubled[i];
  }
  std::vector<double> ways(total + 1, 0.0);
  ways[0] = 1.0;
  for (std::size_t r : doubled) {
    for (std::size_t s = total; s >= r; --s) {
      ways[s] += ways[s - r];
      if (s == r) break;
    }
  }
  const auto observed =
      static_cast<std::size_t>(std::lround(positive_rank_sum(diffs, ranks) * 2.0));
  double tail = 0.0;
  for (std::size_t s = observed; s <= total; ++s) tail += ways[s];
  return tail / std::ldexp(1.0, static_cast<int>(m));
}

double wilcoxon_normal_p(std::span<const double> diffs) {
  const std::size_t count = diffs.size();
  if (count == 0) throw DomainError("normal Wilcoxon needs at least one pair");
  const auto ranks = abs_midranks(diffs);
  const double m = static_cast<double>(count);
  const double mean = m * (m + 1.0) / 4.0;
  double variance = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0;
  std::vector<double> sorted(ranks);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    variance -= (t * t * t - t) / 48.0;
    i = j;
  }
  const double w = positive_rank_sum(diffs, ranks);
  const double z = (w - mean - 0.5) / std::sqrt(variance);
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

WilcoxonResult wilcoxon_signed_rank_one_sided(std::span<const double> x,
                                              std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DomainError("Wilcoxon signed-rank needs paired samples of equal length");
  }
  std::vector<double> diffs;
  diffs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty() && !x.empty()) {
    throw Error("AllZeroDifferences", "all paired differences are zero");
  }
  if (diffs.size() < 5) {
    throw Error("TooFewPairs", "Wilcoxon signed-rank needs at least 5 nonzero "
                               "differences, got " + std::to_string(diffs.size()));
  }
  WilcoxonResult result;
  result.pairs = diffs.size();
  result.w_plus = positive_rank_sum(diffs, abs_midranks(diffs));
  result.exact = diffs.size() <= kWilcoxonExactLimit;
  result.p_value = result.exact ? wilcoxon_exact_p(diffs) : wilcoxon_normal_p(diffs);
  return result;
}

}  // namespace nl2fix::metrics
