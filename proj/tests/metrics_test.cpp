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

#include <gtest/gtest.h>

#include <random>

#include "nl2fix/common/errors.hpp"
#include "oracles.hpp"

namespace nl2fix::metrics {
namespace {

TEST(PassAtK, Examples) {
  EXPECT_EQ(pass_at_k(100, 0, 10), 0.0);
  EXPECT_EQ(pass_at_k(100, 100, 1), 1.0);
  // 7 of the C(5,2) = 10 pairs contain one of the 2 correct samples.
  EXPECT_NEAR(pass_at_k(5, 2, 2), 0.7, 1e-15);
}

TEST(PassAtK, MatchesSubsetEnumeration) {
  for (int n = 1; n <= 12; ++n) {
    for (int c = 0; c <= n; ++c) {
      const auto expected = oracle::pass_at_k_enumerated(n, c);
      for (int k = 1; k <= n; ++k) {
        EXPECT_NEAR(pass_at_k(n, c, k), expected[k - 1], 1e-12)
            << "n=" << n << " c=" << c << " k=" << k;
      }
    }
  }
}

TEST(PassAtK, PassAtOneIsExactRatio) {
  for (int n = 1; n <= 200; n += 7) {
    for (int c = 0; c <= n; ++c) {
      EXPECT_EQ(pass_at_k(n, c, 1), static_cast<double>(c) / n);
    }
  }
}

TEST(PassAtK, LargeNStaysFinite) {
  const double v = pass_at_k(10000, 3, 100);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_NEAR(pass_at_k(10000, 5000, 9999), 1.0, 1e-12);
}

TEST(PassAtK, DomainErrors) {
  EXPECT_THROW(pass_at_k(5, 6, 1), DomainError);
  EXPECT_THROW(pass_at_k(5, -1, 1), DomainError);
  EXPECT_THROW(pass_at_k(5, 2, 0), DomainError);
  EXPECT_THROW(pass_at_k(5, 2, 6), DomainError);
  EXPECT_THROW(pass_at_k(0, 0, 1), DomainError);
}

TEST(PassAtK, Monotonicity) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 300)(rng);
    const int c = std::uniform_int_distribution<int>(0, n)(rng);
    const int k = std::uniform_int_distribution<int>(1, n - 1)(rng);
    EXPECT_LE(pass_at_k(n, c, k), pass_at_k(n, c, k + 1) + 1e-15);
    if (c < n) EXPECT_LE(pass_at_k(n, c, k), pass_at_k(n, c + 1, k) + 1e-15);
    if (c >= 1 && k <= n - 1 && n - 1 - c >= k) {
      // Removing an incorrect sample strictly helps, unless both round to 1.
      const double before = pass_at_k(n, c, k);
      const double after = pass_at_k(n - 1, c, k);
      if (before < 0.999) {
        EXPECT_LT(before, after);
      } else {
        EXPECT_LE(before, after);
      }
    }
  }
}

TEST(AggregatePassAtK, Examples) {
  std::vector<BugResult> two{{"a", "p", 4, 0}, {"b", "p", 4, 4}};
  EXPECT_DOUBLE_EQ(aggregate_pass_at_k(two, 2), 0.5);
  std::vector<BugResult> all{{"a", "p", 3, 3}, {"b", "p", 7, 7}};
  EXPECT_EQ(aggregate_pass_at_k(all, 3), 1.0);
  // Per-bug values from the subset-enumeration oracle: 0.7, 0, 1.
  std::vector<BugResult> three{{"a", "p", 5, 2}, {"b", "p", 5, 0}, {"c", "p", 5, 5}};
  EXPECT_NEAR(aggregate_pass_at_k(three, 2), 1.7 / 3.0, 1e-12);
  EXPECT_NEAR(aggregate_pass_at_k(three, 2), 0.5667, 1e-4);
}

TEST(AggregatePassAtK, Errors) {
  EXPECT_THROW(aggregate_pass_at_k({}, 1), EmptyInput);
  std::vector<BugResult> small{{"a", "p", 2, 1}};
  EXPECT_THROW(aggregate_pass_at_k(small, 3), DomainError);
}

TEST(CanonicalForm, Examples) {
  EXPECT_EQ(canonical_form("int x = 1;"), canonical_form("int  x=1 ;\n"));
  EXPECT_EQ(canonical_form(""), "");
  EXPECT_EQ(canonical_form("a b"), canonical_form("ab"));
  EXPECT_EQ(canonical_form(" \t\r\n\f\va"), "a");
  EXPECT_TRUE(exact_match("f ( x )", "f(x)"));
  EXPECT_FALSE(exact_match("f(x)", "f(y)"));
}

TEST(CanonicalForm, IdempotentAndEquivalence) {
  std::mt19937 rng(3);
  const std::string alphabet = "ab \t\n;{}";
  auto random_string = [&] {
    std::string s;
    const int len = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < len; ++i) {
      s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    }
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    const auto a = random_string();
    const auto b = random_string();
    const auto c = random_string();
    EXPECT_EQ(canonical_form(canonical_form(a)), canonical_form(a));
    EXPECT_TRUE(exact_match(a, a));
    EXPECT_EQ(exact_match(a, b), exact_match(b, a));
    if (exact_match(a, b) && exact_match(b, c)) EXPECT_TRUE(exact_match(a, c));
  }
}

TEST(SummaryStats, Examples) {
  std::vector<BugCandidateCounts> one{{10, 6, 5, 2}};
  const auto s = summary_stats(one);
  EXPECT_DOUBLE_EQ(s.duplicate_pct, 40.0);
  EXPECT_DOUBLE_EQ(s.compile_pct, 50.0);
  EXPECT_DOUBLE_EQ(s.plausible_pct, 20.0);

  std::vector<BugCandidateCounts> two{{4, 4, 4, 0}, {4, 4, 4, 4}};
  EXPECT_DOUBLE_EQ(summary_stats(two).plausible_pct, 50.0);

  std::vector<BugCandidateCounts> none{{5, 5, 0, 0}};
  EXPECT_EQ(summary_stats(none).compile_pct, 0.0);
  EXPECT_EQ(summary_stats(none).plausible_pct, 0.0);

  EXPECT_THROW(summary_stats({}), EmptyInput);
}

TEST(Overlap, ThreeModels) {
  const auto r = overlap({{"A", {"1", "2"}}, {"B", {"2", "3"}}, {"C", {"2"}}});
  EXPECT_EQ(r.regions.size(), 7u);
  EXPECT_EQ(r.regions.at("A&B&C"), 1u);
  EXPECT_EQ(r.regions.at("A"), 1u);
  EXPECT_EQ(r.regions.at("B"), 1u);
  EXPECT_EQ(r.regions.at("C"), 0u);
  EXPECT_EQ(r.regions.at("A&B"), 0u);
  EXPECT_EQ(r.union_count, 3u);
  EXPECT_EQ(r.per_model.at("A"), 2u);
}

TEST(Overlap, IdenticalAndDisjoint) {
  const auto same = overlap({{"A", {"1", "2"}}, {"B", {"1", "2"}}});
  EXPECT_EQ(same.regions.at("A&B"), 2u);
  EXPECT_EQ(same.regions.at("A"), 0u);
  EXPECT_EQ(same.regions.at("B"), 0u);
  const auto disjoint = overlap({{"A", {"1"}}, {"B", {"2"}}, {"C", {"3"}}});
  EXPECT_EQ(disjoint.regions.at("A&B&C"), 0u);
  EXPECT_EQ(disjoint.union_count, 3u);
  EXPECT_THROW(overlap({}), DomainError);
}

TEST(DistributionSummary, Quartiles) {
  const std::vector<double> v{4, 1, 3, 2};
  const auto s = distribution_summary(v);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.q1, 1.75);
  EXPECT_DOUBLE_EQ(s.q3, 3.25);
  EXPECT_DOUBLE_EQ(s.iqr, 1.5);
}

TEST(DistributionSummary, ConstantHasNoKurtosis) {
  const std::vector<double> v(6, 0.5);
  const auto s = distribution_summary(v);
  EXPECT_EQ(s.iqr, 0.0);
  EXPECT_FALSE(s.kurtosis.has_value());
  EXPECT_THROW(excess_kurtosis(v), InsufficientData);
}

TEST(DistributionSummary, TwoPointMassKurtosis) {
  std::vector<double> v;
  for (int i = 0; i < 50; ++i) {
    v.push_back(-1.0);
    v.push_back(1.0);
  }
  EXPECT_NEAR(excess_kurtosis(v), -2.0, 1e-12);
}

TEST(DistributionSummary, NormalishKurtosisNearZero) {
  std::mt19937 rng(11);
  std::normal_distribution<double> dist;
  std::vector<double> v(200000);
  for (auto& x : v) x = dist(rng);
  EXPECT_NEAR(excess_kurtosis(v), 0.0, 0.05);
}

TEST(DistributionSummary, TooFewSamples) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_THROW(distribution_summary(v), InsufficientData);
}

TEST(Wilcoxon, AllPositiveSix) {
  const std::vector<double> x{2, 3, 4, 5, 6, 7};
  const std::vector<double> y{1, 1, 1, 1, 1, 1};
  const auto r = wilcoxon_signed_rank_one_sided(x, y);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.w_plus, 21.0);
  EXPECT_EQ(r.p_value, 0.015625);
}

TEST(Wilcoxon, NullMeanPatternNearHalf) {
  // Positive ranks {1, 6, 7} sum to 14 = m(m+1)/4 for m = 7.
  const std::vector<double> d{1, -2, -3, -4, -5, 6, 7};
  const std::vector<double> zero(d.size(), 0.0);
  const auto r = wilcoxon_signed_rank_one_sided(d, zero);
  EXPECT_EQ(r.w_plus, 14.0);
  EXPECT_EQ(r.p_value, oracle::wilcoxon_enumerated(d));
  EXPECT_NEAR(r.p_value, 0.5, 0.05);
}

TEST(Wilcoxon, Errors) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_THROW(
      {
        try {
          wilcoxon_signed_rank_one_sided(x, x);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), "AllZeroDifferences");
          throw;
        }
      },
      Error);
  const std::vector<double> y{0, 0, 0, 4, 5};
  try {
    wilcoxon_signed_rank_one_sided(x, y);
    FAIL() << "expected TooFewPairs";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TooFewPairs");
  }
  const std::vector<double> shorter{1, 2};
  EXPECT_THROW(wilcoxon_signed_rank_one_sided(x, shorter), DomainError);
}

TEST(Wilcoxon, ExactMatchesEnumerationWithTies) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = std::uniform_int_distribution<int>(5, 12)(rng);
    std::vector<double> d;
    while (static_cast<int>(d.size()) < m) {
      // Small integer magnitudes force plenty of ties.
      const int v = std::uniform_int_distribution<int>(-4, 4)(rng);
      if (v != 0) d.push_back(v);
    }
    const std::vector<double> zero(d.size(), 0.0);
    EXPECT_EQ(wilcoxon_signed_rank_one_sided(d, zero).p_value, oracle::wilcoxon_enumerated(d));
  }
}

TEST(Wilcoxon, NormalBranchCloseToExactAtTwenty) {
  std::mt19937 rng(13);
  std::normal_distribution<double> dist(0.2, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d(20);
    for (auto& v : d) v = dist(rng);
    EXPECT_NEAR(wilcoxon_exact_p(d), wilcoxon_normal_p(d), 0.02);
  }
}

TEST(Wilcoxon, LargeSampleUsesNormalBranch) {
  std::vector<double> x(40);
  std::vector<double> y(40, 0.0);
  for (int i = 0; i < 40; ++i) x[i] = (i % 4 == 0) ? -(i + 1.0) : (i + 1.0);
  const auto r = wilcoxon_signed_rank_one_sided(x, y);
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.p_value, 0.0);
  EXPECT_LT(r.p_value, 0.05);
}

}  // namespace
}  // namespace nl2fix::metrics
