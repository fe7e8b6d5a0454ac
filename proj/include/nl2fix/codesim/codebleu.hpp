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

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nl2fix/common/errors.hpp"

namespace nl2fix::codesim {

using KeywordSet = std::set<std::string, std::less<>>;

// The 50 reserved words shipped in assets/keywords/java.txt.
const KeywordSet& default_keywords();

// One keyword per line; blank lines ignored.
KeywordSet load_keywords(const std::filesystem::path& path);
KeywordSet parse_keywords(std::string_view text);

class ReferenceUnparsable : public Error {
 public:
  explicit ReferenceUnparsable(const std::string& detail)
      : Error("ReferenceUnparsable", "reference does not parse: " + detail) {}
};

struct Weights {
  double bleu = 0.25;
  double keyword_bleu = 0.25;
  double syntax = 0.25;
  double dataflow = 0.25;
};

struct SimilarityReport {
  double bleu = 0.0;
  double keyword_bleu = 0.0;
  double syntax_match = 0.0;
  std::optional<double> dataflow_match;  // absent: reference has no edges
  double codebleu = 0.0;
  Weights weights;  // weights actually applied, after renormalization
};

// Weight of a keyword unigram relative to any other token.
inline constexpr double kKeywordWeight = 5.0;

/// Corpus-free sentence BLEU over token sequences.
///
/// Geometric mean of clipped n-gram precisions for n = 1..max_n. A zero
/// unigram match gives 0. For n >= 2 a zero match count is smoothed to
/// 1 / (candidate n-grams + 1). Brevity penalty exp(1 - |ref|/|cand|)
/// applies when the candidate is shorter. An empty candidate scores 0.
double bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, int max_n = 4);

// As bleu(), but the unigram precision weighs keyword tokens
// kKeywordWeight and all other tokens 1.
double weighted_keyword_bleu(std::span<const std::string> candidate,
                             std::span<const std::string> reference,
                             const KeywordSet& keywords);

// Fraction of the reference's subtree signatures (with multiplicity) that
// the candidate also contains. The candidate is parsed as far as it goes.
double syntax_match(std::string_view candidate, std::string_view reference,
                    std::string_view language = "java");

// Fraction of reference def-use edges matched in the candidate, with
// variables renamed positionally. nullopt when the reference has none.
std::optional<double> dataflow_match(std::string_view candidate,
                                     std::string_view reference,
                                     std::string_view language = "java");

SimilarityReport codebleu(std::string_view candidate, std::string_view reference,
                          std::string_view language = "java",
                          const Weights& weights = {},
                          const KeywordSet& keywords = default_keywords());

}  // namespace nl2fix::codesim
