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

#include "nl2fix/codesim/codebleu.hpp"

#include <cmath>
#include <map>

#include "nl2fix/codesim/lexer.hpp"
#include "nl2fix/codesim/syntax.hpp"
#include "nl2fix/common/fs.hpp"
#include "nl2fix/generated/assets.hpp"

namespace nl2fix::codesim {

KeywordSet parse_keywords(std::string_view text) {
  KeywordSet set;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto word = text.substr(pos, end - pos);
    while (!word.empty() && (word.back() == '\r' || word.back() == ' ')) word.remove_suffix(1);
    if (!word.empty()) set.emplace(word);
    pos = end + 1;
  }
  return set;
}

const KeywordSet& default_keywords() {
  static const KeywordSet kSet = parse_keywords(assets::kJavaKeywords);
  return kSet;
}

KeywordSet load_keywords(const std::filesystem::path& path) {
  return parse_keywords(read_file(path));
}

namespace {

using Counts = std::map<std::vector<std::string_view>, std::size_t>;

Counts ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  Counts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string_view> gram;
    gram.reserve(n);
    for (std::size_t k = 0; k < n; ++k) gram.emplace_back(tokens[i + k]);
    ++counts[std::move(gram)];
  }
  return counts;
}

// Clipped matches and candidate total for order n, each n-gram weighted by
// `weight(gram)`.
template <typename WeightFn>
std::pair<double, double> clipped_precision(std::span<const std::string> cand,
                                            std::span<const std::string> ref,
                                            std::size_t n, WeightFn weight) {
  const Counts c = ngram_counts(cand, n);
  const Counts r = ngram_counts(ref, n);
  double matched = 0.0;
  double total = 0.0;
  for (const auto& [gram, count] : c) {
    const double w = weight(gram);
    total += w * static_cast<double>(count);
    auto it = r.find(gram);
    if (it != r.end()) matched += w * static_cast<double>(std::min(count, it->second));
  }
  return {matched, total};
}

template <typename UnigramWeight>
double bleu_impl(std::span<const std::string> cand, std::span<const std::string> ref,
                 int max_n, UnigramWeight unigram_weight) {
  if (cand.empty() || max_n < 1) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    double matched = 0.0;
    double total = 0.0;
    if (n == 1) {
      std::tie(matched, total) = clipped_precision(cand, ref, 1, unigram_weight);
      if (matched == 0.0) return 0.0;
    } else {
      std::tie(matched, total) = clipped_precision(
          cand, ref, static_cast<std::size_t>(n), [](const auto&) { return 1.0; });
      if (matched == 0.0) {
        matched = 1.0;
        total += 1.0;
      }
    }
    log_sum += std::log(matched / total);
  }
  double score = std::exp(log_sum / max_n);
  if (cand.size() < ref.size()) {
    score *= std::exp(1.0 - static_cast<double>(ref.size()) /
                                static_cast<double>(cand.size()));
  }
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace

double bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, int max_n) {
  return bleu_impl(candidate, reference, max_n, [](const auto&) { return 1.0; });
}

double weighted_keyword_bleu(std::span<const std::string> candidate,
                             std::span<const std::string> reference,
                             const KeywordSet& keywords) {
  return bleu_impl(candidate, reference, 4, [&](const auto& gram) {
    return keywords.count(gram.front()) ? kKeywordWeight : 1.0;
  });
}

namespace {

double multiset_recall(std::vector<std::string> reference,
                       std::vector<std::string> candidate) {
  std::map<std::string, std::size_t> have;
  for (auto& s : candidate) ++have[std::move(s)];
  std::size_t matched = 0;
  for (const auto& s : reference) {
    auto it = have.find(s);
    if (it != have.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(reference.size());
}

SyntaxNode parse_reference(std::string_view reference) {
  try {
    auto parsed = parse_java(reference, ParseMode::Strict);
    if (parsed.root.children.empty()) throw ReferenceUnparsable("no code");
    return std::move(parsed.root);
  } catch (const SyntaxError& e) {
    throw ReferenceUnparsable(e.what());
  }
}

double syntax_match_trees(const SyntaxNode& candidate, const SyntaxNode& reference) {
  auto ref = subtree_signatures(reference);
  if (ref.empty()) throw ReferenceUnparsable("no syntax");
  return multiset_recall(std::move(ref), subtree_signatures(candidate));
}

std::optional<double> dataflow_match_trees(const SyntaxNode& candidate,
                                           const SyntaxNode& reference) {
  auto ref = dataflow_edges(reference);
  if (ref.empty()) return std::nullopt;
  return multiset_recall(std::move(ref), dataflow_edges(candidate));
}

}  // namespace

double syntax_match(std::string_view candidate, std::string_view reference,
                    std::string_view /*language*/) {
  const SyntaxNode ref = parse_reference(reference);
  const SyntaxNode cand = parse_java(candidate, ParseMode::Prefix).root;
  return syntax_match_trees(cand, ref);
}

std::optional<double> dataflow_match(std::string_view candidate,
                                     std::string_view reference,
                                     std::string_view /*language*/) {
  const SyntaxNode ref = parse_java(reference, ParseMode::Prefix).root;
  const SyntaxNode cand = parse_java(candidate, ParseMode::Prefix).root;
  return dataflow_match_trees(cand, ref);
}

SimilarityReport codebleu(std::string_view candidate, std::string_view reference,
                          std::string_view language, const Weights& weights,
                          const KeywordSet& keywords) {
  if (weights.bleu < 0 || weights.keyword_bleu < 0 || weights.syntax < 0 ||
      weights.dataflow < 0 ||
      !(weights.bleu + weights.keyword_bleu + weights.syntax + weights.dataflow > 0)) {
    throw DomainError("CodeBLEU weights must be nonnegative with a positive sum");
  }
  const SyntaxNode ref_tree = parse_reference(reference);
  const SyntaxNode cand_tree = parse_java(candidate, ParseMode::Prefix).root;
  const auto cand_tokens = token_texts(candidate, language);
  const auto ref_tokens = token_texts(reference, language);

  SimilarityReport report;
  report.bleu = bleu(cand_tokens, ref_tokens);
  report.keyword_bleu = weighted_keyword_bleu(cand_tokens, ref_tokens, keywords);
  report.syntax_match = syntax_match_trees(cand_tree, ref_tree);
  report.dataflow_match = dataflow_match_trees(cand_tree, ref_tree);

  Weights w = weights;
  if (!report.dataflow_match) w.dataflow = 0.0;
  const double sum = w.bleu + w.keyword_bleu + w.syntax + w.dataflow;
  if (!(sum > 0)) {
    throw DomainError("CodeBLEU weights vanish once the absent dataflow term is dropped");
  }
  w.bleu /= sum;
  w.keyword_bleu /= sum;
  w.syntax /= sum;
  w.dataflow /= sum;
  report.weights = w;
  report.codebleu = w.bleu * report.bleu + w.keyword_bleu * report.keyword_bleu +
                    w.syntax * report.syntax_match +
                    w.dataflow * report.dataflow_match.value_or(0.0);
  report.codebleu = std::clamp(report.codebleu, 0.0, 1.0);
  return report;
}

}  // namespace nl2fix::codesim
