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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nl2fix/codesim/codebleu.hpp"
#include "nl2fix/codesim/lexer.hpp"
#include "nl2fix/codesim/syntax.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace nl2fix::codesim {
namespace {

std::vector<std::string> words(std::initializer_list<const char*> w) {
  return {w.begin(), w.end()};
}

TEST(Lexer, MaximalMunchAndLiterals) {
  EXPECT_EQ(token_texts("a>>>=b"), words({"a", ">>>=", "b"}));
  EXPECT_EQ(token_texts("x->x+1"), words({"x", "->", "x", "+", "1"}));
  EXPECT_EQ(token_texts("String s = \"a b\"; // tail"),
            words({"String", "s", "=", "\"a b\"", ";"}));
  const auto toks = tokenize("return 1.5e3 + 'c' + null + true + 0x1F + `");
  ASSERT_EQ(toks.size(), 12u);
  EXPECT_EQ(toks[0].kind, TokenKind::Keyword);
  EXPECT_EQ(toks[1].kind, TokenKind::FloatLiteral);
  EXPECT_EQ(toks[3].kind, TokenKind::CharLiteral);
  EXPECT_EQ(toks[5].kind, TokenKind::NullLiteral);
  EXPECT_EQ(toks[7].kind, TokenKind::BooleanLiteral);
  EXPECT_EQ(toks[9].kind, TokenKind::IntegerLiteral);
  EXPECT_EQ(toks[11].kind, TokenKind::Unknown);
  EXPECT_EQ(toks[11].offset, 42u);
}

TEST(Lexer, KeywordAsset) {
  EXPECT_EQ(default_keywords().size(), 50u);
  EXPECT_TRUE(default_keywords().contains("synchronized"));
  EXPECT_FALSE(default_keywords().contains("true"));
  EXPECT_EQ(parse_keywords("a\n\nb\n").size(), 2u);
  EXPECT_EQ(load_keywords(testing::source_dir() / "assets/keywords/java.txt"),
            default_keywords());
}

TEST(Bleu, Examples) {
  const auto ref = words({"return", "a", "+", "b", ";"});
  EXPECT_DOUBLE_EQ(bleu(ref, ref), 1.0);
  EXPECT_EQ(bleu({}, ref), 0.0);
  EXPECT_EQ(bleu(words({"x", "y"}), ref), 0.0);
  // Unigrams 4/5, bigrams 2/4, trigrams 0 -> 1/4, 4-grams 0 -> 1/3.
  const auto cand = words({"return", "a", "-", "b", ";"});
  const double expected = std::exp((std::log(0.8) + std::log(0.5) + std::log(0.25) +
                                    std::log(1.0 / 3.0)) / 4.0);
  EXPECT_NEAR(bleu(cand, ref), expected, 1e-12);
}

TEST(Bleu, MatchesFormulaOracle) {
  std::mt19937 rng(31);
  const std::vector<std::string> vocab{"a", "b", "c", "(", ")", ";", "if", "return"};
  auto random_seq = [&] {
    std::vector<std::string> s;
    for (int i = std::uniform_int_distribution<int>(0, 14)(rng); i > 0; --i) {
      s.push_back(vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)]);
    }
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    const auto cand = random_seq();
    const auto ref = random_seq();
    if (ref.empty()) continue;
    EXPECT_NEAR(bleu(cand, ref), oracle::bleu_by_formula(cand, ref), 1e-12);
    std::vector<double> w;
    for (const auto& t : cand) w.push_back(default_keywords().contains(t) ? 5.0 : 1.0);
    EXPECT_NEAR(weighted_keyword_bleu(cand, ref, default_keywords()),
                oracle::bleu_by_formula(cand, ref, w), 1e-12);
  }
}

TEST(Syntax, FixtureFunctionsParseStrictly) {
  const auto fns = testing::fixture_functions();
  ASSERT_EQ(fns.size(), 20u);
  for (const auto& fn : fns) {
    ParseResult r;
    ASSERT_NO_THROW(r = parse_java(fn, ParseMode::Strict)) << fn;
    EXPECT_TRUE(r.complete);
    ASSERT_EQ(r.root.children.size(), 1u) << to_sexpr(r.root);
    EXPECT_EQ(r.root.children[0].kind, "method_declaration") << fn;
  }
}

TEST(Syntax, StrictRejectsPrefixRecovers) {
  const std::string broken = "int f() {\n  int a = 1;\n  return a +;\n}\n";
  EXPECT_THROW(parse_java(broken, ParseMode::Strict), SyntaxError);
  const auto r = parse_java(broken, ParseMode::Prefix);
  EXPECT_FALSE(r.complete);
  EXPECT_NE(to_sexpr(r.root).find("local_variable_declaration"), std::string::npos);
  EXPECT_EQ(to_sexpr(r.root).find("return_statement"), std::string::npos);
  // Truncated input closes the open method.
  const auto cut = parse_java("int f() {\n  int a = 1;\n", ParseMode::Prefix);
  EXPECT_EQ(cut.root.children.size(), 1u);
}

TEST(Syntax, GenericsCloseWithShift) {
  EXPECT_NO_THROW(parse_java("Map<String, List<Integer>> m = new HashMap<>();",
                             ParseMode::Strict));
}

TEST(SyntaxMatch, HandCountedDeletion) {
  const std::string ref = "int a = 1; int b = 2; return a + b;";
  // The reference has 11 internal nodes. Dropping "int b = 2;" loses the
  // program root signature and the second declaration's three subtrees.
  EXPECT_NEAR(syntax_match("int a = 1; return a + b;", ref), 7.0 / 11.0, 1e-12);
  EXPECT_EQ(syntax_match(ref, ref), 1.0);
  EXPECT_THROW(syntax_match(ref, "int f( {"), ReferenceUnparsable);
  EXPECT_THROW(syntax_match(ref, ""), ReferenceUnparsable);
}

TEST(DataflowMatch, RenamingInvariant) {
  EXPECT_EQ(dataflow_match("int b = 1; return b;", "int a = 1; return a;"), 1.0);
  EXPECT_FALSE(dataflow_match("return 2;", "return 1;").has_value());
  EXPECT_EQ(dataflow_match("int b = 1; return 0;", "int a = 1; return a;"), 0.0);
}

TEST(CodeBleu, AbsentDataflowRenormalizes) {
  const auto r = codebleu("return 1;", "return 1;");
  EXPECT_FALSE(r.dataflow_match.has_value());
  EXPECT_NEAR(r.weights.bleu, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.weights.dataflow, 0.0);
  EXPECT_NEAR(r.codebleu, 1.0, 1e-12);
}

TEST(CodeBleu, CustomWeightsAreNormalized) {
  Weights w{1, 1, 1, 1};
  const auto r = codebleu("int a = 1; return a;", "int a = 2; return a;", "java", w);
  EXPECT_NEAR(r.weights.syntax, 0.25, 1e-15);
  const double expected = 0.25 * (r.bleu + r.keyword_bleu + r.syntax_match + *r.dataflow_match);
  EXPECT_NEAR(r.codebleu, expected, 1e-12);
  EXPECT_THROW(codebleu("x", "return 1;", "java", Weights{0, 0, 0, 0}), DomainError);
  EXPECT_THROW(codebleu("return 1;", "return 1;", "java", Weights{0, 0, 0, 1}), DomainError);
}

TEST(CodeBleu, SelfSimilarityIsOne) {
  for (const auto& fn : testing::fixture_functions()) {
    const auto r = codebleu(fn, fn);
    EXPECT_NEAR(r.codebleu, 1.0, 1e-12) << fn;
    EXPECT_NEAR(r.bleu, 1.0, 1e-12);
    EXPECT_EQ(r.syntax_match, 1.0);
  }
}

TEST(CodeBleu, BoundedOnFixturePairsAndMutations) {
  const auto fns = testing::fixture_functions();
  std::mt19937 rng(37);
  for (std::size_t i = 0; i < fns.size(); ++i) {
    for (std::size_t j = 0; j < fns.size(); ++j) {
      const auto r = codebleu(fns[i], fns[j]);
      EXPECT_GE(r.codebleu, 0.0);
      EXPECT_LE(r.codebleu, 1.0);
      if (i != j) EXPECT_LT(r.codebleu, 1.0);
    }
    // Randomly chopped candidates still score within bounds.
    for (int k = 0; k < 5; ++k) {
      const auto cut = std::uniform_int_distribution<std::size_t>(0, fns[i].size())(rng);
      const auto r = codebleu(fns[i].substr(0, cut), fns[i]);
      EXPECT_GE(r.codebleu, 0.0);
      EXPECT_LE(r.codebleu, 1.0);
    }
  }
}

TEST(CodeBleu, IdentifierRenameKeepsStructure) {
  const std::string ref = "int total(int[] xs) { int s = 0; for (int x : xs) { s += x; } return s; }";
  const std::string renamed =
      "int total(int[] ys) { int acc = 0; for (int y : ys) { acc += y; } return acc; }";
  const auto r = codebleu(renamed, ref);
  EXPECT_EQ(r.syntax_match, 1.0);
  EXPECT_EQ(r.dataflow_match, 1.0);
  EXPECT_LT(r.bleu, 1.0);
}

}  // namespace
}  // namespace nl2fix::codesim
