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

#include "nl2fix/corpus.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <random>

#include "test_util.hpp"

namespace nl2fix::corpus {
namespace {

using nlohmann::json;

json record_json(const std::string& id) {
  return {{"bug_id", id},
          {"project", "Lang"},
          {"issue_title", "NPE in join"},
          {"issue_description", "join(null) throws"},
          {"buggy_function", "int f(int x) {\n  return x;\n}\n"},
          {"fixed_function", "int f(int x) {\n  return x + 1;\n}\n"},
          {"file_path", "src/main/java/F.java"},
          {"method_span", {{"start_line", 10}, {"end_line", 12}}},
          {"workspace_setup_cmd", "true"},
          {"compile_cmd", "true"},
          {"regression_cmd", "true"},
          {"trigger_cmd", "true"}};
}

std::string lines(std::initializer_list<json> records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

TEST(StripComments, LineAndBlock) {
  EXPECT_EQ(strip_comments("int x = 1; // one\nint y;\n"), "int x = 1;\nint y;\n");
  EXPECT_EQ(strip_comments("// header\nint y;\n"), "int y;\n");
  EXPECT_EQ(strip_comments("a/*x*/b"), "a b");
  EXPECT_EQ(strip_comments("a /*x*/ b"), "a  b");
  EXPECT_EQ(strip_comments("/**\n * Javadoc.\n */\nvoid f() {}\n"), "void f() {}\n");
  EXPECT_EQ(strip_comments("f();\n    /* gone */\ng();\n"), "f();\ng();\n");
}

TEST(StripComments, LiteralsUntouched) {
  const std::string s = "String u = \"http://x\"; char c = '/'; String t = \"/* no */\";\n";
  EXPECT_EQ(strip_comments(s), s);
  const std::string esc = "String q = \"a\\\"//b\";\n";
  EXPECT_EQ(strip_comments(esc), esc);
  const std::string block = "String b = \"\"\"\n  // kept\n  \"\"\";\n";
  EXPECT_EQ(strip_comments(block), block);
}

TEST(StripComments, Unterminated) {
  try {
    strip_comments("int a; /* open");
    FAIL();
  } catch (const UnterminatedBlockComment& e) {
    EXPECT_EQ(e.offset(), 7u);
  }
}

TEST(StripComments, Idempotent) {
  std::mt19937 rng(17);
  const std::vector<std::string> pieces{"a", " ", "\n", "//c", "/*c*/", "\"s\"", "'/'", ";"};
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const int len = std::uniform_int_distribution<int>(0, 10)(rng);
    for (int j = 0; j < len; ++j) {
      s += pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
    }
    const auto once = strip_comments(s);
    EXPECT_EQ(strip_comments(once), once) << s;
  }
}

TEST(StripComments, FixtureFunctionsHaveNoComments) {
  for (const auto& fn : testing::fixture_functions()) {
    EXPECT_EQ(strip_comments(fn), fn);
  }
}

TEST(Corpus, LoadsAndStripsBuggyComments) {
  auto a = record_json("Lang-1");
  a["buggy_function"] = "int f(int x) {\n  // TODO\n  return x;\n}\n";
  const auto corpus = parse_corpus(lines({a, record_json("Lang-2")}), "mem");
  ASSERT_EQ(corpus.records.size(), 2u);
  EXPECT_EQ(corpus.records[0].buggy_function, "int f(int x) {\n  return x;\n}\n");
  EXPECT_EQ(corpus.records[1].bug_id, "Lang-2");
  EXPECT_EQ(corpus.records[0].method_span, (MethodSpan{10, 12}));
  EXPECT_NE(corpus.find("Lang-2"), nullptr);
  EXPECT_EQ(corpus.find("Lang-9"), nullptr);
  EXPECT_EQ(corpus.source_path, "mem");
}

TEST(Corpus, SpanAsArrayAndBlankLines) {
  auto a = record_json("X-1");
  a["method_span"] = json::array({3, 4});
  const auto corpus = parse_corpus("\n" + a.dump() + "\n\n");
  ASSERT_EQ(corpus.records.size(), 1u);
  EXPECT_EQ(corpus.records[0].method_span, (MethodSpan{3, 4}));
}

TEST(Corpus, Errors) {
  try {
    parse_corpus(lines({record_json("A")}) + "{not json\n");
    FAIL();
  } catch (const MalformedLine& e) {
    EXPECT_EQ(e.line_no(), 2u);
  }
  EXPECT_THROW(parse_corpus("[1,2]\n"), MalformedLine);

  try {
    parse_corpus(lines({record_json("A"), record_json("A")}));
    FAIL();
  } catch (const DuplicateBugId& e) {
    EXPECT_EQ(e.id(), "A");
  }

  auto same = record_json("B");
  same["fixed_function"] = same["buggy_function"];
  EXPECT_THROW(parse_corpus(lines({same})), InvalidRecord);

  auto inverted = record_json("C");
  inverted["method_span"] = {{"start_line", 5}, {"end_line", 4}};
  try {
    parse_corpus(lines({inverted}));
    FAIL();
  } catch (const InvalidRecord& e) {
    EXPECT_EQ(e.id(), "C");
    EXPECT_NE(e.reason().find("span inverted"), std::string::npos);
  }

  auto open = record_json("D");
  open["buggy_function"] = "int f() { /* never closed\n return 1; }";
  EXPECT_THROW(parse_corpus(lines({open})), InvalidRecord);

  auto timeout = record_json("E");
  timeout["stage_timeout_s"] = 0;
  EXPECT_THROW(parse_corpus(lines({timeout})), InvalidRecord);
}

TEST(Corpus, ValidateRecordListsEveryViolation) {
  BugRecord r;
  r.method_span = {0, -1};
  const auto v = validate_record(r);
  EXPECT_GE(v.size(), 4u);
}

TEST(Corpus, RoundTripThroughFile) {
  testing::TempDir dir;
  auto a = record_json("Lang-1");
  a["stage_timeout_s"] = 30.5;
  a["issue_description"] = "unicode \xc3\xa9 and \"quotes\"\nnewline";
  const auto original = parse_corpus(lines({a, record_json("Lang-2")}));
  const auto path = dir.path() / "c.jsonl";
  atomic_write_file(path, serialize_corpus(original));
  const auto loaded = load_corpus(path);
  EXPECT_EQ(loaded.records, original.records);
  EXPECT_EQ(serialize_corpus(loaded), serialize_corpus(original));
}

}  // namespace
}  // namespace nl2fix::corpus
