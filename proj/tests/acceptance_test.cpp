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

// Acceptance suite: one test per criterion, each printing a single
// "[ACCEPT] criterion N: PASS|FAIL" line.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>

#include "nl2fix/cli.hpp"
#include "nl2fix/codesim/codebleu.hpp"
#include "nl2fix/codesim/lexer.hpp"
#include "nl2fix/common/hash.hpp"
#include "nl2fix/metrics.hpp"
#include "nl2fix/pipeline.hpp"
#include "nl2fix/prompt.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace nl2fix {
namespace {

using nlohmann::json;
using testing::TempDir;

// Fails the current test when it outlives its time limit.
class TimeLimit {
 public:
  explicit TimeLimit(double seconds)
      : seconds_(seconds), start_(std::chrono::steady_clock::now()) {}
  ~TimeLimit() {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    EXPECT_LT(elapsed.count(), seconds_) << "time limit exceeded";
  }

 private:
  double seconds_;
  std::chrono::steady_clock::time_point start_;
};

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "nl2fix");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) row.push_back(f);
    rows.push_back(row);
  }
  return rows;
}

std::string fenced(const std::string& code) { return "Fixed version:\n```java\n" + code + "```\n"; }

TEST(Acceptance, Criterion1PassAtKMatchesEnumeration) {
  TimeLimit limit(5);
  for (int n = 1; n <= 12; ++n) {
    for (int c = 0; c <= n; ++c) {
      const auto expected = oracle::pass_at_k_enumerated(n, c);
      for (int k = 1; k <= n; ++k) {
        EXPECT_NEAR(metrics::pass_at_k(n, c, k), expected[k - 1], 1e-12)
            << "n=" << n << " c=" << c << " k=" << k;
      }
      EXPECT_EQ(metrics::pass_at_k(n, c, 1), static_cast<double>(c) / n);
    }
  }
}

TEST(Acceptance, Criterion2PruningNeverLowersPassAtK) {
  TimeLimit limit(5);
  std::mt19937 rng(2024);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int i = 0; i < 1000; ++i) {
    const int n = uniform(1, 200);
    const int c = uniform(0, n);
    const int j = uniform(0, std::min(n - c, n - 1));
    const int k = uniform(1, n - j);
    const double before = metrics::pass_at_k(n, c, k);
    const double after = metrics::pass_at_k(n - j, c, k);
    EXPECT_GE(after, before) << "n=" << n << " c=" << c << " j=" << j << " k=" << k;
  }
}

TEST(Acceptance, Criterion3WilcoxonMatchesSignEnumeration) {
  TimeLimit limit(5);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = std::uniform_int_distribution<int>(5, 10)(rng);
    std::vector<double> x(m), y(m, 0.0), diffs(m);
    for (int i = 0; i < m; ++i) {
      // Small integer magnitudes force ties; zero is skipped.
      int d = std::uniform_int_distribution<int>(-4, 4)(rng);
      if (d == 0) d = 1;
      x[i] = d;
      diffs[i] = d;
    }
    const auto r = metrics::wilcoxon_signed_rank_one_sided(x, y);
    EXPECT_TRUE(r.exact);
    EXPECT_NEAR(r.p_value, oracle::wilcoxon_enumerated(diffs), 1e-12);
  }
  const std::vector<double> up{1, 2, 3, 4, 5, 6}, zero(6, 0.0);
  EXPECT_EQ(metrics::wilcoxon_signed_rank_one_sided(up, zero).p_value, 0.015625);
}

// Renames every identifier consistently, leaving all other text intact.
std::string rename_identifiers(const std::string& source) {
  std::map<std::string, std::string> names;
  std::string out;
  std::size_t copied = 0;
  for (const auto& t : codesim::tokenize(source)) {
    if (t.kind != codesim::TokenKind::Identifier) continue;
    auto [it, added] = names.try_emplace(t.text, "renamed" + std::to_string(names.size()));
    out += source.substr(copied, t.offset - copied) + it->second;
    copied = t.offset + t.text.size();
  }
  return out + source.substr(copied);
}

TEST(Acceptance, Criterion4CodeBleuReflexiveBoundedRenameInvariant) {
  TimeLimit limit(30);
  const auto fns = testing::fixture_functions();
  ASSERT_EQ(fns.size(), 20u);
  for (const auto& fn : fns) EXPECT_NEAR(codesim::codebleu(fn, fn).codebleu, 1.0, 1e-9);

  std::mt19937 rng(99);
  auto pick = std::uniform_int_distribution<std::size_t>(0, fns.size() - 1);
  for (int i = 0; i < 200; ++i) {
    std::string cand = fns[pick(rng)];
    const std::string& ref = fns[pick(rng)];
    if (i % 2) cand = cand.substr(0, std::uniform_int_distribution<std::size_t>(0, cand.size())(rng));
    const auto r = codesim::codebleu(cand, ref);
    for (double v : {r.bleu, r.keyword_bleu, r.syntax_match, r.codebleu}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    if (r.dataflow_match) {
      EXPECT_GE(*r.dataflow_match, 0.0);
      EXPECT_LE(*r.dataflow_match, 1.0);
    }
  }

  int checked = 0;
  for (const auto& fn : fns) {
    if (!codesim::dataflow_match(fn, fn)) continue;  // no def-use edges to compare
    const auto renamed = rename_identifiers(fn);
    ASSERT_NE(renamed, fn);
    EXPECT_EQ(codesim::dataflow_match(renamed, fn), 1.0) << renamed;
    if (++checked == 10) break;
  }
  EXPECT_EQ(checked, 10);
}

// ---- ranking replication fixture ----

// A chain of arithmetic statements; `changed` of them get a different
// operator and operand, `fresh` of them new variable names.
std::string chain_function(int bug, int changed, int fresh, bool drop_semicolon = false) {
  const int length = 24;
  std::string s = "public static int compute" + std::to_string(bug) + "(int a, int b) {\n";
  s += "    int t0 = a + b;\n";
  for (int i = 1; i <= length; ++i) {
    const std::string var = (i <= fresh ? "u" : "t") + std::to_string(i);
    const std::string prev = (i - 1 <= fresh && i > 1 ? "u" : "t") + std::to_string(i - 1);
    const bool alt = i > length - changed;
    s += "    int " + var + " = " + prev + (alt ? " - b" : " * a") + (alt ? " / 3" : "") + ";\n";
  }
  s += "    return " + std::string(length <= fresh ? "u" : "t") + std::to_string(length) +
       (drop_semicolon ? "\n" : ";\n");
  s += "}\n";
  return s;
}

TEST(Acceptance, Criterion5RankingReplicationFixture) {
  TimeLimit limit(30);
  TempDir dir;
  ranking::LocalEmbedder embedder;
  auto sim = [&](const std::string& a, const std::string& b) {
    return ranking::cosine(embedder.embed(a), embedder.embed(b));
  };

  json::array_t corpus_lines;
  std::string script, stub;
  int plausible_total = 0;
  for (int bug = 0; bug < 10; ++bug) {
    const std::string buggy = chain_function(bug, 0, 0);
    // Plausible patches: the smallest edits landing in [0.95, 0.99].
    std::vector<std::string> plausible;
    for (int changed = 1; changed <= 24 && plausible.size() < 2; ++changed) {
      const auto p = chain_function(bug, changed, 0);
      const double s = sim(p, buggy);
      if (s >= 0.95 && s <= 0.99) plausible.push_back(p);
    }
    ASSERT_EQ(plausible.size(), 2u) << "bug " << bug;
    const std::string wrong_a = chain_function(bug, 12, 12);
    const std::string wrong_b = chain_function(bug, 20, 24);
    const std::string broken = chain_function(bug, 16, 20, true);
    for (const auto* p : {&wrong_a, &wrong_b, &broken}) ASSERT_LT(sim(*p, buggy), 0.95);

    const std::string id = "Rank-" + std::to_string(bug);
    const std::vector<const std::string*> samples{&wrong_a, &plausible[0], &broken, &wrong_b,
                                                  &plausible[1], &wrong_a, &broken,
                                                  &plausible[0], &wrong_b, &broken};
    for (std::size_t i = 0; i < samples.size(); ++i) {
      script += json{{"bug_id", id}, {"index", i}, {"response", fenced(*samples[i])}}.dump() + "\n";
      if (samples[i] == &plausible[0] || samples[i] == &plausible[1]) ++plausible_total;
    }
    for (const auto& p : plausible) {
      stub += json{{"bug_id", id}, {"patch", p}, {"status", "Plausible"}}.dump() + "\n";
    }
    stub += json{{"bug_id", id}, {"patch", wrong_a}, {"status", "Wrong"}}.dump() + "\n";
    stub += json{{"bug_id", id}, {"patch", wrong_b}, {"status", "Wrong"}}.dump() + "\n";
    stub += json{{"bug_id", id}, {"patch", broken}, {"status", "Uncompilable"}}.dump() + "\n";
    corpus_lines.push_back({{"bug_id", id},
                            {"project", "Rank"},
                            {"issue_title", "compute" + std::to_string(bug) + " returns wrong value"},
                            {"issue_description", "The tail of the chain applies the wrong operator."},
                            {"buggy_function", buggy},
                            {"fixed_function", plausible[0]},
                            {"file_path", "src/Rank.java"},
                            {"method_span", {1, 28}},
                            {"workspace_setup_cmd", "true"},
                            {"compile_cmd", "true"},
                            {"regression_cmd", "true"},
                            {"trigger_cmd", "true"}});
  }
  ASSERT_EQ(plausible_total, 30);
  std::string corpus_text;
  for (const auto& line : corpus_lines) corpus_text += line.dump() + "\n";
  atomic_write_file(dir.path() / "corpus.jsonl", corpus_text);
  atomic_write_file(dir.path() / "script.jsonl", script);
  atomic_write_file(dir.path() / "stub.jsonl", stub);
  const json config{
      {"corpus_path", "corpus.jsonl"},
      {"cache_dir", "cache"},
      {"report_dir", "report"},
      {"generation", {{"kind", "mock"}, {"script", "script.jsonl"}}},
      {"embedding", {{"kind", "local"}}},
      {"gen", {{"n_samples", 10}}},
      {"validation", {{"runner", "stub"}, {"stub_outcomes", "stub.jsonl"}}},
      {"ranking", {{"threshold", 0.95}, {"variant", "both"}}}};
  atomic_write_file(dir.path() / "config.json", config.dump(2));
  const auto config_path = (dir.path() / "config.json").string();

  std::string err;
  ASSERT_EQ(cli({"generate", "--config", config_path}, &err), kExitOk) << err;
  ASSERT_EQ(cli({"validate", "--config", config_path}, &err), kExitOk) << err;
  ASSERT_EQ(cli({"rank", "--config", config_path}, &err), kExitOk) << err;

  const auto rows = read_csv(dir.path() / "report" / "ranking.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"variant", "threshold", "r.P@1", "P@1", "r.P@5", "P@5"}));
  ASSERT_EQ(rows[1][0], "all");
  ASSERT_EQ(rows[2][0], "compile-pruned");
  EXPECT_EQ(rows[1][2], "100.00");
  EXPECT_GE(std::stod(rows[2][5]), std::stod(rows[1][5]));
}

TEST(Acceptance, Criterion6EndToEndDeterminism) {
  TimeLimit limit(60);
  TempDir first, second;
  const auto config_a = testing::write_synthetic_config(first.path()).string();
  const auto config_b = testing::write_synthetic_config(second.path()).string();
  std::string err;
  ASSERT_EQ(cli({"run", "--config", config_a}, &err), kExitOk) << err;
  ASSERT_EQ(cli({"run", "--config", config_b}, &err), kExitOk) << err;
  const auto report_a = first.path() / "report", report_b = second.path() / "report";
  std::map<std::string, std::string> cold;
  for (const char* name : {"passk.csv", "summary.json", "ranking.csv"}) {
    cold[name] = read_file(report_a / name);
    EXPECT_EQ(cold[name], read_file(report_b / name)) << name;
  }
  // A rerun over the warm cache reproduces the same bytes.
  ASSERT_EQ(cli({"run", "--config", config_a}, &err), kExitOk) << err;
  for (const auto& [name, bytes] : cold) EXPECT_EQ(read_file(report_a / name), bytes) << name;

  const auto truth = json::parse(read_file(testing::synthetic_dir() / "expected_outcomes.json"));
  const auto summary = json::parse(read_file(report_a / "summary.json"));
  EXPECT_EQ(summary["status_counts"], truth["status_counts"]);
  const auto table = validation_from_json(json::parse(read_file(report_a / "validation.json")));
  ASSERT_EQ(table.bugs.size(), truth["per_bug"].size());
  for (const auto& bug : table.bugs) {
    json counts{{"Plausible", 0}, {"Wrong", 0}, {"Uncompilable", 0}};
    for (const auto& c : bug.candidates) {
      counts[std::string(validation::to_string(c.status))] =
          counts[std::string(validation::to_string(c.status))].get<int>() + 1;
    }
    EXPECT_EQ(counts, truth["per_bug"][bug.bug_id]) << bug.bug_id;
  }
}

// Synthetic corpus plus one record per fixture function, each with a
// fix carrying a marker that appears nowhere else.
corpus::Corpus prompt_corpus() {
  auto c = corpus::load_corpus(testing::synthetic_dir() / "corpus.jsonl");
  const auto fns = testing::fixture_functions();
  for (std::size_t i = 0; i < fns.size(); ++i) {
    corpus::BugRecord r;
    r.bug_id = "Fixture-" + std::to_string(i);
    r.project = i % 2 ? "Odd" : "Even";
    r.issue_title = "Fixture function " + std::to_string(i) + " misbehaves";
    r.issue_description = "Observed on input " + std::to_string(i * 7) + ".";
    r.buggy_function = corpus::strip_comments(fns[i]);
    const auto brace = fns[i].find('{');
    r.fixed_function = fns[i].substr(0, brace + 1) + "\n    int fixMarker" + std::to_string(i) +
                       " = 0;" + fns[i].substr(brace + 1);
    r.file_path = "src/Fixture.java";
    r.method_span = {1, 10};
    r.compile_cmd = r.regression_cmd = r.trigger_cmd = r.workspace_setup_cmd = "true";
    c.records.push_back(r);
  }
  return c;
}

TEST(Acceptance, Criterion7PromptStrategyContracts) {
  TimeLimit limit(30);
  const auto c = prompt_corpus();
  ASSERT_EQ(c.records.size(), 25u);
  for (const auto& record : c.records) {
    for (auto strategy :
         {prompt::Strategy::ZeroShot, prompt::Strategy::TitleOnly, prompt::Strategy::OneShot}) {
      const auto p = prompt::build_prompt(strategy, record, c);
      std::string text;
      for (const auto& t : p.turns) text += t.text + "\n";
      EXPECT_EQ(text.find(record.fixed_function), std::string::npos)
          << record.bug_id << " " << prompt::to_string(strategy);
      if (record.bug_id.starts_with("Fixture-")) {
        const auto marker = "fixMarker" + record.bug_id.substr(8) + " ";
        EXPECT_EQ(text.find(marker), std::string::npos) << record.bug_id;
      }
    }

    // Brute-force nearest neighbour; ties go to the smaller bug id.
    const corpus::BugRecord* best = nullptr;
    std::size_t best_d = 0;
    for (const auto& other : c.records) {
      if (other.bug_id == record.bug_id) continue;
      const auto d = oracle::levenshtein_table(other.buggy_function, record.buggy_function);
      if (!best || d < best_d || (d == best_d && other.bug_id < best->bug_id)) {
        best = &other;
        best_d = d;
      }
    }
    const auto one_shot = prompt::build_prompt(prompt::Strategy::OneShot, record, c);
    ASSERT_TRUE(one_shot.parts.example.has_value());
    EXPECT_EQ(one_shot.parts.example->bug_id, best->bug_id) << record.bug_id;
  }
}

TEST(Acceptance, Criterion8DuplicateAccounting) {
  TimeLimit limit(10);
  TempDir dir;
  auto config = load_config(testing::write_synthetic_config(dir.path()));
  config.bug_filter = std::vector<std::string>{"Lang-1"};
  config.n_samples = 10;

  const std::vector<std::string> unique{
      "public static boolean isBlank(String s) {\n    return s == null || s.trim().isEmpty();\n}\n",
      "public static boolean isBlank(String s) {\n    return s == null || s.isBlank();\n}\n",
      "public static boolean isBlank(String s) {\n    return s.isEmpty();\n}\n",
      "public static boolean isBlank(String s) {\n    return false;\n}\n",
      "public static boolean isBlank(String s) {\n    return true;\n}\n",
      "public static boolean isBlank(String s) {\n    return s == null;\n}\n"};
  // Four repeats, two of them differing only in whitespace.
  const std::vector<std::string> samples{
      unique[0], unique[1], unique[2], unique[3], unique[4], unique[5], unique[0],
      "public static boolean isBlank(String s){ return s == null || s.isBlank(); }\n", unique[2],
      "public static boolean isBlank(String s) {\n        return false;\n}\n"};
  sampling::MockProvider provider;
  validation::ScriptedRunner runner;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    provider.add("Lang-1", static_cast<int>(i), 1, {fenced(samples[i]), 0});
  }
  for (std::size_t i = 0; i < unique.size(); ++i) {
    runner.add("Lang-1", sha256_hex(metrics::canonical_form(unique[i])),
               {true, true, i % 2 == 0});
  }

  std::ostringstream log;
  Pipeline pipeline(config, log, {&provider, &runner});
  const auto manifest = pipeline.generate();
  ASSERT_EQ(manifest.bugs.size(), 1u);
  std::vector<CandidatePatch> candidates;
  for (const auto& c : manifest.bugs[0].candidates) {
    candidates.push_back(make_candidate("Lang-1", c.index, "", c.patch_text));
  }
  const auto stats = sampling::dedup_stats(candidates);
  EXPECT_EQ(stats.total, 10u);
  EXPECT_EQ(stats.unique_count, 6u);
  EXPECT_DOUBLE_EQ(stats.duplicate_fraction, 0.40);

  pipeline.validate();
  EXPECT_EQ(runner.provisions(), 6u);
  EXPECT_EQ(runner.executions("compile"), 6u);
  pipeline.report();
  const auto summary = json::parse(read_file(dir.path() / "report" / "summary.json"));
  EXPECT_DOUBLE_EQ(summary["summary_stats"]["duplicate_pct"].get<double>(), 40.0);
}

class AcceptancePrinter : public ::testing::EmptyTestEventListener {
  void OnTestEnd(const ::testing::TestInfo& info) override {
    const std::string name = info.name();
    const auto pos = name.find("Criterion");
    if (pos == std::string::npos) return;
    const int criterion = std::atoi(name.c_str() + pos + 9);
    std::printf("[ACCEPT] criterion %d: %s (%lld ms)\n", criterion,
                info.result()->Passed() ? "PASS" : "FAIL",
                static_cast<long long>(info.result()->elapsed_time()));
    std::fflush(stdout);
  }
};

}  // namespace
}  // namespace nl2fix

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  ::testing::UnitTest::GetInstance()->listeners().Append(new nl2fix::AcceptancePrinter);
  return RUN_ALL_TESTS();
}
