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

#include "nl2fix/pipeline.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "nl2fix/cli.hpp"
#include "nl2fix/config.hpp"
#include "test_util.hpp"

namespace nl2fix {
namespace {

using nlohmann::json;
using testing::TempDir;
using testing::write_synthetic_config;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nl2fix");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json read_json_file(const std::filesystem::path& p) { return json::parse(read_file(p)); }

TEST(Config, DefaultsAndRelativePaths) {
  const auto c = parse_config(json{{"corpus_path", "c.jsonl"}}, "/base");
  EXPECT_EQ(c.corpus_path, "/base/c.jsonl");
  EXPECT_EQ(c.cache_dir, "/base/cache");
  EXPECT_DOUBLE_EQ(c.temperature, 0.8);
  EXPECT_EQ(c.n_samples, 100);
  EXPECT_EQ(c.max_gen_tokens, 750);
  EXPECT_EQ(c.generation.context_budget, 8192);
  ASSERT_TRUE(c.threshold.has_value());
  EXPECT_DOUBLE_EQ(*c.threshold, 0.95);
  EXPECT_EQ(c.variants.size(), 2u);
  EXPECT_EQ(c.strategy, prompt::Strategy::ZeroShot);
}

TEST(Config, RejectsInlineKeysAndBadValues) {
  EXPECT_THROW(parse_config(json{{"corpus_path", "c"}, {"generation", {{"api_key", "x"}}}}, "/"),
               ConfigError);
  EXPECT_THROW(parse_config(json{{"corpus_path", "c"}, {"strategy", "five-shot"}}, "/"), ConfigError);
  EXPECT_THROW(parse_config(json{{"gen", {}}}, "/"), ConfigError);
  EXPECT_THROW(parse_threshold("high"), ConfigError);
  EXPECT_FALSE(parse_threshold("median").has_value());
  EXPECT_DOUBLE_EQ(*parse_threshold("0.9"), 0.9);
  EXPECT_EQ(parse_variants("compile-pruned"),
            std::vector<ranking::Variant>{ranking::Variant::CompilePruned});

  TempDir dir;
  auto c = load_config(write_synthetic_config(dir.path()));
  EXPECT_NO_THROW(check_config(c));
  c.n_samples = 0;
  EXPECT_THROW(check_config(c), ConfigError);
  c = load_config(write_synthetic_config(dir.path()));
  c.generation.context_budget = c.max_gen_tokens;
  EXPECT_THROW(check_config(c), ConfigError);
}

TEST(Cli, UsageErrorsExitWithConfigCode) {
  EXPECT_EQ(cli({}).code, kExitConfig);
  EXPECT_EQ(cli({"run"}).code, kExitConfig);
  EXPECT_EQ(cli({"run", "--config", "/nonexistent/config.json"}).code, kExitConfig);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);

  TempDir dir;
  const auto config = write_synthetic_config(dir.path()).string();
  const auto r = cli({"generate", "--config", config, "--bugs", "Lang-1,Nope-9"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("Nope-9"), std::string::npos);
  EXPECT_EQ(cli({"rank", "--config", config, "--threshold", "high"}).code, kExitConfig);
}

TEST(Cli, FlagsOverrideConfig) {
  TempDir dir;
  const auto config = write_synthetic_config(dir.path()).string();
  const auto r = cli({"generate", "--config", config, "--bugs", "Math-2, Lang-1", "--samples", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto manifest = manifest_from_json(read_json_file(dir.path() / "report" / "manifest.json"));
  ASSERT_EQ(manifest.bugs.size(), 2u);
  EXPECT_EQ(manifest.bugs[0].bug_id, "Lang-1");  // corpus order
  EXPECT_EQ(manifest.bugs[1].bug_id, "Math-2");
  EXPECT_EQ(manifest.bugs[0].candidates.size(), 3u);
}

TEST(Cli, PhaseWithoutInputsFails) {
  TempDir dir;
  const auto config = write_synthetic_config(dir.path()).string();
  const auto r = cli({"validate", "--config", config});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("MissingArtifact"), std::string::npos);
}

TEST(Cli, ProviderFailureExitCode) {
  TempDir dir;
  // The script has ten samples per bug; the eleventh has no response.
  const auto config = write_synthetic_config(dir.path()).string();
  EXPECT_EQ(cli({"generate", "--config", config, "--samples", "11"}).code, kExitProvider);
}

TEST(Cli, ValidationFailureExitCode) {
  TempDir dir;
  const auto config =
      write_synthetic_config(dir.path(), {{"validation",
                                           {{"runner", "subprocess"},
                                            {"work_dir", (dir.path() / "work").string()}}}})
          .string();
  ASSERT_EQ(cli({"generate", "--config", config, "--bugs", "Lang-1"}).code, kExitOk);
  // The synthetic setup command does not exist on this machine.
  EXPECT_EQ(cli({"validate", "--config", config}).code, kExitValidation);
}

TEST(Pipeline, WarmCacheMakesNoProviderCalls) {
  TempDir dir;
  const auto config = load_config(write_synthetic_config(dir.path()));
  sampling::MockProvider first, second;
  first.add_file(testing::synthetic_dir() / "mock_responses.jsonl");
  second.add_file(testing::synthetic_dir() / "mock_responses.jsonl");
  std::ostringstream log;
  const auto a = Pipeline(config, log, {&first}).generate();
  const auto b = Pipeline(config, log, {&second}).generate();
  EXPECT_EQ(first.calls(), 50u);
  EXPECT_EQ(second.calls(), 0u);
  EXPECT_EQ(manifest_to_json(a), manifest_to_json(b));
}

TEST(Pipeline, ArtifactsAgreeWithEachOther) {
  TempDir dir;
  std::ostringstream log;
  Pipeline pipeline(load_config(write_synthetic_config(dir.path())), log);
  pipeline.run();
  const auto report = dir.path() / "report";
  const auto table = validation_from_json(read_json_file(report / "validation.json"));
  const auto summary = read_json_file(report / "summary.json");

  std::int64_t plausible = 0, fixed = 0;
  for (const auto& b : table.bugs) {
    const auto r = bug_result(b);
    plausible += r.c;
    fixed += r.c > 0;
  }
  EXPECT_EQ(summary["status_counts"]["Plausible"].get<std::int64_t>(), plausible);
  EXPECT_EQ(summary["fixed_bugs"].get<std::int64_t>(), fixed);

  // pass@n equals the fraction of bugs with any plausible patch.
  const auto passk = read_file(report / "passk.csv");
  char expected[64];
  std::snprintf(expected, sizeof expected, "\n10,%.4f\n", 100.0 * fixed / table.bugs.size());
  EXPECT_NE(passk.find(expected), std::string::npos) << passk;

  // Every candidate's manifest hash is the hash validated.
  const auto manifest = manifest_from_json(read_json_file(report / "manifest.json"));
  ASSERT_EQ(manifest.bugs.size(), table.bugs.size());
  for (std::size_t b = 0; b < table.bugs.size(); ++b) {
    for (std::size_t i = 0; i < table.bugs[b].candidates.size(); ++i) {
      EXPECT_EQ(manifest.bugs[b].candidates[i].content_hash,
                table.bugs[b].candidates[i].content_hash);
    }
  }
  EXPECT_FALSE(std::filesystem::exists(report / "overlap.json"));
}

TEST(Pipeline, MedianThresholdAndOverlap) {
  TempDir first_dir, second_dir;
  std::ostringstream log;
  Pipeline(load_config(write_synthetic_config(first_dir.path())), log).run();

  const auto config = load_config(write_synthetic_config(
      second_dir.path(), {{"ranking", {{"threshold", "median"}}},
                          {"run_label", "second"},
                          {"overlap_runs", {{"first", (first_dir.path() / "report").string()}}}}));
  Pipeline(config, log).run();
  const auto report = second_dir.path() / "report";
  const auto ranked = read_json_file(report / "ranked_suggestions.json");
  EXPECT_EQ(ranked["threshold_mode"], "median");
  const double t = ranked["threshold"];
  EXPECT_GT(t, 0.0);
  EXPECT_LT(t, 1.0);

  const auto overlap = read_json_file(report / "overlap.json");
  EXPECT_EQ(overlap["models"], json({"second", "first"}));
  // Same scripted run twice: every fixed bug is fixed by both.
  const auto fixed = read_json_file(report / "summary.json")["fixed_bugs"].get<std::size_t>();
  EXPECT_EQ(overlap["regions"]["second&first"].get<std::size_t>(), fixed);
  EXPECT_EQ(overlap["union"].get<std::size_t>(), fixed);
}

TEST(Pipeline, StrategiesProduceDistinctCacheEntries) {
  TempDir dir;
  std::ostringstream log;
  auto config = load_config(write_synthetic_config(dir.path()));
  config.n_samples = 2;
  const auto zero = Pipeline(config, log).generate();
  config.strategy = prompt::Strategy::OneShot;
  const auto one = Pipeline(config, log).generate();
  for (std::size_t b = 0; b < zero.bugs.size(); ++b) {
    EXPECT_NE(zero.bugs[b].prompt_digest, one.bugs[b].prompt_digest);
  }
}

}  // namespace
}  // namespace nl2fix
