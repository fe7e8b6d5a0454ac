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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nl2fix/prompt.hpp"
#include "nl2fix/ranking.hpp"
#include "nl2fix/sampling.hpp"

namespace nl2fix {

struct ProviderConfig {
  std::string kind;  // generation: "mock" | "http"; embedding: "local" | "http"
  std::string base_url;
  std::string model_id;
  std::string api_key_env;  // name of the variable holding the key
  std::filesystem::path script;  // mock responses (generation, kind "mock")
  sampling::GenMode mode = sampling::GenMode::Chat;
  std::int64_t context_budget = 8192;
  std::size_t dimension = 512;  // local embedder
  double timeout_s = 120.0;
};

struct RunConfig {
  std::filesystem::path corpus_path;
  std::filesystem::path cache_dir;
  std::filesystem::path report_dir;
  std::string run_label;  // defaults to the generation provider id

  ProviderConfig generation;
  ProviderConfig embedding;

  prompt::Strategy strategy = prompt::Strategy::ZeroShot;
  double temperature = 0.8;
  int n_samples = 100;
  int max_gen_tokens = 750;
  int concurrency = 4;

  std::string runner = "subprocess";  // or "stub"
  std::filesystem::path stub_outcomes;
  int workers = 0;  // 0: logical CPUs
  double stage_timeout_s = 600.0;
  std::filesystem::path work_dir;  // empty: system temp directory
  bool keep_workspaces = false;

  std::optional<double> threshold = 0.95;  // nullopt: median of the run
  std::vector<ranking::Variant> variants{ranking::Variant::All,
                                         ranking::Variant::CompilePruned};

  std::optional<std::vector<std::string>> bug_filter;
  int seed = 0;

  // Other runs' report directories, by label, for the overlap report.
  std::map<std::string, std::filesystem::path> overlap_runs;
};

// Parses a config document. Relative paths are resolved against base_dir.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Checks value ranges and that referenced input files exist.
void check_config(const RunConfig& config);

// "0.95" or "median".
std::optional<double> parse_threshold(std::string_view text);
// "all", "compile-pruned" or "both".
std::vector<ranking::Variant> parse_variants(std::string_view text);

}  // namespace nl2fix
