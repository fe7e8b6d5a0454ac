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

#include "nl2fix/config.hpp"

#include <charconv>

#include "nl2fix/common/fs.hpp"

namespace nl2fix {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

ProviderConfig parse_provider(const json& j, const std::filesystem::path& base,
                              std::string default_kind) {
  ProviderConfig p;
  p.kind = j.value("kind", default_kind);
  p.base_url = j.value("base_url", "");
  p.model_id = j.value("model_id", "");
  p.api_key_env = j.value("api_key_env", "");
  if (j.contains("api_key")) {
    throw ConfigError("API keys are not accepted in the config file; use api_key_env");
  }
  p.script = resolve(base, j.value("script", ""));
  if (j.contains("mode")) p.mode = sampling::parse_mode(j["mode"].get<std::string>());
  p.context_budget = j.value("context_budget", p.context_budget);
  p.dimension = j.value("dimension", p.dimension);
  p.timeout_s = j.value("timeout_s", p.timeout_s);
  return p;
}

}  // namespace

std::optional<double> parse_threshold(std::string_view text) {
  if (text == "median") return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("threshold must be a number or \"median\": " + std::string(text));
  }
  return v;
}

std::vector<ranking::Variant> parse_variants(std::string_view text) {
  if (text == "both") return {ranking::Variant::All, ranking::Variant::CompilePruned};
  return {ranking::parse_variant(text)};
}

RunConfig parse_config(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    c.corpus_path = resolve(base, j.at("corpus_path").get<std::string>());
    c.cache_dir = resolve(base, j.value("cache_dir", "cache"));
    c.report_dir = resolve(base, j.value("report_dir", "report"));
    c.run_label = j.value("run_label", "");
    c.generation = parse_provider(j.value("generation", json::object()), base, "mock");
    c.embedding = parse_provider(j.value("embedding", json::object()), base, "local");
    if (j.contains("strategy")) c.strategy = prompt::parse_strategy(j["strategy"].get<std::string>());

    const auto gen = j.value("gen", json::object());
    c.temperature = gen.value("temperature", c.temperature);
    c.n_samples = gen.value("n_samples", c.n_samples);
    c.max_gen_tokens = gen.value("max_gen_tokens", c.max_gen_tokens);
    c.concurrency = gen.value("concurrency", c.concurrency);

    const auto val = j.value("validation", json::object());
    c.runner = val.value("runner", c.runner);
    c.stub_outcomes = resolve(base, val.value("stub_outcomes", ""));
    c.workers = val.value("workers", c.workers);
    c.stage_timeout_s = val.value("stage_timeout_s", c.stage_timeout_s);
    c.work_dir = resolve(base, val.value("work_dir", ""));
    c.keep_workspaces = val.value("keep_workspaces", c.keep_workspaces);

    const auto rank = j.value("ranking", json::object());
    if (rank.contains("threshold")) {
      const auto& t = rank["threshold"];
      c.threshold = t.is_string() ? parse_threshold(t.get<std::string>())
                                  : std::optional<double>(t.get<double>());
    }
    if (rank.contains("variant")) c.variants = parse_variants(rank["variant"].get<std::string>());

    if (j.contains("bug_filter") && !j["bug_filter"].is_null()) {
      c.bug_filter = j["bug_filter"].get<std::vector<std::string>>();
    }
    c.seed = j.value("seed", 0);
    const auto overlap = j.value("overlap_runs", json::object());
    for (const auto& [label, dir] : overlap.items()) {
      c.overlap_runs[label] = resolve(base, dir.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const auto text = try_read_file(path);
  if (!text) throw ConfigError("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(*text);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, std::filesystem::absolute(path).parent_path());
}

void check_config(const RunConfig& c) {
  auto must_exist = [](const std::filesystem::path& p, const char* what) {
    if (p.empty() || !std::filesystem::exists(p)) {
      throw ConfigError(std::string(what) + " not found: " + p.string());
    }
  };
  must_exist(c.corpus_path, "corpus_path");
  if (c.n_samples < 1) throw ConfigError("n_samples must be at least 1");
  if (!(c.temperature >= 0.0 && c.temperature <= 2.0)) {
    throw ConfigError("temperature must lie in [0, 2]");
  }
  if (c.max_gen_tokens < 1) throw ConfigError("max_gen_tokens must be positive");
  if (c.generation.context_budget <= c.max_gen_tokens) {
    throw ConfigError("context_budget must exceed max_gen_tokens");
  }
  if (c.concurrency < 1) throw ConfigError("concurrency must be positive");
  if (c.workers < 0) throw ConfigError("workers must not be negative");
  if (!(c.stage_timeout_s > 0)) throw ConfigError("stage_timeout_s must be positive");
  if (c.generation.kind == "mock") {
    must_exist(c.generation.script, "generation.script");
  } else if (c.generation.kind == "http") {
    if (c.generation.base_url.empty() || c.generation.model_id.empty()) {
      throw ConfigError("http generation provider needs base_url and model_id");
    }
  } else {
    throw ConfigError("unknown generation provider kind: " + c.generation.kind);
  }
  if (c.embedding.kind == "http") {
    if (c.embedding.base_url.empty() || c.embedding.model_id.empty()) {
      throw ConfigError("http embedding provider needs base_url and model_id");
    }
  } else if (c.embedding.kind != "local") {
    throw ConfigError("unknown embedding provider kind: " + c.embedding.kind);
  }
  if (c.runner == "stub") {
    must_exist(c.stub_outcomes, "validation.stub_outcomes");
  } else if (c.runner != "subprocess") {
    throw ConfigError("unknown validation runner: " + c.runner);
  }
  if (c.overlap_runs.size() > 2) throw ConfigError("overlap supports at most 3 runs in total");
}

}  // namespace nl2fix
