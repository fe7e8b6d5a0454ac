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

#include "nl2fix/cli.hpp"

#include <CLI11.hpp>

#include "nl2fix/common/retry.hpp"
#include "nl2fix/config.hpp"
#include "nl2fix/pipeline.hpp"
#include "nl2fix/prompt.hpp"

namespace nl2fix {

namespace {

struct Overrides {
  std::string config;
  std::string bugs;
  std::string strategy;
  std::optional<double> temperature;
  std::optional<int> samples;
  std::optional<int> jobs;
  std::string threshold;
  std::string variant;
};

void add_common_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config, "Run configuration (JSON)")->required();
  cmd.add_option("--bugs", o.bugs, "Comma-separated bug ids to process");
  cmd.add_option("--strategy", o.strategy, "zero-shot | title-only | one-shot | reasoning");
  cmd.add_option("--temperature", o.temperature, "Sampling temperature");
  cmd.add_option("--samples", o.samples, "Samples per bug");
  cmd.add_option("--jobs", o.jobs, "Validation workers");
  cmd.add_option("--threshold", o.threshold, "Ranking threshold: a number or \"median\"");
  cmd.add_option("--variant", o.variant, "all | compile-pruned | both");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    auto item = text.substr(start, end - start);
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    start = end + 1;
  }
  return out;
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig c = load_config(o.config);
  try {
    if (!o.bugs.empty()) c.bug_filter = split_list(o.bugs);
    if (!o.strategy.empty()) c.strategy = prompt::parse_strategy(o.strategy);
    if (o.temperature) c.temperature = *o.temperature;
    if (o.samples) c.n_samples = *o.samples;
    if (o.jobs) c.workers = *o.jobs;
    if (!o.threshold.empty()) c.threshold = parse_threshold(o.threshold);
    if (!o.variant.empty()) c.variants = parse_variants(o.variant);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  check_config(c);
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Generate, validate and rank candidate bug fixes from issue reports", "nl2fix");
  app.require_subcommand(1);
  Overrides o;
  const std::pair<const char*, const char*> commands[] = {
      {"generate", "Sample candidate patches for every selected bug"},
      {"validate", "Compile and test every candidate patch"},
      {"report", "Write pass@k, summary, per-project and similarity reports"},
      {"rank", "Prune and rank candidates by embedding similarity"},
      {"run", "generate, validate, report and rank in one go"}};
  for (const auto& [name, help] : commands) add_common_flags(*app.add_subcommand(name, help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    Pipeline pipeline(resolve_config(o), out);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "generate") {
      pipeline.generate();
    } else if (name == "validate") {
      pipeline.validate();
    } else if (name == "report") {
      pipeline.report();
    } else if (name == "rank") {
      pipeline.rank();
    } else {
      pipeline.run();
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnknownBugId& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ProviderExhausted& e) {
    err << "provider error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const validation::WorkspaceSetupFailed& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const validation::SpanOutOfRange& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error [" << e.code() << "]: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace nl2fix
