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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "nl2fix/candidate.hpp"
#include "nl2fix/common/retry.hpp"
#include "nl2fix/prompt.hpp"

namespace nl2fix::sampling {

enum class GenMode { Completion, Edit, Chat };

std::string_view to_string(GenMode mode);
GenMode parse_mode(std::string_view name);  // "completion", "edit", "chat"

struct GenParams {
  double temperature = 0.8;
  int n_samples = 100;
  int max_gen_tokens = 750;
  std::int64_t context_budget = 8192;
  GenMode mode = GenMode::Chat;
};

struct GenerationRequest {
  std::string bug_id;
  int sample_index = 0;
  int stage = 1;  // 1..3 for the reasoning dialogue, otherwise 1
  GenMode mode = GenMode::Chat;
  std::string prompt;                 // Completion
  std::string input, instruction;     // Edit
  std::vector<Message> messages;      // Chat
  double temperature = 0.0;
  int max_tokens = 0;
};

class GenerationProvider {
 public:
  virtual ~GenerationProvider() = default;
  // Stable identifier used in cache paths.
  virtual std::string id() const = 0;
  // One sample. Throws ProviderError on failure.
  virtual std::string generate(const GenerationRequest& request) = 0;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& bug_id, std::int64_t needed, std::int64_t budget)
      : Error("BudgetExceeded", "prompt for " + bug_id + " needs " +
                                    std::to_string(needed) +
                                    " tokens with generation; budget is " +
                                    std::to_string(budget)) {}
};

// Replays scripted responses keyed by (bug_id, index, stage). A script
// line may carry "fail_times": the first that many calls for the key fail
// with a transient error. Unscripted keys fail permanently.
class MockProvider : public GenerationProvider {
 public:
  struct Entry {
    std::string response;
    int fail_times = 0;
  };

  MockProvider() = default;
  // Adds every line of a JSON-lines script.
  void add_jsonl(std::string_view text);
  void add_file(const std::filesystem::path& path);

  void add(std::string bug_id, int index, int stage, Entry entry);

  std::string id() const override { return "mock"; }
  std::string generate(const GenerationRequest& request) override;

  std::size_t calls() const { return calls_.load(); }
  std::vector<GenerationRequest> requests() const;

 private:
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, Entry> script_;
  std::map<Key, int> seen_;
  std::vector<GenerationRequest> log_;
  mutable std::mutex mutex_;
  std::atomic<std::size_t> calls_{0};
};

// Chat/completions style JSON API. The API key is read from the named
// environment variable at call time and sent as a bearer token.
struct HttpProviderConfig {
  std::string base_url;
  std::string model_id;
  std::string api_key_env;
  double timeout_s = 120.0;
};

class HttpProvider : public GenerationProvider {
 public:
  explicit HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {}
  std::string id() const override;
  std::string generate(const GenerationRequest& request) override;

 private:
  HttpProviderConfig config_;
};

struct CachedSample {
  std::string raw_response;
  std::vector<Message> transcript;
  int attempts = 0;
};

// cache/samples/{provider}/{bug}/{prompt digest}/{temperature}/{index}.json
class SampleCache {
 public:
  explicit SampleCache(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path path_for(const std::string& provider_id,
                                 const std::string& bug_id,
                                 const std::string& prompt_digest,
                                 double temperature, int index) const;
  std::optional<CachedSample> load(const std::filesystem::path& path) const;
  void store(const std::filesystem::path& path, const CachedSample& sample) const;

 private:
  std::filesystem::path root_;
};

// Digest of everything that shapes a request besides temperature and
// sample index.
std::string prompt_digest(const prompt::PromptSpec& prompt, const GenParams& params);

struct SampleOptions {
  GenParams params;
  std::optional<std::filesystem::path> cache_root;  // no caching when unset
  int concurrency = 4;
  RetryPolicy retry;
};

// Text of the first fenced block; otherwise, in Chat mode, everything from
// the first line that looks like a method declaration; otherwise the
// trimmed response.
std::string extract_patch(std::string_view raw, GenMode mode);

// n_samples independent candidates in index order. Reasoning prompts are
// routed to run_reasoning_dialogue. Successful samples are cached even
// when another index fails; the first failure by index is then rethrown.
std::vector<CandidatePatch> sample(GenerationProvider& provider,
                                   const prompt::PromptSpec& prompt,
                                   const SampleOptions& options);

// Three-stage dialogue per sample: each stage sees the previous user turns
// and replies of the same sample only. The patch comes from the stage-3
// reply.
std::vector<CandidatePatch> run_reasoning_dialogue(GenerationProvider& provider,
                                                   const prompt::PromptSpec& stages,
                                                   const SampleOptions& options);

struct DedupStats {
  std::size_t total = 0;
  std::size_t unique_count = 0;
  double duplicate_fraction = 0.0;
  std::map<std::string, std::vector<int>> groups;  // hash -> sample indices
};

DedupStats dedup_stats(std::span<const CandidatePatch> candidates);

}  // namespace nl2fix::sampling
