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

#include "nl2fix/sampling.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <exception>
#include <regex>
#include <set>

#include "nl2fix/common/fs.hpp"
#include "nl2fix/common/hash.hpp"
#include "nl2fix/common/parallel.hpp"
#include "nl2fix/metrics.hpp"

namespace nl2fix::sampling {

using nlohmann::json;

std::string_view to_string(GenMode mode) {
  switch (mode) {
    case GenMode::Completion: return "completion";
    case GenMode::Edit: return "edit";
    case GenMode::Chat: return "chat";
  }
  return "unknown";
}

GenMode parse_mode(std::string_view name) {
  if (name == "completion") return GenMode::Completion;
  if (name == "edit") return GenMode::Edit;
  if (name == "chat") return GenMode::Chat;
  throw ConfigError("unknown generation mode: " + std::string(name));
}

// ---- mock provider ----

void MockProvider::add_jsonl(std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = json::parse(line);
      add(j.at("bug_id").get<std::string>(), j.at("index").get<int>(),
               j.value("stage", 1),
               Entry{j.at("response").get<std::string>(), j.value("fail_times", 0)});
    } catch (const json::exception& e) {
      throw ConfigError("mock script line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void MockProvider::add_file(const std::filesystem::path& path) {
  add_jsonl(read_file(path));
}

void MockProvider::add(std::string bug_id, int index, int stage, Entry entry) {
  script_[Key{std::move(bug_id), index, stage}] = std::move(entry);
}

std::string MockProvider::generate(const GenerationRequest& request) {
  ++calls_;
  std::lock_guard lock(mutex_);
  log_.push_back(request);
  const Key key{request.bug_id, request.sample_index, request.stage};
  const auto it = script_.find(key);
  if (it == script_.end()) {
    throw ProviderError("no scripted response for " + request.bug_id + " index " +
                            std::to_string(request.sample_index) + " stage " +
                            std::to_string(request.stage),
                        false);
  }
  if (seen_[key]++ < it->second.fail_times) {
    throw ProviderError("scripted transient failure");
  }
  return it->second.response;
}

std::vector<GenerationRequest> MockProvider::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

// ---- cache ----

namespace {

std::string temperature_dir(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", t);
  return buf;
}

json messages_to_json(const std::vector<Message>& messages) {
  json out = json::array();
  for (const auto& m : messages) out.push_back({{"role", m.role}, {"content", m.content}});
  return out;
}

std::vector<Message> messages_from_json(const json& j) {
  std::vector<Message> out;
  for (const auto& m : j) out.push_back({m.at("role"), m.at("content")});
  return out;
}

}  // namespace

std::filesystem::path SampleCache::path_for(const std::string& provider_id,
                                            const std::string& bug_id,
                                            const std::string& digest,
                                            double temperature, int index) const {
  return root_ / "samples" / sanitize_path_component(provider_id) /
         sanitize_path_component(bug_id) / digest / temperature_dir(temperature) /
         (std::to_string(index) + ".json");
}

std::optional<CachedSample> SampleCache::load(const std::filesystem::path& path) const {
  const auto text = try_read_file(path);
  if (!text) return std::nullopt;
  try {
    const auto j = json::parse(*text);
    CachedSample s;
    s.raw_response = j.at("raw_response").get<std::string>();
    if (j.contains("transcript")) s.transcript = messages_from_json(j["transcript"]);
    s.attempts = j.value("attempts", 0);
    return s;
  } catch (const json::exception&) {
    // A damaged entry is treated as a miss and overwritten.
    return std::nullopt;
  }
}

void SampleCache::store(const std::filesystem::path& path, const CachedSample& s) const {
  json j{{"raw_response", s.raw_response}, {"attempts", s.attempts}};
  if (!s.transcript.empty()) j["transcript"] = messages_to_json(s.transcript);
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  j["timestamps"] = {{"stored_unix_ms",
                      std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
  atomic_write_file(path, j.dump(2) + "\n");
}

std::string prompt_digest(const prompt::PromptSpec& p, const GenParams& params) {
  json turns = json::array();
  for (const auto& t : p.turns) turns.push_back({prompt::to_string(t.role), t.text});
  json key{{"strategy", prompt::to_string(p.strategy)},
           {"turns", turns},
           {"mode", to_string(params.mode)},
           {"max_gen_tokens", params.max_gen_tokens}};
  if (params.mode == GenMode::Completion && p.completion_suffix) {
    key["completion_suffix"] = *p.completion_suffix;
  }
  if (params.mode == GenMode::Edit) key["input"] = p.parts.buggy_function;
  return sha256_hex(key.dump());
}

// ---- extraction ----

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(b, e - b + 1));
}

std::string rtrim(std::string_view s) {
  const auto e = s.find_last_not_of(" \t\r\n\f\v");
  return e == std::string_view::npos ? std::string() : std::string(s.substr(0, e + 1));
}

bool looks_like_method_declaration(const std::string& line) {
  static const std::regex re(
      R"(^\s*(?:@\w+(?:\([^)]*\))?\s+)*)"
      R"((?:(?:public|protected|private|static|final|synchronized|abstract|native|strictfp|default)\s+)*)"
      R"((?:<[^>]+>\s+)?([\w.$]+(?:\s*<.*>)?(?:\s*\[\])*)\s+(\w+)\s*\()");
  std::smatch m;
  if (!std::regex_search(line, m, re)) return false;
  static const std::set<std::string> not_types{"return", "new", "throw", "else", "case",
                                               "yield", "assert"};
  return !not_types.contains(m[1].str());
}

}  // namespace

std::string extract_patch(std::string_view raw, GenMode mode) {
  const auto open = raw.find("```");
  if (open != std::string_view::npos) {
    // Skip the info string ("java") on the opening fence line.
    auto body = raw.find('\n', open);
    body = body == std::string_view::npos ? raw.size() : body + 1;
    auto close = raw.find("```", body);
    if (close == std::string_view::npos) close = raw.size();
    std::string code = rtrim(raw.substr(body, close - body));
    const auto first = code.find_first_not_of("\r\n");
    return first == std::string::npos ? std::string() : code.substr(first);
  }
  if (mode == GenMode::Chat) {
    std::size_t pos = 0;
    while (pos < raw.size()) {
      auto end = raw.find('\n', pos);
      if (end == std::string_view::npos) end = raw.size();
      if (looks_like_method_declaration(std::string(raw.substr(pos, end - pos)))) {
        return rtrim(raw.substr(pos));
      }
      pos = end + 1;
    }
  }
  return trim(raw);
}

// ---- sampling ----

namespace {

void check_budget(const prompt::PromptSpec& p, const GenParams& params) {
  if (params.n_samples < 1) throw DomainError("n_samples must be positive");
  const std::int64_t needed = prompt::estimate_tokens(p) + params.max_gen_tokens;
  if (needed > params.context_budget) {
    throw BudgetExceeded(p.bug_id, needed, params.context_budget);
  }
}

GenerationRequest base_request(const prompt::PromptSpec& p, const GenParams& params,
                               int index, int stage) {
  GenerationRequest r;
  r.bug_id = p.bug_id;
  r.sample_index = index;
  r.stage = stage;
  r.mode = params.mode;
  r.temperature = params.temperature;
  r.max_tokens = params.max_gen_tokens;
  return r;
}

// Runs one(i) for every index, keeping going past failures, then rethrows
// the failure with the smallest index.
template <typename One>
void for_each_sample(int n, int concurrency, One&& one) {
  std::vector<std::exception_ptr> errors(n);
  parallel_for(static_cast<std::size_t>(n), static_cast<std::size_t>(std::max(1, concurrency)),
               [&](std::size_t i) {
                 try {
                   one(static_cast<int>(i));
                 } catch (...) {
                   errors[i] = std::current_exception();
                 }
               });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

CandidatePatch single_turn_candidate(const prompt::PromptSpec& p, GenMode mode, int index,
                                     std::string raw, int attempts) {
  std::string patch = extract_patch(raw, mode);
  if (mode == GenMode::Completion && p.completion_suffix) {
    const auto& sig = *p.completion_suffix;
    // Completion models continue after the signature; put it back unless
    // the model repeated it.
    if (metrics::canonical_form(patch).rfind(metrics::canonical_form(sig), 0) != 0) {
      patch = sig + "\n" + patch;
    }
  }
  auto c = make_candidate(p.bug_id, index, std::move(raw), std::move(patch));
  c.attempts = attempts;
  return c;
}

}  // namespace

std::vector<CandidatePatch> sample(GenerationProvider& provider,
                                   const prompt::PromptSpec& p,
                                   const SampleOptions& options) {
  if (p.strategy == prompt::Strategy::ReasoningExtraction) {
    return run_reasoning_dialogue(provider, p, options);
  }
  const auto& params = options.params;
  check_budget(p, params);
  if (p.turns.size() != 1) throw DomainError("single-turn prompt expected");

  const std::string digest = prompt_digest(p, params);
  const std::optional<SampleCache> cache =
      options.cache_root ? std::optional<SampleCache>(*options.cache_root) : std::nullopt;

  GenerationRequest request = base_request(p, params, 0, 1);
  switch (params.mode) {
    case GenMode::Chat:
      request.messages = {{"user", p.turns[0].text}};
      break;
    case GenMode::Completion:
      request.prompt = p.turns[0].text + p.completion_suffix.value_or("");
      break;
    case GenMode::Edit: {
      auto parts = p.parts;
      parts.buggy_function.clear();
      request.input = p.parts.buggy_function;
      request.instruction = prompt::render_turns(p.strategy, parts).at(0).text;
      break;
    }
  }

  std::vector<CandidatePatch> out(params.n_samples);
  for_each_sample(params.n_samples, options.concurrency, [&](int i) {
    std::filesystem::path path;
    if (cache) {
      path = cache->path_for(provider.id(), p.bug_id, digest, params.temperature, i);
      if (auto hit = cache->load(path)) {
        out[i] = single_turn_candidate(p, params.mode, i, std::move(hit->raw_response), 0);
        return;
      }
    }
    GenerationRequest r = request;
    r.sample_index = i;
    int attempts = 0;
    std::string raw = with_retry(options.retry, [&] { return provider.generate(r); }, &attempts);
    if (cache) cache->store(path, {raw, {}, attempts});
    out[i] = single_turn_candidate(p, params.mode, i, std::move(raw), attempts);
  });
  return out;
}

std::vector<CandidatePatch> run_reasoning_dialogue(GenerationProvider& provider,
                                                   const prompt::PromptSpec& stages,
                                                   const SampleOptions& options) {
  if (stages.turns.size() != 3) throw DomainError("reasoning dialogue needs 3 turns");
  auto params = options.params;
  // The dialogue is inherently conversational.
  params.mode = GenMode::Chat;
  check_budget(stages, params);

  const std::string digest = prompt_digest(stages, params);
  const std::optional<SampleCache> cache =
      options.cache_root ? std::optional<SampleCache>(*options.cache_root) : std::nullopt;

  std::vector<CandidatePatch> out(params.n_samples);
  auto finish = [&](int i, std::string raw, std::vector<Message> transcript, int attempts) {
    auto c = make_candidate(stages.bug_id, i, raw, extract_patch(raw, GenMode::Chat));
    c.transcript = std::move(transcript);
    c.attempts = attempts;
    out[i] = std::move(c);
  };

  for_each_sample(params.n_samples, options.concurrency, [&](int i) {
    std::filesystem::path path;
    if (cache) {
      path = cache->path_for(provider.id(), stages.bug_id, digest, params.temperature, i);
      if (auto hit = cache->load(path); hit && hit->transcript.size() == 6) {
        finish(i, std::move(hit->raw_response), std::move(hit->transcript), 0);
        return;
      }
    }
    std::vector<Message> transcript;
    int total_attempts = 0;
    std::string reply;
    for (int stage = 1; stage <= 3; ++stage) {
      transcript.push_back({"user", stages.turns[stage - 1].text});
      GenerationRequest r = base_request(stages, params, i, stage);
      r.messages = transcript;
      int attempts = 0;
      reply = with_retry(options.retry, [&] { return provider.generate(r); }, &attempts);
      total_attempts += attempts;
      transcript.push_back({"assistant", reply});
    }
    if (cache) cache->store(path, {reply, transcript, total_attempts});
    finish(i, std::move(reply), std::move(transcript), total_attempts);
  });
  return out;
}

DedupStats dedup_stats(std::span<const CandidatePatch> candidates) {
  DedupStats s;
  s.total = candidates.size();
  for (const auto& c : candidates) s.groups[c.content_hash].push_back(c.sample_index);
  s.unique_count = s.groups.size();
  s.duplicate_fraction =
      s.total == 0 ? 0.0
                   : 1.0 - static_cast<double>(s.unique_count) / static_cast<double>(s.total);
  return s;
}

}  // namespace nl2fix::sampling
