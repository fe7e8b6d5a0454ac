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

#include "nl2fix/validation.hpp"

#include <nlohmann/json.hpp>

#include <unordered_map>

#include "nl2fix/common/fs.hpp"
#include "nl2fix/common/parallel.hpp"

namespace nl2fix::validation {

using nlohmann::json;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Plausible: return "Plausible";
    case Status::Wrong: return "Wrong";
    case Status::Uncompilable: return "Uncompilable";
  }
  return "unknown";
}

std::string_view to_string(StageResult r) {
  switch (r) {
    case StageResult::Pass: return "pass";
    case StageResult::Fail: return "fail";
    case StageResult::Skipped: return "skipped";
  }
  return "unknown";
}

Status parse_status(std::string_view name) {
  if (name == "Plausible") return Status::Plausible;
  if (name == "Wrong") return Status::Wrong;
  if (name == "Uncompilable") return Status::Uncompilable;
  throw DomainError("unknown validation status: " + std::string(name));
}

StageResult parse_stage_result(std::string_view name) {
  if (name == "pass") return StageResult::Pass;
  if (name == "fail") return StageResult::Fail;
  if (name == "skipped") return StageResult::Skipped;
  throw DomainError("unknown stage result: " + std::string(name));
}

Status classify(StageResult compile, StageResult regression, StageResult trigger) {
  if (compile != StageResult::Pass) return Status::Uncompilable;
  if (regression == StageResult::Pass && trigger == StageResult::Pass) return Status::Plausible;
  return Status::Wrong;
}

std::string apply_patch(std::string_view file_source, const corpus::MethodSpan& span,
                        std::string_view patch_text) {
  // Line start offsets; a final unterminated line counts as a line.
  std::vector<std::size_t> starts;
  for (std::size_t pos = 0; pos < file_source.size();) {
    starts.push_back(pos);
    const auto nl = file_source.find('\n', pos);
    pos = nl == std::string_view::npos ? file_source.size() : nl + 1;
  }
  const std::size_t lines = starts.size();
  if (span.start_line < 1 || span.end_line < span.start_line ||
      static_cast<std::size_t>(span.end_line) > lines) {
    throw SpanOutOfRange(span, lines);
  }
  const std::size_t begin = starts[span.start_line - 1];
  const std::size_t end = static_cast<std::size_t>(span.end_line) < lines
                              ? starts[span.end_line]
                              : file_source.size();
  // The replaced block's own terminator ("\r\n", "\n" or none at EOF).
  const std::string_view block = file_source.substr(begin, end - begin);
  std::string_view terminator;
  if (block.ends_with("\r\n")) {
    terminator = "\r\n";
  } else if (block.ends_with("\n")) {
    terminator = "\n";
  }
  std::string_view body = patch_text;
  if (body.ends_with("\r\n")) {
    body.remove_suffix(2);
  } else if (body.ends_with("\n")) {
    body.remove_suffix(1);
  }

  std::string out;
  out.reserve(file_source.size() + patch_text.size());
  out.append(file_source.substr(0, begin));
  out.append(body);
  out.append(terminator);
  out.append(file_source.substr(end));
  return out;
}

// ---- cache ----

json outcome_to_json(const ValidationOutcome& o) {
  return {{"bug_id", o.bug_id},
          {"content_hash", o.content_hash},
          {"status", to_string(o.status)},
          {"stage_results",
           {{"compile", to_string(o.compile)},
            {"regression", to_string(o.regression)},
            {"trigger", to_string(o.trigger)}}},
          {"wall_time_s",
           {{"compile", o.compile_s}, {"regression", o.regression_s}, {"trigger", o.trigger_s}}},
          {"timed_out", o.timed_out},
          {"log", o.log},
          {"complete", o.complete}};
}

ValidationOutcome outcome_from_json(const json& j) {
  ValidationOutcome o;
  o.bug_id = j.at("bug_id");
  o.content_hash = j.at("content_hash");
  o.status = parse_status(j.at("status").get<std::string>());
  const auto& st = j.at("stage_results");
  o.compile = parse_stage_result(st.at("compile").get<std::string>());
  o.regression = parse_stage_result(st.at("regression").get<std::string>());
  o.trigger = parse_stage_result(st.at("trigger").get<std::string>());
  if (j.contains("wall_time_s")) {
    const auto& w = j["wall_time_s"];
    o.compile_s = w.value("compile", 0.0);
    o.regression_s = w.value("regression", 0.0);
    o.trigger_s = w.value("trigger", 0.0);
  }
  o.timed_out = j.value("timed_out", std::vector<std::string>{});
  o.log = j.value("log", "");
  o.complete = j.value("complete", true);
  return o;
}

std::filesystem::path OutcomeCache::path_for(const std::string& bug_id,
                                             const std::string& hash) const {
  return root_ / "outcomes" / sanitize_path_component(bug_id) / (hash + ".json");
}

std::optional<ValidationOutcome> OutcomeCache::load(const std::string& bug_id,
                                                    const std::string& hash) const {
  const auto text = try_read_file(path_for(bug_id, hash));
  if (!text) return std::nullopt;
  try {
    return outcome_from_json(json::parse(*text));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void OutcomeCache::store(const ValidationOutcome& o) const {
  atomic_write_file(path_for(o.bug_id, o.content_hash), outcome_to_json(o).dump(2) + "\n");
}

// ---- validator ----

Validator::Validator(CommandRunner& runner, ValidatorOptions options)
    : runner_(runner), options_(std::move(options)) {
  if (options_.cache_root) cache_.emplace(*options_.cache_root);
}

namespace {

ValidationOutcome empty_patch_outcome(const corpus::BugRecord& record,
                                      const CandidatePatch& patch) {
  ValidationOutcome o;
  o.bug_id = record.bug_id;
  o.content_hash = patch.content_hash;
  o.compile = StageResult::Fail;
  o.status = Status::Uncompilable;
  o.log = "empty patch, nothing to compile\n";
  return o;
}

std::string tail(const std::string& s, std::size_t n = 2000) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

class WorkspaceGuard {
 public:
  WorkspaceGuard(std::filesystem::path dir, bool keep) : dir_(std::move(dir)), keep_(keep) {}
  ~WorkspaceGuard() {
    if (keep_) return;
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  WorkspaceGuard(const WorkspaceGuard&) = delete;
  WorkspaceGuard& operator=(const WorkspaceGuard&) = delete;

 private:
  std::filesystem::path dir_;
  bool keep_;
};

}  // namespace

ValidationOutcome Validator::run_stages(const corpus::BugRecord& record,
                                        const CandidatePatch& patch, bool compile_only,
                                        const ValidationOutcome* partial) {
  std::filesystem::create_directories(options_.work_root);
  const auto workspace =
      make_unique_dir(options_.work_root, "nl2fix-" + sanitize_path_component(record.bug_id) + "-");
  WorkspaceGuard guard(workspace, options_.keep_workspaces);

  ExecRequest base;
  base.workspace = workspace;
  base.timeout_s = record.stage_timeout_s.value_or(options_.default_timeout_s);
  base.bug_id = record.bug_id;
  base.content_hash = patch.content_hash;
  base.file_path = record.file_path;
  base.min_lines = record.method_span.end_line;

  ValidationOutcome o;
  o.bug_id = record.bug_id;
  o.content_hash = patch.content_hash;

  auto setup = base;
  setup.stage = "setup";
  setup.command = record.workspace_setup_cmd;
  const auto provisioned = runner_.run(setup);
  if (provisioned.timed_out || provisioned.exit_code != 0) {
    throw WorkspaceSetupFailed(record.bug_id + (provisioned.timed_out ? " (timed out)" : "") +
                               ": " + tail(provisioned.output));
  }
  const auto source_path = workspace / record.file_path;
  const auto source = try_read_file(source_path);
  if (!source) {
    throw WorkspaceSetupFailed(record.bug_id + ": " + record.file_path + " missing after setup");
  }
  atomic_write_file(source_path, apply_patch(*source, record.method_span, patch.patch_text));

  auto stage = [&](const char* name, const std::string& command, double& seconds) {
    auto req = base;
    req.stage = name;
    req.command = command;
    const auto r = runner_.run(req);
    seconds = r.wall_time_s;
    o.log += std::string("== ") + name + " (exit " + std::to_string(r.exit_code) + ") ==\n";
    o.log += tail(r.output);
    if (r.timed_out) o.timed_out.emplace_back(name);
    return !r.timed_out && r.exit_code == 0 ? StageResult::Pass : StageResult::Fail;
  };

  if (partial && partial->compile == StageResult::Pass) {
    o.compile = StageResult::Pass;
    o.compile_s = partial->compile_s;
    o.log = partial->log;
  } else {
    o.compile = stage("compile", record.compile_cmd, o.compile_s);
  }
  if (o.compile == StageResult::Pass && !compile_only) {
    o.regression = stage("regression", record.regression_cmd, o.regression_s);
    if (o.regression == StageResult::Pass) {
      o.trigger = stage("trigger", record.trigger_cmd, o.trigger_s);
    }
  }
  o.status = classify(o.compile, o.regression, o.trigger);
  o.complete = !(compile_only && o.compile == StageResult::Pass);
  return o;
}

ValidationOutcome Validator::validate(const corpus::BugRecord& record,
                                      const CandidatePatch& patch) {
  std::optional<ValidationOutcome> cached;
  if (cache_) cached = cache_->load(record.bug_id, patch.content_hash);
  if (cached && cached->complete) return *cached;
  auto o = patch.empty ? empty_patch_outcome(record, patch)
                       : run_stages(record, patch, false, cached ? &*cached : nullptr);
  if (cache_) cache_->store(o);
  return o;
}

bool Validator::compile_check(const corpus::BugRecord& record, const CandidatePatch& patch) {
  if (cache_) {
    if (auto cached = cache_->load(record.bug_id, patch.content_hash)) {
      return cached->compile == StageResult::Pass;
    }
  }
  auto o = patch.empty ? empty_patch_outcome(record, patch)
                       : run_stages(record, patch, true, nullptr);
  if (cache_) cache_->store(o);
  return o.compile == StageResult::Pass;
}

std::vector<ValidationOutcome> Validator::validate_all(const corpus::BugRecord& record,
                                                       std::span<const CandidatePatch> candidates,
                                                       int workers) {
  std::vector<std::size_t> representatives;
  std::unordered_map<std::string, std::size_t> slot_of;
  std::vector<std::size_t> slot(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto [it, inserted] = slot_of.emplace(candidates[i].content_hash, representatives.size());
    if (inserted) representatives.push_back(i);
    slot[i] = it->second;
  }
  std::vector<ValidationOutcome> unique(representatives.size());
  parallel_for(representatives.size(), static_cast<std::size_t>(std::max(1, workers)),
               [&](std::size_t u) { unique[u] = validate(record, candidates[representatives[u]]); });
  std::vector<ValidationOutcome> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) out.push_back(unique[slot[i]]);
  return out;
}

}  // namespace nl2fix::validation
