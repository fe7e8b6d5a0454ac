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
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nl2fix/candidate.hpp"
#include "nl2fix/corpus.hpp"

namespace nl2fix::validation {

enum class Status { Plausible, Wrong, Uncompilable };
enum class StageResult { Pass, Fail, Skipped };

std::string_view to_string(Status s);
std::string_view to_string(StageResult r);
Status parse_status(std::string_view name);
StageResult parse_stage_result(std::string_view name);

struct ValidationOutcome {
  std::string bug_id;
  std::string content_hash;
  Status status = Status::Uncompilable;
  StageResult compile = StageResult::Skipped;
  StageResult regression = StageResult::Skipped;
  StageResult trigger = StageResult::Skipped;
  double compile_s = 0.0;
  double regression_s = 0.0;
  double trigger_s = 0.0;
  std::vector<std::string> timed_out;  // stage names that hit the timeout
  std::string log;                     // captured command output
  // False for a compile-only check whose compile passed; such an entry
  // lacks test results and is finished by a later validate().
  bool complete = true;

  bool operator==(const ValidationOutcome&) const = default;
};

// Total classification over the three stage results.
Status classify(StageResult compile, StageResult regression, StageResult trigger);

class SpanOutOfRange : public Error {
 public:
  SpanOutOfRange(const corpus::MethodSpan& span, std::size_t lines)
      : Error("SpanOutOfRange", "method span " + std::to_string(span.start_line) + "-" +
                                    std::to_string(span.end_line) + " outside a " +
                                    std::to_string(lines) + "-line file") {}
};

class WorkspaceSetupFailed : public Error {
 public:
  explicit WorkspaceSetupFailed(const std::string& detail)
      : Error("WorkspaceSetupFailed", "workspace setup failed: " + detail) {}
};

// Replaces lines [start_line, end_line] of `file_source` with the lines of
// `patch_text`. Line terminators of untouched lines are kept byte for byte.
std::string apply_patch(std::string_view file_source, const corpus::MethodSpan& span,
                        std::string_view patch_text);

struct ExecRequest {
  std::string stage;  // "setup", "compile", "regression", "trigger"
  std::string command;
  std::filesystem::path workspace;
  double timeout_s = 600.0;
  // Context for scripted runners; real runners only use the fields above.
  std::string bug_id;
  std::string content_hash;
  std::string file_path;
  int min_lines = 0;
};

struct ExecResult {
  int exit_code = 0;
  bool timed_out = false;
  std::string output;
  double wall_time_s = 0.0;
};

class CommandRunner {
 public:
  virtual ~CommandRunner() = default;
  virtual ExecResult run(const ExecRequest& request) = 0;
};

// Runs `sh -c command` inside the workspace with WORKSPACE_DIR set. The
// process group is killed when the timeout expires.
class SubprocessRunner : public CommandRunner {
 public:
  explicit SubprocessRunner(std::size_t max_output_bytes = 1 << 20)
      : max_output_bytes_(max_output_bytes) {}
  ExecResult run(const ExecRequest& request) override;

 private:
  std::size_t max_output_bytes_;
};

// Test double. "setup" writes a placeholder source file long enough for
// the method span; the other stages answer from a script keyed by
// (bug_id, content_hash). Unscripted patches fail to compile.
class ScriptedRunner : public CommandRunner {
 public:
  struct Script {
    bool compile = false;
    bool regression = false;
    bool trigger = false;
  };

  void add(const std::string& bug_id, const std::string& content_hash, Script script);
  // JSON lines of {bug_id, patch | content_hash, compile, regression, trigger};
  // a patch is hashed in canonical form.
  void add_jsonl(std::string_view text);
  void add_file(const std::filesystem::path& path);

  ExecResult run(const ExecRequest& request) override;

  std::size_t provisions() const { return provisions_.load(); }
  std::size_t executions(const std::string& stage) const;

 private:
  std::map<std::pair<std::string, std::string>, Script> scripts_;
  std::map<std::string, std::size_t> executions_;
  mutable std::mutex mutex_;
  std::atomic<std::size_t> provisions_{0};
};

// cache/outcomes/{bug_id}/{content_hash}.json
class OutcomeCache {
 public:
  explicit OutcomeCache(std::filesystem::path root) : root_(std::move(root)) {}
  std::filesystem::path path_for(const std::string& bug_id, const std::string& hash) const;
  std::optional<ValidationOutcome> load(const std::string& bug_id, const std::string& hash) const;
  void store(const ValidationOutcome& outcome) const;

 private:
  std::filesystem::path root_;
};

nlohmann::json outcome_to_json(const ValidationOutcome& o);
ValidationOutcome outcome_from_json(const nlohmann::json& j);

struct ValidatorOptions {
  std::optional<std::filesystem::path> cache_root;  // no outcome cache when unset
  std::filesystem::path work_root = std::filesystem::temp_directory_path();
  double default_timeout_s = 600.0;
  bool keep_workspaces = false;
};

class Validator {
 public:
  Validator(CommandRunner& runner, ValidatorOptions options);

  // provision -> apply -> compile -> regression -> trigger, cached by
  // (bug_id, content_hash). An empty patch is Uncompilable without running
  // anything.
  ValidationOutcome validate(const corpus::BugRecord& record, const CandidatePatch& patch);

  // provision -> apply -> compile only; shares the cache with validate().
  bool compile_check(const corpus::BugRecord& record, const CandidatePatch& patch);

  // One outcome per candidate, in input order. Each distinct content hash
  // is validated once and its outcome shared by its duplicates.
  std::vector<ValidationOutcome> validate_all(const corpus::BugRecord& record,
                                              std::span<const CandidatePatch> candidates,
                                              int workers);

 private:
  ValidationOutcome run_stages(const corpus::BugRecord& record, const CandidatePatch& patch,
                               bool compile_only, const ValidationOutcome* partial);

  CommandRunner& runner_;
  ValidatorOptions options_;
  std::optional<OutcomeCache> cache_;
};

}  // namespace nl2fix::validation
