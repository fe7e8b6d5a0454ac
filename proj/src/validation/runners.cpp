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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "nl2fix/common/fs.hpp"
#include "nl2fix/common/hash.hpp"
#include "nl2fix/metrics.hpp"
#include "nl2fix/validation.hpp"

extern char** environ;

namespace nl2fix::validation {

using nlohmann::json;

ExecResult SubprocessRunner::run(const ExecRequest& request) {
  ExecResult result;
  const auto started = std::chrono::steady_clock::now();

  // Everything the child needs is prepared before fork().
  std::vector<std::string> env_storage;
  for (char** e = environ; *e; ++e) {
    if (std::strncmp(*e, "WORKSPACE_DIR=", 14) != 0) env_storage.emplace_back(*e);
  }
  env_storage.push_back("WORKSPACE_DIR=" + request.workspace.string());
  std::vector<char*> envp;
  for (auto& s : env_storage) envp.push_back(s.data());
  envp.push_back(nullptr);
  const std::string cwd = request.workspace.string();
  std::string command = request.command;
  char sh[] = "/bin/sh";
  char dash_c[] = "-c";
  char* argv[] = {sh, dash_c, command.data(), nullptr};

  int fds[2];
  if (::pipe(fds) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw IoError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    if (::chdir(cwd.c_str()) != 0) ::_exit(126);
    ::execve(sh, argv, envp.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(fds[1]);

  const auto deadline =
      started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(request.timeout_s));
  char buf[4096];
  bool open = true;
  while (open) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      break;
    }
    const auto wait_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd p{fds[0], POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(std::min<long long>(wait_ms + 1, 200)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const auto n = ::read(fds[0], buf, sizeof buf);
    if (n <= 0) {
      open = false;
    } else if (result.output.size() < max_output_bytes_) {
      result.output.append(buf, static_cast<std::size_t>(n));
    }
  }
  ::close(fds[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  // Grandchildren may still hold resources after the shell exits.
  ::kill(-pid, SIGKILL);
  if (result.timed_out) {
    result.exit_code = -1;
  } else if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else {
    result.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

void ScriptedRunner::add(const std::string& bug_id, const std::string& content_hash,
                         Script script) {
  std::lock_guard lock(mutex_);
  scripts_[{bug_id, content_hash}] = script;
}

void ScriptedRunner::add_jsonl(std::string_view text) {
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
      const std::string hash = j.contains("patch")
                                   ? sha256_hex(metrics::canonical_form(j["patch"].get<std::string>()))
                                   : j.at("content_hash").get<std::string>();
      Script s;
      if (j.contains("status")) {
        const auto status = parse_status(j["status"].get<std::string>());
        s.compile = status != Status::Uncompilable;
        s.regression = s.compile;
        s.trigger = status == Status::Plausible;
      } else {
        s.compile = j.value("compile", false);
        s.regression = j.value("regression", false);
        s.trigger = j.value("trigger", false);
      }
      add(j.at("bug_id").get<std::string>(), hash, s);
    } catch (const std::exception& e) {
      throw ConfigError("stub outcome line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void ScriptedRunner::add_file(const std::filesystem::path& path) { add_jsonl(read_file(path)); }

ExecResult ScriptedRunner::run(const ExecRequest& request) {
  ExecResult r;
  if (request.stage == "setup") {
    ++provisions_;
    std::string text;
    for (int i = 1; i <= std::max(request.min_lines, 1); ++i) {
      text += "// placeholder line " + std::to_string(i) + "\n";
    }
    atomic_write_file(request.workspace / request.file_path, text);
    return r;
  }
  std::lock_guard lock(mutex_);
  ++executions_[request.stage];
  const auto it = scripts_.find({request.bug_id, request.content_hash});
  bool ok = false;
  if (it != scripts_.end()) {
    if (request.stage == "compile") ok = it->second.compile;
    if (request.stage == "regression") ok = it->second.regression;
    if (request.stage == "trigger") ok = it->second.trigger;
  }
  r.exit_code = ok ? 0 : 1;
  r.output = std::string("scripted ") + request.stage + (ok ? " pass\n" : " fail\n");
  return r;
}

std::size_t ScriptedRunner::executions(const std::string& stage) const {
  std::lock_guard lock(mutex_);
  const auto it = executions_.find(stage);
  return it == executions_.end() ? 0 : it->second;
}

}  // namespace nl2fix::validation
