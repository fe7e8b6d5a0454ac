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

#include "nl2fix/corpus.hpp"

#include <nlohmann/json.hpp>

#include <set>

#include "nl2fix/common/fs.hpp"
#include "nl2fix/metrics.hpp"

namespace nl2fix::corpus {

using nlohmann::json;

const BugRecord* Corpus::find(std::string_view bug_id) const {
  for (const auto& r : records) {
    if (r.bug_id == bug_id) return &r;
  }
  return nullptr;
}

namespace {

bool is_blank(char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; }

void trim_trailing_blanks(std::string& out) {
  while (!out.empty() && is_blank(out.back())) out.pop_back();
}

}  // namespace

std::string strip_comments(std::string_view src, std::string_view /*language*/) {
  enum class State { Code, String, Char, TextBlock };
  State state = State::Code;
  std::string out;
  out.reserve(src.size());
  // Set when a comment was removed from the line currently being written.
  bool line_had_comment = false;

  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    const char ch = src[i];
    switch (state) {
      case State::Code:
        if (ch == '/' && i + 1 < n && src[i + 1] == '/') {
          trim_trailing_blanks(out);
          line_had_comment = true;
          i += 2;
          while (i < n && src[i] != '\n') ++i;
          continue;
        }
        if (ch == '/' && i + 1 < n && src[i + 1] == '*') {
          const std::size_t start = i;
          const auto close = src.find("*/", i + 2);
          if (close == std::string_view::npos) throw UnterminatedBlockComment(start);
          i = close + 2;
          line_had_comment = true;
          const bool prev_solid = !out.empty() && !is_blank(out.back()) && out.back() != '\n';
          const bool next_solid = i < n && !is_blank(src[i]) && src[i] != '\n';
          if (prev_solid && next_solid) out.push_back(' ');
          continue;
        }
        if (ch == '\n') {
          ++i;
          if (line_had_comment) {
            line_had_comment = false;
            trim_trailing_blanks(out);
            // The line held nothing but comments: drop it with its newline.
            if (out.empty() || out.back() == '\n') continue;
          }
          out.push_back('\n');
          continue;
        }
        if (ch == '"') {
          if (src.substr(i, 3) == "\"\"\"") {
            state = State::TextBlock;
            out.append("\"\"\"");
            i += 3;
            continue;
          }
          state = State::String;
        } else if (ch == '\'') {
          state = State::Char;
        }
        out.push_back(ch);
        ++i;
        continue;
      case State::String:
      case State::Char: {
        const char quote = state == State::String ? '"' : '\'';
        out.push_back(ch);
        ++i;
        if (ch == '\\' && i < n) {
          out.push_back(src[i]);
          ++i;
        } else if (ch == quote || ch == '\n') {
          // A newline ends an unterminated literal so one bad quote cannot
          // swallow the rest of the file.
          state = State::Code;
        }
        continue;
      }
      case State::TextBlock:
        if (ch == '\\' && i + 1 < n) {
          out.push_back(ch);
          out.push_back(src[i + 1]);
          i += 2;
          continue;
        }
        if (src.substr(i, 3) == "\"\"\"") {
          out.append("\"\"\"");
          i += 3;
          state = State::Code;
          continue;
        }
        out.push_back(ch);
        ++i;
        continue;
    }
  }
  if (line_had_comment) trim_trailing_blanks(out);
  return out;
}

std::vector<std::string> validate_record(const BugRecord& r) {
  std::vector<std::string> violations;
  if (r.bug_id.empty()) violations.emplace_back("bug_id empty");
  if (r.method_span.start_line < 1) violations.emplace_back("span start below 1");
  if (r.method_span.start_line > r.method_span.end_line) {
    violations.emplace_back("span inverted");
  }
  if (metrics::canonical_form(r.buggy_function).empty()) {
    violations.emplace_back("buggy_function empty");
  }
  if (metrics::exact_match(r.buggy_function, r.fixed_function)) {
    violations.emplace_back("fixed_function identical to buggy_function");
  }
  if (r.file_path.empty()) violations.emplace_back("file_path empty");
  if (r.stage_timeout_s && !(*r.stage_timeout_s > 0.0)) {
    violations.emplace_back("stage_timeout_s not positive");
  }
  try {
    if (strip_comments(r.buggy_function, r.language) != r.buggy_function) {
      violations.emplace_back("buggy_function contains comments");
    }
  } catch (const UnterminatedBlockComment&) {
    violations.emplace_back("buggy_function has an unterminated block comment");
  }
  return violations;
}

BugRecord record_from_json(const json& j) {
  BugRecord r;
  j.at("bug_id").get_to(r.bug_id);
  r.project = j.value("project", "");
  r.issue_title = j.value("issue_title", "");
  r.issue_description = j.value("issue_description", "");
  j.at("buggy_function").get_to(r.buggy_function);
  j.at("fixed_function").get_to(r.fixed_function);
  j.at("file_path").get_to(r.file_path);
  const auto& span = j.at("method_span");
  if (span.is_array()) {
    span.at(0).get_to(r.method_span.start_line);
    span.at(1).get_to(r.method_span.end_line);
  } else {
    span.at("start_line").get_to(r.method_span.start_line);
    span.at("end_line").get_to(r.method_span.end_line);
  }
  r.language = j.value("language", "java");
  r.workspace_setup_cmd = j.value("workspace_setup_cmd", "");
  r.compile_cmd = j.value("compile_cmd", "");
  r.regression_cmd = j.value("regression_cmd", "");
  r.trigger_cmd = j.value("trigger_cmd", "");
  if (j.contains("stage_timeout_s") && !j["stage_timeout_s"].is_null()) {
    r.stage_timeout_s = j["stage_timeout_s"].get<double>();
  }
  return r;
}

json record_to_json(const BugRecord& r) {
  json j = {
      {"bug_id", r.bug_id},
      {"project", r.project},
      {"issue_title", r.issue_title},
      {"issue_description", r.issue_description},
      {"buggy_function", r.buggy_function},
      {"fixed_function", r.fixed_function},
      {"file_path", r.file_path},
      {"method_span",
       {{"start_line", r.method_span.start_line},
        {"end_line", r.method_span.end_line}}},
      {"language", r.language},
      {"workspace_setup_cmd", r.workspace_setup_cmd},
      {"compile_cmd", r.compile_cmd},
      {"regression_cmd", r.regression_cmd},
      {"trigger_cmd", r.trigger_cmd},
  };
  if (r.stage_timeout_s) j["stage_timeout_s"] = *r.stage_timeout_s;
  return j;
}

Corpus parse_corpus(std::string_view text, std::string source_name) {
  Corpus corpus;
  corpus.source_path = std::move(source_name);
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    BugRecord record;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw MalformedLine(line_no, "not a JSON object");
      record = record_from_json(j);
    } catch (const json::exception& e) {
      throw MalformedLine(line_no, e.what());
    }
    try {
      record.buggy_function = strip_comments(record.buggy_function, record.language);
    } catch (const UnterminatedBlockComment& e) {
      throw InvalidRecord(record.bug_id, e.what());
    }
    if (!seen.insert(record.bug_id).second) throw DuplicateBugId(record.bug_id);
    if (auto violations = validate_record(record); !violations.empty()) {
      std::string reason;
      for (const auto& v : violations) {
        if (!reason.empty()) reason += "; ";
        reason += v;
      }
      throw InvalidRecord(record.bug_id, reason);
    }
    corpus.records.push_back(std::move(record));
    if (end == text.size()) break;
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path), path.string());
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace nl2fix::corpus
