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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nl2fix/common/errors.hpp"

namespace nl2fix::corpus {

// Inclusive, 1-based line range.
struct MethodSpan {
  int start_line = 1;
  int end_line = 1;

  bool operator==(const MethodSpan&) const = default;
};

// One single-method bug. `buggy_function` is stored comment-free.
struct BugRecord {
  std::string bug_id;
  std::string project;
  std::string issue_title;
  std::string issue_description;
  std::string buggy_function;
  std::string fixed_function;  // evaluation only, never in its own prompt
  std::string file_path;
  MethodSpan method_span;
  std::string language = "java";
  std::string workspace_setup_cmd;
  std::string compile_cmd;
  std::string regression_cmd;
  std::string trigger_cmd;
  // Per-record override of the validation stage timeout.
  std::optional<double> stage_timeout_s;

  bool operator==(const BugRecord&) const = default;
};

struct Corpus {
  std::vector<BugRecord> records;  // file order
  std::string source_path;

  const BugRecord* find(std::string_view bug_id) const;
};

class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line_no, const std::string& detail)
      : Error("MalformedLine",
              "line " + std::to_string(line_no) + ": " + detail),
        line_no_(line_no) {}
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

class DuplicateBugId : public Error {
 public:
  explicit DuplicateBugId(std::string id)
      : Error("DuplicateBugId", "duplicate bug_id: " + id), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class InvalidRecord : public Error {
 public:
  InvalidRecord(std::string id, const std::string& reason)
      : Error("InvalidRecord", "invalid record '" + id + "': " + reason),
        id_(std::move(id)),
        reason_(reason) {}
  const std::string& id() const noexcept { return id_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string id_;
  std::string reason_;
};

class UnterminatedBlockComment : public Error {
 public:
  explicit UnterminatedBlockComment(std::size_t offset)
      : Error("UnterminatedBlockComment",
              "unterminated block comment starting at offset " +
                  std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Removes `//` and `/* */` comments, leaving string, char and text-block
// literals untouched. Trailing blanks left in front of a removed comment
// are trimmed, and lines that become blank because of a removed comment
// are dropped. A block comment squeezed between two non-blank bytes
// becomes one space so adjacent tokens stay separate.
std::string strip_comments(std::string_view source,
                           std::string_view language = "java");

// Every invariant violation of a single record; empty means valid.
std::vector<std::string> validate_record(const BugRecord& record);

BugRecord record_from_json(const nlohmann::json& j);
nlohmann::json record_to_json(const BugRecord& record);

// Loads a JSON-lines corpus. Blank lines are skipped. Buggy functions are
// comment-stripped before validation.
Corpus load_corpus(const std::filesystem::path& path);

// Parses JSON-lines text; `source_name` is stored as source_path.
Corpus parse_corpus(std::string_view text, std::string source_name = {});

// One compact JSON object per line, LF terminated.
std::string serialize_corpus(const Corpus& corpus);

}  // namespace nl2fix::corpus
