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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nl2fix/common/errors.hpp"

namespace nl2fix::codesim {

// Concrete syntax tree node. Leaves carry the token text; their kind is the
// token category for identifiers and literals ("identifier",
// "integer_literal", ...) and the token text itself for keywords,
// operators and separators.
struct SyntaxNode {
  std::string kind;
  std::string text;
  std::vector<SyntaxNode> children;

  bool is_leaf() const { return children.empty() && !text.empty(); }
};

enum class ParseMode {
  // Any syntax error throws SyntaxError.
  Strict,
  // Keeps the longest prefix that parses at statement/member granularity
  // and ignores the rest; running out of input closes open constructs.
  Prefix,
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : Error("SyntaxError",
              "syntax error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

struct ParseResult {
  SyntaxNode root;  // kind "program"
  bool complete = true;
};

// Parses a Java method, a sequence of members, or bare statements.
ParseResult parse_java(std::string_view source, ParseMode mode);

// One entry per internal node: "kind(child_kind child_kind ...)".
std::vector<std::string> subtree_signatures(const SyntaxNode& root);

// Def-use edges with variables renamed to v0, v1, ... in order of first
// definition within each function: "v<k>#<def ordinal>@<use context>".
std::vector<std::string> dataflow_edges(const SyntaxNode& root);

// Debug rendering as an s-expression.
std::string to_sexpr(const SyntaxNode& node);

}  // namespace nl2fix::codesim
