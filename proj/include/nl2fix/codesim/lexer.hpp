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
#include <string>
#include <string_view>
#include <vector>

namespace nl2fix::codesim {

enum class TokenKind {
  Identifier,
  Keyword,
  IntegerLiteral,
  FloatLiteral,
  StringLiteral,
  TextBlock,
  CharLiteral,
  BooleanLiteral,
  NullLiteral,
  Operator,
  Separator,
  Unknown,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Unknown;
  std::string text;
  std::size_t offset = 0;

  bool operator==(const Token&) const = default;
};

bool is_java_keyword(std::string_view word);

// Lexes Java-like source. Whitespace and comments are dropped, operators
// are matched by maximal munch, and bytes that start no token become
// single-character Unknown tokens. Never throws.
std::vector<Token> tokenize(std::string_view source,
                            std::string_view language = "java");

// Token texts only.
std::vector<std::string> token_texts(std::string_view source,
                                     std::string_view language = "java");

}  // namespace nl2fix::codesim
