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

#include "nl2fix/codesim/lexer.hpp"

#include <array>
#include <set>

#include "nl2fix/generated/assets.hpp"

namespace nl2fix::codesim {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::IntegerLiteral: return "integer_literal";
    case TokenKind::FloatLiteral: return "float_literal";
    case TokenKind::StringLiteral: return "string_literal";
    case TokenKind::TextBlock: return "text_block";
    case TokenKind::CharLiteral: return "char_literal";
    case TokenKind::BooleanLiteral: return "boolean_literal";
    case TokenKind::NullLiteral: return "null_literal";
    case TokenKind::Operator: return "operator";
    case TokenKind::Separator: return "separator";
    case TokenKind::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

const std::set<std::string, std::less<>>& keyword_set() {
  static const auto* kSet = [] {
    auto* set = new std::set<std::string, std::less<>>();
    std::string_view text = assets::kJavaKeywords;
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      auto word = text.substr(pos, end - pos);
      if (!word.empty()) set->emplace(word);
      pos = end + 1;
    }
    return set;
  }();
  return *kSet;
}

bool ident_start(unsigned char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_' ||
         ch == '$' || ch >= 0x80;
}

bool is_digit(unsigned char ch) { return ch >= '0' && ch <= '9'; }

bool ident_part(unsigned char ch) { return ident_start(ch) || is_digit(ch); }

bool is_hex(unsigned char ch) {
  return is_digit(ch) || (ch >= 'a' && ch <= 'f') || (ch >= 'A' && ch <= 'F');
}

// Longest first so maximal munch falls out of a linear scan.
constexpr std::array<std::string_view, 41> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||",
    "==",   "!=",  "<=",  ">=",  "+=",  "-=", "*=", "/=", "&=", "|=", "^=",
    "%=",   "<<",  ">>",  "=",   ">",   "<",  "!",  "~",  "?",  ":",  "+",
    "-",    "*",   "/",   "&",   "|",   "^",  "%",  "@"};
constexpr std::string_view kSeparators = "(){}[];,.";

}  // namespace

bool is_java_keyword(std::string_view word) {
  return keyword_set().count(word) != 0;
}

std::vector<Token> tokenize(std::string_view src, std::string_view /*language*/) {
  std::vector<Token> out;
  const std::size_t n = src.size();
  std::size_t i = 0;
  auto at = [&](std::size_t k) -> unsigned char {
    return k < n ? static_cast<unsigned char>(src[k]) : 0;
  };
  auto emit = [&](TokenKind kind, std::size_t start, std::size_t end) {
    out.push_back({kind, std::string(src.substr(start, end - start)), start});
  };
  while (i < n) {
    const unsigned char ch = at(i);
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' ||
        ch == '\v') {
      ++i;
      continue;
    }
    if (ch == '/' && at(i + 1) == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (ch == '/' && at(i + 1) == '*') {
      const auto close = src.find("*/", i + 2);
      i = close == std::string_view::npos ? n : close + 2;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(ch)) {
      while (i < n && ident_part(at(i))) ++i;
      const auto word = src.substr(start, i - start);
      TokenKind kind = TokenKind::Identifier;
      if (word == "true" || word == "false") {
        kind = TokenKind::BooleanLiteral;
      } else if (word == "null") {
        kind = TokenKind::NullLiteral;
      } else if (is_java_keyword(word)) {
        kind = TokenKind::Keyword;
      }
      emit(kind, start, i);
      continue;
    }
    if (is_digit(ch) || (ch == '.' && is_digit(at(i + 1)))) {
      bool is_float = false;
      if (ch == '0' && (at(i + 1) == 'x' || at(i + 1) == 'X')) {
        i += 2;
        while (is_hex(at(i)) || at(i) == '_' || at(i) == '.') {
          if (at(i) == '.') is_float = true;
          ++i;
        }
        if (at(i) == 'p' || at(i) == 'P') {
          is_float = true;
          ++i;
          if (at(i) == '+' || at(i) == '-') ++i;
          while (is_digit(at(i))) ++i;
        }
      } else if (ch == '0' && (at(i + 1) == 'b' || at(i + 1) == 'B')) {
        i += 2;
        while (at(i) == '0' || at(i) == '1' || at(i) == '_') ++i;
      } else {
        while (is_digit(at(i)) || at(i) == '_') ++i;
        if (at(i) == '.' && is_digit(at(i + 1))) {
          is_float = true;
          ++i;
          while (is_digit(at(i)) || at(i) == '_') ++i;
        } else if (at(i) == '.' && !ident_start(at(i + 1)) && at(i + 1) != '.') {
          // "1." is a complete floating literal.
          is_float = true;
          ++i;
        }
        if ((at(i) == 'e' || at(i) == 'E') &&
            (is_digit(at(i + 1)) ||
             ((at(i + 1) == '+' || at(i + 1) == '-') && is_digit(at(i + 2))))) {
          is_float = true;
          i += 2;
          while (is_digit(at(i))) ++i;
        }
      }
      const unsigned char suffix = at(i);
      if (suffix == 'l' || suffix == 'L') {
        ++i;
      } else if (suffix == 'f' || suffix == 'F' || suffix == 'd' || suffix == 'D') {
        is_float = true;
        ++i;
      }
      emit(is_float ? TokenKind::FloatLiteral : TokenKind::IntegerLiteral, start, i);
      continue;
    }
    if (ch == '"' && at(i + 1) == '"' && at(i + 2) == '"') {
      i += 3;
      while (i < n && !(at(i) == '"' && at(i + 1) == '"' && at(i + 2) == '"')) {
        i += at(i) == '\\' ? 2 : 1;
      }
      i = std::min(n, i + 3);
      emit(TokenKind::TextBlock, start, i);
      continue;
    }
    if (ch == '"' || ch == '\'') {
      ++i;
      while (i < n && at(i) != ch && at(i) != '\n') {
        i += at(i) == '\\' ? 2 : 1;
      }
      if (i < n && at(i) == ch) ++i;
      i = std::min(i, n);
      emit(ch == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral, start, i);
      continue;
    }
    bool matched = false;
    for (auto op : kOperators) {
      if (src.substr(i, op.size()) == op) {
        i += op.size();
        emit(TokenKind::Operator, start, i);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kSeparators.find(static_cast<char>(ch)) != std::string_view::npos) {
      ++i;
      emit(TokenKind::Separator, start, i);
      continue;
    }
    ++i;
    emit(TokenKind::Unknown, start, i);
  }
  return out;
}

std::vector<std::string> token_texts(std::string_view source,
                                     std::string_view language) {
  std::vector<std::string> out;
  for (auto& t : tokenize(source, language)) out.push_back(std::move(t.text));
  return out;
}

}  // namespace nl2fix::codesim
