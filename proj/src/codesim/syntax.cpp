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

#include "nl2fix/codesim/syntax.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <initializer_list>

#include "nl2fix/codesim/lexer.hpp"

namespace nl2fix::codesim {

namespace {

constexpr std::array<std::string_view, 8> kPrimitiveTypes = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double"};

constexpr std::array<std::string_view, 12> kModifierKeywords = {
    "public",   "protected", "private",      "static",
    "abstract", "final",     "native",       "synchronized",
    "transient", "volatile", "strictfp",     "default"};

constexpr std::array<std::string_view, 12> kAssignmentOps = {
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="};

bool one_of(std::string_view s, auto const& list) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

bool is_primitive(std::string_view s) { return one_of(s, kPrimitiveTypes); }

std::string leaf_kind(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::Keyword:
    case TokenKind::Operator:
    case TokenKind::Separator:
    case TokenKind::Unknown:
      return tok.text;
    default:
      return std::string(to_string(tok.kind));
  }
}

// Binary operator precedence levels, loosest first.
const std::vector<std::vector<std::string_view>>& binary_levels() {
  static const std::vector<std::vector<std::string_view>> kLevels = {
      {"||"},
      {"&&"},
      {"|"},
      {"^"},
      {"&"},
      {"==", "!="},
      {"<", ">", "<=", ">=", "instanceof"},
      {"<<", ">>", ">>>"},
      {"+", "-"},
      {"*", "/", "%"},
  };
  return kLevels;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::size_t source_size, bool recover)
      : toks_(std::move(tokens)), source_size_(source_size), recover_(recover) {}

  ParseResult parse_program() {
    SyntaxNode root{"program", {}, {}};
    parse_list(root, [] { return false; }, [this] { return parse_top_item(); });
    ParseResult result;
    result.complete = !halted_ && at_end();
    result.root = std::move(root);
    return result;
  }

 private:
  struct Mark {
    std::size_t pos;
    std::size_t gt;
  };

  std::vector<Token> toks_;
  std::size_t source_size_;
  bool recover_;
  bool halted_ = false;
  std::size_t pos_ = 0;
  // Number of '>' characters already consumed from a '>>' or '>>>' token
  // while closing nested type arguments.
  std::size_t gt_used_ = 0;
  Token scratch_;

  // ---- token access -------------------------------------------------------

  bool at_end() const { return pos_ >= toks_.size(); }

  const Token& cur() {
    static const Token kEnd{TokenKind::Unknown, "", 0};
    if (at_end()) return kEnd;
    if (gt_used_ == 0) return toks_[pos_];
    const Token& t = toks_[pos_];
    scratch_ = Token{TokenKind::Operator, t.text.substr(gt_used_), t.offset + gt_used_};
    return scratch_;
  }

  const Token& peek(std::size_t k) const {
    static const Token kEnd{TokenKind::Unknown, "", 0};
    return pos_ + k < toks_.size() ? toks_[pos_ + k] : kEnd;
  }

  bool is(std::string_view text) {
    const Token& t = cur();
    if (at_end()) return false;
    switch (t.kind) {
      case TokenKind::Keyword:
      case TokenKind::Operator:
      case TokenKind::Separator:
      case TokenKind::Identifier:
        return t.text == text;
      default:
        return false;
    }
  }

  bool peek_is(std::size_t k, std::string_view text) const {
    const Token& t = peek(k);
    return pos_ + k < toks_.size() && t.text == text &&
           (t.kind == TokenKind::Keyword || t.kind == TokenKind::Operator ||
            t.kind == TokenKind::Separator || t.kind == TokenKind::Identifier);
  }

  bool is_ident() { return !at_end() && cur().kind == TokenKind::Identifier; }

  bool is_literal() {
    if (at_end()) return false;
    switch (cur().kind) {
      case TokenKind::IntegerLiteral:
      case TokenKind::FloatLiteral:
      case TokenKind::StringLiteral:
      case TokenKind::TextBlock:
      case TokenKind::CharLiteral:
      case TokenKind::BooleanLiteral:
      case TokenKind::NullLiteral:
        return true;
      default:
        return false;
    }
  }

  Mark mark() const { return {pos_, gt_used_}; }
  void reset(Mark m) {
    pos_ = m.pos;
    gt_used_ = m.gt;
  }

  [[noreturn]] void fail(const std::string& what) {
    const std::size_t offset = at_end() ? source_size_ : cur().offset;
    throw SyntaxError(offset, what + (at_end() ? " at end of input"
                                               : ", found '" + cur().text + "'"));
  }

  SyntaxNode take() {
    if (at_end()) fail("unexpected end of input");
    const Token& t = cur();
    SyntaxNode leaf{leaf_kind(t), t.text, {}};
    if (gt_used_ > 0) leaf.kind = leaf.text;
    gt_used_ = 0;
    ++pos_;
    return leaf;
  }

  SyntaxNode expect(std::string_view text) {
    if (!is(text)) fail("expected '" + std::string(text) + "'");
    return take();
  }

  SyntaxNode expect_ident() {
    if (!is_ident()) fail("expected identifier");
    return take();
  }

  // Consumes one '>' even when it is glued to others as '>>' or '>>>'.
  SyntaxNode expect_close_angle() {
    if (at_end()) fail("expected '>'");
    const Token& t = toks_[pos_];
    if (t.kind == TokenKind::Operator &&
        (t.text == ">" || t.text == ">>" || t.text == ">>>") &&
        gt_used_ < t.text.size()) {
      ++gt_used_;
      if (gt_used_ == t.text.size()) {
        gt_used_ = 0;
        ++pos_;
      }
      return SyntaxNode{">", ">", {}};
    }
    fail("expected '>'");
  }

  // Appends `child`; returns true when parsing has halted and the caller
  // must return its partial node immediately.
  bool add(SyntaxNode& parent, SyntaxNode child) {
    parent.children.push_back(std::move(child));
    return halted_;
  }

  void halt_or_fail(const std::string& what) {
    if (recover_ && at_end()) {
      halted_ = true;
      return;
    }
    fail(what);
  }

  // Repeatedly parses items into `parent` until `stop()`. In prefix mode a
  // failing item is discarded and parsing halts.
  template <typename Stop, typename One>
  void parse_list(SyntaxNode& parent, Stop stop, One one) {
    while (!at_end() && !stop()) {
      const Mark m = mark();
      try {
        if (add(parent, one())) return;
      } catch (const SyntaxError&) {
        if (!recover_) throw;
        reset(m);
        halted_ = true;
        return;
      }
    }
  }

  // Runs `fn` speculatively; restores the position and returns false if it
  // throws.
  template <typename Fn>
  bool attempt(Fn fn) {
    const Mark m = mark();
    try {
      fn();
      return true;
    } catch (const SyntaxError&) {
      reset(m);
      return false;
    }
  }

  // ---- declarations -------------------------------------------------------

  bool at_modifier() {
    if (at_end()) return false;
    if (is("@") && !peek_is(1, "interface")) return true;
    if (cur().kind == TokenKind::Keyword && one_of(cur().text, kModifierKeywords)) {
      // "default:" and "default ->" belong to switch statements.
      if (cur().text == "default" && (peek_is(1, ":") || peek_is(1, "->"))) return false;
      return true;
    }
    if (is_ident() && (cur().text == "sealed" || cur().text == "non") &&
        (peek(1).kind == TokenKind::Keyword || peek(1).kind == TokenKind::Identifier ||
         peek_is(1, "-"))) {
      // sealed / non-sealed
      if (cur().text == "non") return peek_is(1, "-") && peek(2).text == "sealed";
      return peek_is(1, "class") || peek_is(1, "interface") || peek(1).kind == TokenKind::Keyword;
    }
    return false;
  }

  SyntaxNode parse_modifiers() {
    SyntaxNode mods{"modifiers", {}, {}};
    while (at_modifier()) {
      if (is("@")) {
        mods.children.push_back(parse_annotation());
      } else if (is_ident() && cur().text == "non") {
        mods.children.push_back(take());
        mods.children.push_back(expect("-"));
        mods.children.push_back(take());
      } else {
        mods.children.push_back(take());
      }
    }
    return mods;
  }

  SyntaxNode parse_qualified_name() {
    SyntaxNode n{"qualified_name", {}, {}};
    n.children.push_back(expect_ident());
    while (is(".") && peek(1).kind == TokenKind::Identifier) {
      n.children.push_back(take());
      n.children.push_back(expect_ident());
    }
    return n;
  }

  SyntaxNode parse_annotation() {
    SyntaxNode n{"annotation", {}, {}};
    n.children.push_back(expect("@"));
    n.children.push_back(parse_qualified_name());
    if (is("(")) {
      SyntaxNode args{"annotation_arguments", {}, {}};
      args.children.push_back(take());
      while (!is(")")) {
        if (is_ident() && peek_is(1, "=")) {
          SyntaxNode pair{"element_value_pair", {}, {}};
          pair.children.push_back(take());
          pair.children.push_back(take());
          pair.children.push_back(parse_element_value());
          args.children.push_back(std::move(pair));
        } else {
          args.children.push_back(parse_element_value());
        }
        if (!is(",")) break;
        args.children.push_back(take());
      }
      args.children.push_back(expect(")"));
      n.children.push_back(std::move(args));
    }
    return n;
  }

  SyntaxNode parse_element_value() {
    if (is("@")) return parse_annotation();
    if (is("{")) {
      SyntaxNode n{"element_value_array", {}, {}};
      n.children.push_back(take());
      while (!is("}")) {
        n.children.push_back(parse_element_value());
        if (!is(",")) break;
        n.children.push_back(take());
      }
      n.children.push_back(expect("}"));
      return n;
    }
    return parse_ternary();
  }

  bool at_type_declaration() {
    if (is("class") || is("interface") || is("enum")) return true;
    if (is("@") && peek_is(1, "interface")) return true;
    return is_ident() && cur().text == "record" &&
           peek(1).kind == TokenKind::Identifier &&
           (peek_is(2, "(") || peek_is(2, "<"));
  }

  SyntaxNode parse_type_declaration(SyntaxNode mods) {
    std::string kind = "class_declaration";
    if (is("interface")) kind = "interface_declaration";
    if (is("enum")) kind = "enum_declaration";
    if (is("@")) kind = "annotation_type_declaration";
    if (is_ident()) kind = "record_declaration";
    SyntaxNode n{kind, {}, {}};
    if (!mods.children.empty()) n.children.push_back(std::move(mods));
    if (is("@")) n.children.push_back(take());
    n.children.push_back(take());  // class / interface / enum / record
    n.children.push_back(expect_ident());
    if (is("<")) n.children.push_back(parse_type_parameters());
    if (kind == "record_declaration") n.children.push_back(parse_formal_parameters());
    while (is("extends") || is("implements") || (is_ident() && cur().text == "permits")) {
      SyntaxNode clause{"super_clause", {}, {}};
      clause.children.push_back(take());
      clause.children.push_back(parse_type());
      while (is(",")) {
        clause.children.push_back(take());
        clause.children.push_back(parse_type());
      }
      n.children.push_back(std::move(clause));
    }
    if (kind == "enum_declaration") {
      add(n, parse_enum_body());
    } else {
      add(n, parse_class_body());
    }
    return n;
  }

  SyntaxNode parse_class_body() {
    SyntaxNode body{"class_body", {}, {}};
    body.children.push_back(expect("{"));
    parse_list(body, [this] { return is("}"); }, [this] { return parse_member(); });
    if (halted_) return body;
    if (at_end()) {
      halt_or_fail("expected '}'");
      return body;
    }
    body.children.push_back(expect("}"));
    return body;
  }

  SyntaxNode parse_enum_body() {
    SyntaxNode body{"enum_body", {}, {}};
    body.children.push_back(expect("{"));
    while (is_ident() || is("@")) {
      SyntaxNode constant{"enum_constant", {}, {}};
      while (is("@")) constant.children.push_back(parse_annotation());
      constant.children.push_back(expect_ident());
      if (is("(")) {
        if (add(constant, parse_arguments())) return add(body, std::move(constant)), body;
      }
      if (is("{")) {
        if (add(constant, parse_class_body())) return add(body, std::move(constant)), body;
      }
      body.children.push_back(std::move(constant));
      if (!is(",")) break;
      body.children.push_back(take());
    }
    if (is(";")) {
      body.children.push_back(take());
      parse_list(body, [this] { return is("}"); }, [this] { return parse_member(); });
      if (halted_) return body;
    }
    if (at_end()) {
      halt_or_fail("expected '}'");
      return body;
    }
    body.children.push_back(expect("}"));
    return body;
  }

  SyntaxNode parse_type_parameters() {
    SyntaxNode n{"type_parameters", {}, {}};
    n.children.push_back(expect("<"));
    for (;;) {
      SyntaxNode param{"type_parameter", {}, {}};
      while (is("@")) param.children.push_back(parse_annotation());
      param.children.push_back(expect_ident());
      if (is("extends")) {
        param.children.push_back(take());
        param.children.push_back(parse_type());
        while (is("&")) {
          param.children.push_back(take());
          param.children.push_back(parse_type());
        }
      }
      n.children.push_back(std::move(param));
      if (!is(",")) break;
      n.children.push_back(take());
    }
    n.children.push_back(expect_close_angle());
    return n;
  }

  SyntaxNode parse_formal_parameters() {
    SyntaxNode n{"formal_parameters", {}, {}};
    n.children.push_back(expect("("));
    if (!is(")")) {
      for (;;) {
        SyntaxNode param{"formal_parameter", {}, {}};
        SyntaxNode mods = parse_modifiers();
        if (!mods.children.empty()) param.children.push_back(std::move(mods));
        param.children.push_back(parse_type());
        if (is("...")) param.children.push_back(take());
        if (is("this")) {
          param.children.push_back(take());  // receiver parameter
        } else {
          param.children.push_back(expect_ident());
        }
        parse_dims_into(param);
        n.children.push_back(std::move(param));
        if (!is(",")) break;
        n.children.push_back(take());
      }
    }
    n.children.push_back(expect(")"));
    return n;
  }

  void parse_dims_into(SyntaxNode& n) {
    while (is("[") && peek_is(1, "]")) {
      SyntaxNode dims{"dimensions", {}, {}};
      dims.children.push_back(take());
      dims.children.push_back(take());
      n.children.push_back(std::move(dims));
    }
  }

  // Everything of a method or constructor declaration except its body.
  SyntaxNode parse_method_header(SyntaxNode mods) {
    SyntaxNode n{"method_declaration", {}, {}};
    if (!mods.children.empty()) n.children.push_back(std::move(mods));
    if (is("<")) n.children.push_back(parse_type_parameters());
    if (is_ident() && peek_is(1, "(")) {
      n.kind = "constructor_declaration";
    } else if (is_ident() && peek_is(1, "{")) {
      n.kind = "compact_constructor_declaration";
      n.children.push_back(take());
      return n;
    } else if (is("void")) {
      n.children.push_back(take());
    } else {
      n.children.push_back(parse_type());
    }
    n.children.push_back(expect_ident());
    n.children.push_back(parse_formal_parameters());
    parse_dims_into(n);
    if (is("throws")) {
      SyntaxNode t{"throws", {}, {}};
      t.children.push_back(take());
      t.children.push_back(parse_type());
      while (is(",")) {
        t.children.push_back(take());
        t.children.push_back(parse_type());
      }
      n.children.push_back(std::move(t));
    }
    if (is("default")) {
      // annotation element default value
      n.children.push_back(take());
      n.children.push_back(parse_element_value());
    }
    if (!is("{") && !is(";")) fail("expected method body");
    if (n.kind == "constructor_declaration" && !is("{")) fail("expected constructor body");
    return n;
  }

  SyntaxNode parse_method_body(SyntaxNode header) {
    if (is(";")) {
      header.children.push_back(take());
      return header;
    }
    add(header, parse_block());
    return header;
  }

  SyntaxNode parse_field_declaration(SyntaxNode mods) {
    SyntaxNode n{"field_declaration", {}, {}};
    if (!mods.children.empty()) n.children.push_back(std::move(mods));
    n.children.push_back(parse_type());
    if (parse_declarators_into(n)) return n;
    n.children.push_back(expect(";"));
    return n;
  }

  SyntaxNode parse_member() {
    if (is(";")) return SyntaxNode{"empty_declaration", {}, {take()}};
    if (is("{") || (is("static") && peek_is(1, "{"))) {
      SyntaxNode n{"initializer", {}, {}};
      if (is("static")) n.children.push_back(take());
      add(n, parse_block());
      return n;
    }
    SyntaxNode mods = parse_modifiers();
    if (at_type_declaration()) return parse_type_declaration(std::move(mods));
    SyntaxNode header;
    const bool is_method = attempt([&] { header = parse_method_header(mods); });
    if (is_method) return parse_method_body(std::move(header));
    return parse_field_declaration(std::move(mods));
  }

  SyntaxNode parse_top_item() {
    const Mark start = mark();
    SyntaxNode mods = parse_modifiers();
    if (at_type_declaration()) return parse_type_declaration(std::move(mods));
    SyntaxNode header;
    if (attempt([&] { header = parse_method_header(mods); })) {
      return parse_method_body(std::move(header));
    }
    reset(start);
    return parse_block_statement();
  }

  // ---- types --------------------------------------------------------------

  SyntaxNode parse_type() {
    SyntaxNode n{"type", {}, {}};
    while (is("@")) n.children.push_back(parse_annotation());
    if (!at_end() && cur().kind == TokenKind::Keyword && is_primitive(cur().text)) {
      n.children.push_back(take());
    } else {
      n.children.push_back(expect_ident());
      if (is("<")) n.children.push_back(parse_type_arguments());
      while (is(".") && (peek(1).kind == TokenKind::Identifier || peek_is(1, "@"))) {
        n.children.push_back(take());
        while (is("@")) n.children.push_back(parse_annotation());
        n.children.push_back(expect_ident());
        if (is("<")) n.children.push_back(parse_type_arguments());
      }
    }
    parse_dims_into(n);
    return n;
  }

  SyntaxNode parse_type_arguments() {
    SyntaxNode n{"type_arguments", {}, {}};
    n.children.push_back(expect("<"));
    if (is(">")) {
      n.children.push_back(expect_close_angle());
      return n;
    }
    for (;;) {
      if (is("?")) {
        SyntaxNode wildcard{"wildcard", {}, {}};
        wildcard.children.push_back(take());
        if (is("extends") || is("super")) {
          wildcard.children.push_back(take());
          wildcard.children.push_back(parse_type());
        }
        n.children.push_back(std::move(wildcard));
      } else {
        n.children.push_back(parse_type());
      }
      if (!is(",")) break;
      n.children.push_back(take());
    }
    n.children.push_back(expect_close_angle());
    return n;
  }

  // ---- statements ---------------------------------------------------------

  SyntaxNode parse_block() {
    SyntaxNode n{"block", {}, {}};
    n.children.push_back(expect("{"));
    parse_list(n, [this] { return is("}"); }, [this] { return parse_block_statement(); });
    if (halted_) return n;
    if (at_end()) {
      halt_or_fail("expected '}'");
      return n;
    }
    n.children.push_back(expect("}"));
    return n;
  }

  bool looks_like_local_variable() {
    const Mark m = mark();
    bool ok = false;
    try {
      parse_modifiers();
      parse_type();
      ok = is_ident() && (peek_is(1, "=") || peek_is(1, ";") || peek_is(1, ",") ||
                          peek_is(1, "[") || peek_is(1, ":"));
    } catch (const SyntaxError&) {
      ok = false;
    }
    reset(m);
    return ok;
  }

  // Declarators after the type; returns true if parsing halted.
  bool parse_declarators_into(SyntaxNode& n) {
    for (;;) {
      SyntaxNode decl{"variable_declarator", {}, {}};
      decl.children.push_back(expect_ident());
      parse_dims_into(decl);
      if (is("=")) {
        decl.children.push_back(take());
        if (add(decl, parse_variable_initializer())) return add(n, std::move(decl));
      }
      n.children.push_back(std::move(decl));
      if (!is(",")) break;
      n.children.push_back(take());
    }
    return false;
  }

  SyntaxNode parse_variable_initializer() {
    if (is("{")) return parse_array_initializer();
    return parse_expression();
  }

  SyntaxNode parse_array_initializer() {
    SyntaxNode n{"array_initializer", {}, {}};
    n.children.push_back(expect("{"));
    while (!is("}")) {
      if (add(n, parse_variable_initializer())) return n;
      if (!is(",")) break;
      n.children.push_back(take());
    }
    n.children.push_back(expect("}"));
    return n;
  }

  SyntaxNode parse_local_variable_declaration(bool with_semicolon) {
    SyntaxNode n{"local_variable_declaration", {}, {}};
    SyntaxNode mods = parse_modifiers();
    if (!mods.children.empty()) n.children.push_back(std::move(mods));
    n.children.push_back(parse_type());
    if (parse_declarators_into(n)) return n;
    if (with_semicolon) n.children.push_back(expect(";"));
    return n;
  }

  SyntaxNode parse_paren_expression() {
    SyntaxNode n{"parenthesized_expression", {}, {}};
    n.children.push_back(expect("("));
    if (add(n, parse_expression())) return n;
    n.children.push_back(expect(")"));
    return n;
  }

  SyntaxNode parse_block_statement() {
    if (is("{")) return parse_block();
    if (is(";")) return SyntaxNode{"empty_statement", {}, {take()}};
    {
      const Mark m = mark();
      SyntaxNode mods = parse_modifiers();
      if (at_type_declaration()) return parse_type_declaration(std::move(mods));
      reset(m);
    }
    if (is("if")) return parse_if();
    if (is("while")) {
      SyntaxNode n{"while_statement", {}, {take()}};
      if (add(n, parse_paren_expression())) return n;
      add(n, parse_statement());
      return n;
    }
    if (is("do")) {
      SyntaxNode n{"do_statement", {}, {take()}};
      if (add(n, parse_statement())) return n;
      n.children.push_back(expect("while"));
      if (add(n, parse_paren_expression())) return n;
      n.children.push_back(expect(";"));
      return n;
    }
    if (is("for")) return parse_for();
    if (is("try")) return parse_try();
    if (is("switch")) return parse_switch("switch_statement");
    if (is("return")) {
      SyntaxNode n{"return_statement", {}, {take()}};
      if (!is(";")) {
        if (add(n, parse_expression())) return n;
      }
      n.children.push_back(expect(";"));
      return n;
    }
    if (is("throw")) {
      SyntaxNode n{"throw_statement", {}, {take()}};
      if (add(n, parse_expression())) return n;
      n.children.push_back(expect(";"));
      return n;
    }
    if (is("break") || is("continue")) {
      SyntaxNode n{is("break") ? "break_statement" : "continue_statement", {}, {take()}};
      if (is_ident()) n.children.push_back(take());
      n.children.push_back(expect(";"));
      return n;
    }
    if (is("synchronized") && peek_is(1, "(")) {
      SyntaxNode n{"synchronized_statement", {}, {take()}};
      if (add(n, parse_paren_expression())) return n;
      add(n, parse_block());
      return n;
    }
    if (is("assert")) {
      SyntaxNode n{"assert_statement", {}, {take()}};
      if (add(n, parse_expression())) return n;
      if (is(":")) {
        n.children.push_back(take());
        if (add(n, parse_expression())) return n;
      }
      n.children.push_back(expect(";"));
      return n;
    }
    if (is_ident() && cur().text == "yield" && peek(1).kind != TokenKind::Operator &&
        !peek_is(1, "(") && !peek_is(1, ".") && !peek_is(1, "[") && !peek_is(1, ";")) {
      SyntaxNode n{"yield_statement", {}, {take()}};
      if (add(n, parse_expression())) return n;
      n.children.push_back(expect(";"));
      return n;
    }
    if (is_ident() && peek_is(1, ":")) {
      SyntaxNode n{"labeled_statement", {}, {take(), take()}};
      add(n, parse_statement());
      return n;
    }
    if (looks_like_local_variable()) return parse_local_variable_declaration(true);
    SyntaxNode n{"expression_statement", {}, {}};
    if (add(n, parse_expression())) return n;
    n.children.push_back(expect(";"));
    return n;
  }

  // A statement in a position where declarations are not allowed.
  SyntaxNode parse_statement() { return parse_block_statement(); }

  SyntaxNode parse_if() {
    SyntaxNode n{"if_statement", {}, {take()}};
    if (add(n, parse_paren_expression())) return n;
    if (at_end()) {
      halt_or_fail("expected statement");
      return n;
    }
    if (add(n, parse_statement())) return n;
    if (is("else")) {
      n.children.push_back(take());
      if (at_end()) {
        halt_or_fail("expected statement");
        return n;
      }
      add(n, parse_statement());
    }
    return n;
  }

  bool looks_like_enhanced_for() {
    const Mark m = mark();
    bool ok = false;
    try {
      parse_modifiers();
      parse_type();
      ok = is_ident() && peek_is(1, ":");
    } catch (const SyntaxError&) {
      ok = false;
    }
    reset(m);
    return ok;
  }

  SyntaxNode parse_expression_list(std::string kind) {
    SyntaxNode n{std::move(kind), {}, {}};
    for (;;) {
      if (add(n, parse_expression())) return n;
      if (!is(",")) break;
      n.children.push_back(take());
    }
    return n;
  }

  SyntaxNode parse_for() {
    SyntaxNode forward = take();
    SyntaxNode open = expect("(");
    if (looks_like_enhanced_for()) {
      SyntaxNode n{"enhanced_for_statement", {}, {std::move(forward), std::move(open)}};
      SyntaxNode mods = parse_modifiers();
      if (!mods.children.empty()) n.children.push_back(std::move(mods));
      n.children.push_back(parse_type());
      n.children.push_back(expect_ident());
      n.children.push_back(expect(":"));
      if (add(n, parse_expression())) return n;
      n.children.push_back(expect(")"));
      add(n, parse_statement());
      return n;
    }
    SyntaxNode n{"for_statement", {}, {std::move(forward), std::move(open)}};
    if (!is(";")) {
      if (looks_like_local_variable()) {
        if (add(n, parse_local_variable_declaration(false))) return n;
      } else {
        if (add(n, parse_expression_list("for_init"))) return n;
      }
    }
    n.children.push_back(expect(";"));
    if (!is(";")) {
      if (add(n, parse_expression())) return n;
    }
    n.children.push_back(expect(";"));
    if (!is(")")) {
      if (add(n, parse_expression_list("for_update"))) return n;
    }
    n.children.push_back(expect(")"));
    add(n, parse_statement());
    return n;
  }

  SyntaxNode parse_try() {
    SyntaxNode n{"try_statement", {}, {take()}};
    if (is("(")) {
      n.kind = "try_with_resources_statement";
      SyntaxNode res{"resource_specification", {}, {take()}};
      while (!is(")")) {
        SyntaxNode r{"resource", {}, {}};
        if (looks_like_local_variable()) {
          SyntaxNode mods = parse_modifiers();
          if (!mods.children.empty()) r.children.push_back(std::move(mods));
          r.children.push_back(parse_type());
          r.children.push_back(expect_ident());
          r.children.push_back(expect("="));
          if (add(r, parse_expression())) return add(res, std::move(r)), add(n, std::move(res)), n;
        } else {
          if (add(r, parse_expression())) return add(res, std::move(r)), add(n, std::move(res)), n;
        }
        res.children.push_back(std::move(r));
        if (!is(";")) break;
        res.children.push_back(take());
      }
      res.children.push_back(expect(")"));
      n.children.push_back(std::move(res));
    }
    if (add(n, parse_block())) return n;
    while (is("catch")) {
      SyntaxNode c{"catch_clause", {}, {take(), expect("(")}};
      SyntaxNode param{"catch_formal_parameter", {}, {}};
      SyntaxNode mods = parse_modifiers();
      if (!mods.children.empty()) param.children.push_back(std::move(mods));
      param.children.push_back(parse_type());
      while (is("|")) {
        param.children.push_back(take());
        param.children.push_back(parse_type());
      }
      param.children.push_back(expect_ident());
      c.children.push_back(std::move(param));
      c.children.push_back(expect(")"));
      if (add(c, parse_block())) return add(n, std::move(c)), n;
      n.children.push_back(std::move(c));
    }
    if (is("finally")) {
      SyntaxNode f{"finally_clause", {}, {take()}};
      if (add(f, parse_block())) return add(n, std::move(f)), n;
      n.children.push_back(std::move(f));
    }
    if (n.children.size() == 2 && n.kind == "try_statement") {
      fail("try without catch or finally");
    }
    return n;
  }

  bool at_switch_label() {
    return is("case") || (is("default") && (peek_is(1, ":") || peek_is(1, "->")));
  }

  SyntaxNode parse_switch(std::string kind) {
    SyntaxNode n{std::move(kind), {}, {take()}};
    if (add(n, parse_paren_expression())) return n;
    SyntaxNode body{"switch_block", {}, {expect("{")}};
    parse_list(body, [this] { return is("}"); }, [this] { return parse_switch_group(); });
    if (halted_) return add(n, std::move(body)), n;
    if (at_end()) {
      halt_or_fail("expected '}'");
      return add(n, std::move(body)), n;
    }
    body.children.push_back(expect("}"));
    n.children.push_back(std::move(body));
    return n;
  }

  SyntaxNode parse_switch_group() {
    SyntaxNode label{"switch_label", {}, {}};
    if (is("default")) {
      label.children.push_back(take());
    } else {
      label.children.push_back(expect("case"));
      for (;;) {
        if (is("default")) {
          label.children.push_back(take());
        } else {
          label.children.push_back(parse_ternary());
        }
        if (!is(",")) break;
        label.children.push_back(take());
      }
    }
    if (is("->")) {
      SyntaxNode rule{"switch_rule", {}, {std::move(label), take()}};
      if (is("{")) {
        add(rule, parse_block());
      } else if (is("throw")) {
        add(rule, parse_block_statement());
      } else {
        SyntaxNode stmt{"expression_statement", {}, {}};
        if (add(stmt, parse_expression())) return add(rule, std::move(stmt)), rule;
        stmt.children.push_back(expect(";"));
        rule.children.push_back(std::move(stmt));
      }
      return rule;
    }
    label.children.push_back(expect(":"));
    SyntaxNode group{"switch_group", {}, {std::move(label)}};
    parse_list(group, [this] { return is("}") || at_switch_label(); },
               [this] { return parse_block_statement(); });
    return group;
  }

  // ---- expressions --------------------------------------------------------

  SyntaxNode parse_expression() { return parse_assignment(); }

  bool lambda_ahead() {
    if (is_ident() && peek_is(1, "->")) return true;
    if (!is("(")) return false;
    std::size_t depth = 0;
    for (std::size_t k = pos_; k < toks_.size(); ++k) {
      const auto& t = toks_[k];
      if (t.kind != TokenKind::Separator) continue;
      if (t.text == "(") ++depth;
      if (t.text == ")" && --depth == 0) {
        return k + 1 < toks_.size() && toks_[k + 1].text == "->";
      }
    }
    return false;
  }

  SyntaxNode parse_lambda() {
    SyntaxNode n{"lambda_expression", {}, {}};
    if (is_ident()) {
      n.children.push_back(SyntaxNode{"lambda_parameters", {}, {take()}});
    } else if (peek_is(1, ")") ||
               (peek(1).kind == TokenKind::Identifier && (peek_is(2, ",") || peek_is(2, ")")))) {
      SyntaxNode params{"lambda_parameters", {}, {take()}};
      while (!is(")")) {
        params.children.push_back(expect_ident());
        if (!is(",")) break;
        params.children.push_back(take());
      }
      params.children.push_back(expect(")"));
      n.children.push_back(std::move(params));
    } else {
      n.children.push_back(SyntaxNode{"lambda_parameters", {}, {parse_formal_parameters()}});
    }
    n.children.push_back(expect("->"));
    if (is("{")) {
      add(n, parse_block());
    } else {
      add(n, parse_expression());
    }
    return n;
  }

  SyntaxNode parse_assignment() {
    if (lambda_ahead()) return parse_lambda();
    SyntaxNode lhs = parse_ternary();
    if (halted_) return lhs;
    if (!at_end() && cur().kind == TokenKind::Operator && one_of(cur().text, kAssignmentOps)) {
      SyntaxNode n{"assignment_expression", {}, {std::move(lhs), take()}};
      add(n, parse_assignment());
      return n;
    }
    return lhs;
  }

  SyntaxNode parse_ternary() {
    SyntaxNode cond = parse_binary(0);
    if (halted_ || !is("?")) return cond;
    SyntaxNode n{"ternary_expression", {}, {std::move(cond), take()}};
    if (add(n, parse_expression())) return n;
    n.children.push_back(expect(":"));
    add(n, lambda_ahead() ? parse_lambda() : parse_ternary());
    return n;
  }

  SyntaxNode parse_binary(std::size_t level) {
    const auto& levels = binary_levels();
    if (level == levels.size()) return parse_unary();
    SyntaxNode lhs = parse_binary(level + 1);
    while (!halted_ && !at_end() &&
           (cur().kind == TokenKind::Operator || cur().kind == TokenKind::Keyword) &&
           one_of(cur().text, levels[level])) {
      if (cur().text == "instanceof") {
        SyntaxNode n{"instanceof_expression", {}, {std::move(lhs), take()}};
        if (is("final")) n.children.push_back(take());
        n.children.push_back(parse_type());
        if (is_ident()) n.children.push_back(take());  // pattern binding
        lhs = std::move(n);
        continue;
      }
      SyntaxNode n{"binary_expression", {}, {std::move(lhs), take()}};
      add(n, parse_binary(level + 1));
      lhs = std::move(n);
    }
    return lhs;
  }

  bool looks_like_cast() {
    if (!is("(")) return false;
    const Mark m = mark();
    bool ok = false;
    try {
      take();
      const bool primitive = !at_end() && cur().kind == TokenKind::Keyword &&
                             is_primitive(cur().text);
      parse_type();
      while (is("&")) {
        take();
        parse_type();
      }
      expect(")");
      if (primitive) {
        ok = true;
      } else if (!at_end()) {
        const Token& next = cur();
        ok = next.kind == TokenKind::Identifier || is_literal() || is("(") || is("!") ||
             is("~") || is("this") || is("super") || is("new") || is("switch");
      }
    } catch (const SyntaxError&) {
      ok = false;
    }
    reset(m);
    return ok;
  }

  SyntaxNode parse_unary() {
    if (!at_end() && cur().kind == TokenKind::Operator &&
        (is("+") || is("-") || is("++") || is("--") || is("!") || is("~"))) {
      SyntaxNode n{"unary_expression", {}, {take()}};
      add(n, parse_unary());
      return n;
    }
    if (looks_like_cast()) {
      SyntaxNode n{"cast_expression", {}, {take(), parse_type()}};
      while (is("&")) {
        n.children.push_back(take());
        n.children.push_back(parse_type());
      }
      n.children.push_back(expect(")"));
      add(n, lambda_ahead() ? parse_lambda() : parse_unary());
      return n;
    }
    return parse_postfix();
  }

  SyntaxNode parse_arguments() {
    SyntaxNode n{"argument_list", {}, {expect("(")}};
    if (!is(")")) {
      for (;;) {
        if (add(n, parse_expression())) return n;
        if (!is(",")) break;
        n.children.push_back(take());
      }
    }
    n.children.push_back(expect(")"));
    return n;
  }

  SyntaxNode parse_postfix() {
    SyntaxNode expr = parse_primary();
    while (!halted_ && !at_end()) {
      if (is(".")) {
        SyntaxNode dot = take();
        if (is("new")) {
          SyntaxNode n{"qualified_creation_expression", {}, {std::move(expr), std::move(dot)}};
          add(n, parse_creation());
          expr = std::move(n);
          continue;
        }
        if (is("<")) {
          SyntaxNode n{"method_invocation", {}, {std::move(expr), std::move(dot)}};
          n.children.push_back(parse_type_arguments());
          n.children.push_back(expect_ident());
          add(n, parse_arguments());
          expr = std::move(n);
          continue;
        }
        if (is("this") || is("super") || is("class")) {
          expr = SyntaxNode{"field_access", {}, {std::move(expr), std::move(dot), take()}};
          continue;
        }
        SyntaxNode name = expect_ident();
        if (is("(")) {
          SyntaxNode n{"method_invocation", {}, {std::move(expr), std::move(dot), std::move(name)}};
          add(n, parse_arguments());
          expr = std::move(n);
        } else {
          expr = SyntaxNode{"field_access", {}, {std::move(expr), std::move(dot), std::move(name)}};
        }
        continue;
      }
      if (is("[")) {
        if (peek_is(1, "]")) {
          // Foo[].class or Foo[]::new
          SyntaxNode n{"array_type", {}, {std::move(expr)}};
          parse_dims_into(n);
          expr = std::move(n);
          continue;
        }
        SyntaxNode n{"array_access", {}, {std::move(expr), take()}};
        if (add(n, parse_expression())) return n;
        n.children.push_back(expect("]"));
        expr = std::move(n);
        continue;
      }
      if (is("++") || is("--")) {
        expr = SyntaxNode{"postfix_expression", {}, {std::move(expr), take()}};
        continue;
      }
      if (is("::")) {
        SyntaxNode n{"method_reference", {}, {std::move(expr), take()}};
        if (is("<")) n.children.push_back(parse_type_arguments());
        if (is("new")) {
          n.children.push_back(take());
        } else {
          n.children.push_back(expect_ident());
        }
        expr = std::move(n);
        continue;
      }
      break;
    }
    return expr;
  }

  SyntaxNode parse_primary() {
    if (at_end()) fail("expected expression");
    if (is_literal()) return take();
    if (is("this") || is("super")) {
      SyntaxNode kw = take();
      if (is("(")) {
        SyntaxNode n{"explicit_constructor_invocation", {}, {std::move(kw)}};
        add(n, parse_arguments());
        return n;
      }
      return kw;
    }
    if (is_ident()) {
      SyntaxNode id = take();
      if (is("(")) {
        SyntaxNode n{"method_invocation", {}, {std::move(id)}};
        add(n, parse_arguments());
        return n;
      }
      return SyntaxNode{"name", {}, {std::move(id)}};
    }
    if (is("(")) return parse_paren_expression();
    if (is("new")) return parse_creation();
    if (is("switch")) return parse_switch("switch_expression");
    if ((cur().kind == TokenKind::Keyword && is_primitive(cur().text)) || is("void")) {
      SyntaxNode n{"class_literal", {}, {take()}};
      parse_dims_into(n);
      if (is("::")) return n;  // int[]::new handled by the postfix loop
      n.children.push_back(expect("."));
      n.children.push_back(expect("class"));
      return n;
    }
    fail("expected expression");
  }

  SyntaxNode parse_creation() {
    SyntaxNode n{"object_creation_expression", {}, {expect("new")}};
    if (is("<")) n.children.push_back(parse_type_arguments());
    SyntaxNode type{"type", {}, {}};
    while (is("@")) type.children.push_back(parse_annotation());
    if (!at_end() && cur().kind == TokenKind::Keyword && is_primitive(cur().text)) {
      type.children.push_back(take());
    } else {
      type.children.push_back(expect_ident());
      if (is("<")) type.children.push_back(parse_type_arguments());
      while (is(".")) {
        type.children.push_back(take());
        type.children.push_back(expect_ident());
        if (is("<")) type.children.push_back(parse_type_arguments());
      }
    }
    n.children.push_back(std::move(type));
    if (is("[")) {
      n.kind = "array_creation_expression";
      bool sized = false;
      while (is("[")) {
        SyntaxNode dim{"dimension_expression", {}, {take()}};
        if (!is("]")) {
          if (add(dim, parse_expression())) return add(n, std::move(dim)), n;
          sized = true;
        }
        dim.children.push_back(expect("]"));
        n.children.push_back(std::move(dim));
      }
      if (!sized) {
        if (!is("{")) fail("expected array initializer");
        add(n, parse_array_initializer());
      }
      return n;
    }
    if (add(n, parse_arguments())) return n;
    if (is("{")) add(n, parse_class_body());
    return n;
  }
};

void collect_subtrees(const SyntaxNode& node, std::vector<std::string>& out) {
  if (node.children.empty()) return;
  std::string sig = node.kind;
  sig += '(';
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (i) sig += ' ';
    sig += node.children[i].kind;
  }
  sig += ')';
  out.push_back(std::move(sig));
  for (const auto& child : node.children) collect_subtrees(child, out);
}

// Flow-insensitive def-use extraction in textual order.
class DataflowWalker {
 public:
  std::vector<std::string> edges;

  void walk(const SyntaxNode& node, const SyntaxNode* parent) {
    const std::string& kind = node.kind;
    if (kind == "method_declaration" || kind == "constructor_declaration" ||
        kind == "compact_constructor_declaration") {
      auto saved = std::move(vars_);
      auto saved_next = next_placeholder_;
      vars_.clear();
      next_placeholder_ = 0;
      walk_children(node);
      vars_ = std::move(saved);
      next_placeholder_ = saved_next;
      return;
    }
    if (kind == "name") {
      use(node.children.front().text, parent ? parent->kind : std::string("root"));
      return;
    }
    if (kind == "variable_declarator") {
      for (std::size_t i = 1; i < node.children.size(); ++i) walk(node.children[i], &node);
      define(node.children.front().text);
      return;
    }
    if (kind == "formal_parameter" || kind == "catch_formal_parameter" ||
        kind == "resource" || kind == "instanceof_expression") {
      // Initializer or tested expression first, then the declared name.
      const SyntaxNode* declared = nullptr;
      for (const auto& child : node.children) {
        if (child.kind == "identifier") {
          declared = &child;
        } else {
          walk(child, &node);
        }
      }
      if (declared) define(declared->text);
      return;
    }
    if (kind == "enhanced_for_statement") {
      const SyntaxNode* declared = nullptr;
      for (const auto& child : node.children) {
        if (child.kind == "identifier" && !declared) {
          walk_subtree_after_colon(node);
          declared = &child;
          define(child.text);
          break;
        }
      }
      // Body and any remaining pieces after ')'.
      bool after_paren = false;
      for (const auto& child : node.children) {
        if (after_paren) walk(child, &node);
        if (child.kind == ")") after_paren = true;
      }
      return;
    }
    if (kind == "lambda_parameters") {
      for (const auto& child : node.children) {
        if (child.kind == "identifier") {
          define(child.text);
        } else {
          walk(child, &node);
        }
      }
      return;
    }
    if (kind == "assignment_expression" && node.children.size() == 3) {
      const SyntaxNode& lhs = node.children[0];
      const SyntaxNode& op = node.children[1];
      walk(node.children[2], &node);
      if (lhs.kind == "name") {
        if (op.text != "=") use(lhs.children.front().text, kind);
        define(lhs.children.front().text);
      } else {
        walk(lhs, &node);
      }
      return;
    }
    if ((kind == "unary_expression" || kind == "postfix_expression") &&
        node.children.size() == 2) {
      const bool prefix = kind == "unary_expression";
      const SyntaxNode& operand = prefix ? node.children[1] : node.children[0];
      const SyntaxNode& op = prefix ? node.children[0] : node.children[1];
      if ((op.text == "++" || op.text == "--") && operand.kind == "name") {
        use(operand.children.front().text, kind);
        define(operand.children.front().text);
        return;
      }
    }
    walk_children(node);
  }

 private:
  struct VarState {
    std::size_t placeholder;
    std::size_t defs;
  };
  std::map<std::string, VarState> vars_;
  std::size_t next_placeholder_ = 0;

  void walk_children(const SyntaxNode& node) {
    for (const auto& child : node.children) walk(child, &node);
  }

  // For `for (T x : expr)`, the iterated expression is evaluated first.
  void walk_subtree_after_colon(const SyntaxNode& node) {
    bool after_colon = false;
    for (const auto& child : node.children) {
      if (child.kind == ")" && after_colon) break;
      if (after_colon) walk(child, &node);
      if (child.kind == ":") after_colon = true;
    }
  }

  void define(const std::string& name) {
    auto it = vars_.find(name);
    if (it == vars_.end()) {
      vars_.emplace(name, VarState{next_placeholder_++, 1});
    } else {
      ++it->second.defs;
    }
  }

  void use(const std::string& name, const std::string& context) {
    auto it = vars_.find(name);
    if (it == vars_.end()) return;
    edges.push_back("v" + std::to_string(it->second.placeholder) + "#" +
                    std::to_string(it->second.defs) + "@" + context);
  }
};

}  // namespace

ParseResult parse_java(std::string_view source, ParseMode mode) {
  Parser parser(tokenize(source), source.size(), mode == ParseMode::Prefix);
  return parser.parse_program();
}

std::vector<std::string> subtree_signatures(const SyntaxNode& root) {
  std::vector<std::string> out;
  collect_subtrees(root, out);
  return out;
}

std::vector<std::string> dataflow_edges(const SyntaxNode& root) {
  DataflowWalker walker;
  walker.walk(root, nullptr);
  return std::move(walker.edges);
}

std::string to_sexpr(const SyntaxNode& node) {
  if (node.children.empty()) return node.text.empty() ? node.kind : node.text;
  std::string out = "(" + node.kind;
  for (const auto& child : node.children) out += " " + to_sexpr(child);
  out += ")";
  return out;
}

}  // namespace nl2fix::codesim
