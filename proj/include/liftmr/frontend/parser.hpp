// Copyright 2026 The liftmr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "liftmr/common/error.hpp"
#include "liftmr/frontend/ast.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace liftmr::mj {

enum class Tok : std::uint8_t {
  End,
  Ident,
  Int,
  Str,
  Punct, // operators and delimiters, text in Token::text
  Keyword
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t int_val = 0;
  SrcPos pos;
};

inline bool is_keyword(std::string_view w) {
  static const char *kws[] = {"int",   "bool",  "string", "void", "map",
                              "if",    "else",  "for",    "while", "break",
                              "return", "true", "false",  "new"};
  for (const char *k : kws)
    if (w == k)
      return true;
  return false;
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char *puncts[] = {"==", "!=", "<=", ">=", "&&", "||", "+=",
                                 "-=", "*=", "/=", "%=", "++", "--", "(",
                                 ")",  "{",  "}",  "[",  "]",  ";",  ",",
                                 "=",  "+",  "-",  "*",  "/",  "%",  "<",
                                 ">",  "!"};
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n')
        advance(1);
      continue;
    }
    Token t;
    t.pos = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_'))
        ++j;
      t.text = std::string(src.substr(i, j - i));
      t.kind = is_keyword(t.text) ? Tok::Keyword : Tok::Ident;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      auto [p, ec] =
          std::from_chars(src.data() + i, src.data() + j, t.int_val);
      if (ec != std::errc())
        throw SyntaxError(t.pos, "integer literal out of range");
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n')
        ++j;
      if (j >= src.size() || src[j] != '"')
        throw SyntaxError(t.pos, "unterminated string literal");
      t.kind = Tok::Str;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char *p : puncts) {
      std::string_view pv(p);
      if (src.substr(i, pv.size()) == pv) {
        t.kind = Tok::Punct;
        t.text = std::string(pv);
        advance(pv.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched)
      throw SyntaxError(t.pos, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

namespace detail {

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End)
      p.functions.push_back(function());
    if (p.functions.empty())
      throw SyntaxError(peek().pos, "expected a function declaration");
    return p;
  }

private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  const Token &peek(std::size_t k = 0) const {
    return toks_[std::min(at_ + k, toks_.size() - 1)];
  }
  const Token &next() {
    const Token &t = toks_[at_];
    if (at_ + 1 < toks_.size())
      ++at_;
    return t;
  }
  bool is(const char *text, std::size_t k = 0) const {
    const Token &t = peek(k);
    return (t.kind == Tok::Punct || t.kind == Tok::Keyword) && t.text == text;
  }
  bool accept(const char *text) {
    if (is(text)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &expected) const {
    const Token &t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    if (t.kind == Tok::Str)
      got = "string literal";
    throw SyntaxError(t.pos, "expected " + expected + ", got " + got);
  }
  const Token &expect(const char *text) {
    if (!is(text))
      fail(std::string("'") + text + "'");
    return next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident)
      fail("identifier");
    return next().text;
  }

  bool at_type() const {
    return is("int") || is("bool") || is("string") || is("map");
  }

  Prim prim_or_mark(Type &t) {
    Type inner = type();
    if (!inner.is_scalar())
      t.malformed = true;
    return inner.as_prim();
  }

  Type type() {
    const Token &t = peek();
    Type out;
    if (accept("int")) {
      out = Type::int_();
    } else if (accept("bool")) {
      out = Type::bool_();
    } else if (accept("string")) {
      out = Type::string();
    } else if (accept("map")) {
      expect("<");
      Type m = Type::map(Prim::Int, Prim::Int);
      m.key = prim_or_mark(m);
      expect(",");
      m.val = prim_or_mark(m);
      expect(">");
      out = m;
    } else {
      throw SyntaxError(t.pos, "unknown type '" + t.text + "'");
    }
    while (is("[") && is("]", 1)) {
      next();
      next();
      if (out.kind == Type::Kind::Array || out.kind == Type::Kind::Map) {
        out.malformed = true;
      } else {
        Prim e = out.as_prim();
        bool bad = out.malformed || e == Prim::Bool;
        out = Type::array(e);
        out.malformed = bad;
      }
    }
    return out;
  }

  Function function() {
    Function f;
    f.pos = peek().pos;
    if (accept("void"))
      f.ret = Type::void_();
    else if (at_type())
      f.ret = type();
    else
      fail("return type");
    f.name = ident();
    expect("(");
    if (!is(")")) {
      do {
        Param p;
        p.pos = peek().pos;
        if (peek().kind == Tok::Ident)
          throw SyntaxError(p.pos, "unknown type '" + peek().text + "'");
        if (!at_type())
          fail("parameter type");
        p.type = type();
        p.name = ident();
        f.params.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    f.body = block();
    return f;
  }

  StmtList block() {
    expect("{");
    StmtList out;
    while (!is("}")) {
      if (peek().kind == Tok::End)
        fail("'}'");
      out.push_back(statement());
    }
    next();
    return out;
  }

  StmtList body_of() {
    if (is("{"))
      return block();
    return {statement()};
  }

  StmtPtr statement() {
    SrcPos pos = peek().pos;
    if (is("{"))
      return block_stmt(block(), pos);
    if (accept("if")) {
      expect("(");
      ExprPtr c = expr();
      expect(")");
      StmtList then = body_of();
      if (accept("else"))
        return if_else_stmt(c, std::move(then), body_of(), pos);
      return if_stmt(c, std::move(then), pos);
    }
    if (accept("while")) {
      expect("(");
      ExprPtr c = expr();
      expect(")");
      return while_stmt(c, body_of(), pos);
    }
    if (accept("for")) {
      expect("(");
      auto s = std::make_shared<Stmt>();
      s->kind = StmtKind::For;
      s->pos = pos;
      if (!is(";"))
        s->init = at_type() ? declaration() : simple();
      expect(";");
      if (!is(";"))
        s->cond = expr();
      expect(";");
      if (!is(")"))
        s->step = simple();
      expect(")");
      s->body = body_of();
      return s;
    }
    if (accept("break")) {
      expect(";");
      return break_stmt(pos);
    }
    if (accept("return")) {
      ExprPtr v;
      if (!is(";"))
        v = expr();
      expect(";");
      return return_stmt(v, pos);
    }
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Ident)
      throw SyntaxError(pos, "unknown type '" + peek().text + "'");
    StmtPtr s = at_type() ? declaration() : simple();
    expect(";");
    return s;
  }

  StmtPtr declaration() {
    SrcPos pos = peek().pos;
    Type t = type();
    std::string name = ident();
    ExprPtr init;
    if (accept("="))
      init = expr();
    return decl_stmt(t, name, init, pos);
  }

  // Assignment, compound assignment, increment, or a call statement.
  StmtPtr simple() {
    SrcPos pos = peek().pos;
    if (peek().kind == Tok::Ident && is("(", 1)) {
      ExprPtr c = expr();
      return eval_stmt(c, pos);
    }
    if (peek().kind != Tok::Ident)
      fail("statement");
    std::string name = next().text;
    ExprPtr idx;
    if (accept("[")) {
      idx = expr();
      expect("]");
    }
    auto current = [&]() -> ExprPtr {
      ExprPtr v = var_ref(name, {}, pos);
      return idx ? index_expr(v, idx, {}, pos) : v;
    };
    auto make = [&](ExprPtr rhs) -> StmtPtr {
      return idx ? store_stmt(name, idx, rhs, pos) : assign_stmt(name, rhs, pos);
    };
    if (accept("="))
      return make(expr());
    struct Compound {
      const char *tok;
      BinOp op;
    };
    static const Compound compounds[] = {{"+=", BinOp::Add},
                                         {"-=", BinOp::Sub},
                                         {"*=", BinOp::Mul},
                                         {"/=", BinOp::Div},
                                         {"%=", BinOp::Mod}};
    for (const auto &c : compounds)
      if (accept(c.tok))
        return make(binary(c.op, current(), expr(), {}, pos));
    if (accept("++"))
      return make(binary(BinOp::Add, current(), int_lit(1, pos), {}, pos));
    if (accept("--"))
      return make(binary(BinOp::Sub, current(), int_lit(1, pos), {}, pos));
    fail("assignment operator");
  }

  ExprPtr expr() { return binary_level(1); }

  static bool binop_of(const Token &t, BinOp &op) {
    if (t.kind != Tok::Punct)
      return false;
    static const std::pair<const char *, BinOp> table[] = {
        {"+", BinOp::Add},  {"-", BinOp::Sub},  {"*", BinOp::Mul},
        {"/", BinOp::Div},  {"%", BinOp::Mod},  {"<", BinOp::Lt},
        {"<=", BinOp::Le},  {">", BinOp::Gt},   {">=", BinOp::Ge},
        {"==", BinOp::Eq},  {"!=", BinOp::Ne},  {"&&", BinOp::And},
        {"||", BinOp::Or}};
    for (const auto &[text, o] : table)
      if (t.text == text) {
        op = o;
        return true;
      }
    return false;
  }

  ExprPtr binary_level(int prec) {
    if (prec > 6)
      return unary_expr();
    ExprPtr lhs = binary_level(prec + 1);
    for (;;) {
      BinOp op;
      if (!binop_of(peek(), op) || binop_prec(op) != prec)
        return lhs;
      SrcPos pos = next().pos;
      ExprPtr rhs = binary_level(prec + 1);
      lhs = binary(op, lhs, rhs, {}, pos);
    }
  }

  ExprPtr unary_expr() {
    SrcPos pos = peek().pos;
    if (accept("-"))
      return unary(UnOp::Neg, unary_expr(), {}, pos);
    if (accept("!"))
      return unary(UnOp::Not, unary_expr(), {}, pos);
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    while (is("[")) {
      SrcPos pos = next().pos;
      ExprPtr idx = expr();
      expect("]");
      e = index_expr(e, idx, {}, pos);
    }
    return e;
  }

  ExprPtr primary() {
    const Token &t = peek();
    SrcPos pos = t.pos;
    if (t.kind == Tok::Int) {
      std::int64_t v = next().int_val;
      return int_lit(v, pos);
    }
    if (t.kind == Tok::Str) {
      std::string v = next().text;
      return str_lit(v, pos);
    }
    if (accept("true"))
      return bool_lit(true, pos);
    if (accept("false"))
      return bool_lit(false, pos);
    if (accept("(")) {
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    if (accept("new")) {
      auto e = std::make_shared<Expr>();
      e->pos = pos;
      if (accept("map")) {
        expect("<");
        Type m = Type::map(Prim::Int, Prim::Int);
        m.key = prim_or_mark(m);
        expect(",");
        m.val = prim_or_mark(m);
        expect(">");
        expect("(");
        expect(")");
        e->kind = ExprKind::NewMap;
        e->alloc = m;
        return e;
      }
      Type elem;
      if (accept("int"))
        elem = Type::int_();
      else if (accept("string"))
        elem = Type::string();
      else if (accept("bool"))
        elem = Type::bool_();
      else
        fail("element type after 'new'");
      expect("[");
      ExprPtr n = expr();
      expect("]");
      Type arr = Type::array(elem.as_prim());
      if (elem.kind == Type::Kind::Bool)
        arr.malformed = true;
      while (is("[") && is("]", 1)) {
        next();
        next();
        arr.malformed = true;
      }
      e->kind = ExprKind::NewArray;
      e->alloc = arr;
      e->args = {n};
      return e;
    }
    if (t.kind == Tok::Ident) {
      std::string name = next().text;
      if (accept("(")) {
        std::vector<ExprPtr> args;
        if (!is(")")) {
          do {
            args.push_back(expr());
          } while (accept(","));
        }
        expect(")");
        return call(name, std::move(args), {}, pos);
      }
      return var_ref(name, {}, pos);
    }
    fail("expression");
  }
};

} // namespace detail

inline Program parse(std::string_view text) {
  detail::Parser p(lex(text));
  return p.program();
}

} // namespace liftmr::mj
