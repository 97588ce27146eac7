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
#include "liftmr/frontend/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace liftmr::mj {

enum class ExprKind : std::uint8_t {
  IntLit,
  BoolLit,
  StrLit,
  Var,
  Index,
  Unary,
  Binary,
  Call,
  NewArray,
  NewMap
};

enum class BinOp : std::uint8_t {
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  And,
  Or
};

enum class UnOp : std::uint8_t { Neg, Not };

inline const char *binop_text(BinOp op) {
  static const char *names[] = {"+", "-", "*",  "/",  "%",  "<", "<=",
                                ">", ">=", "==", "!=", "&&", "||"};
  return names[static_cast<int>(op)];
}

inline bool is_arith(BinOp op) { return op <= BinOp::Mod; }
inline bool is_order_cmp(BinOp op) {
  return op >= BinOp::Lt && op <= BinOp::Ge;
}
inline bool is_equality(BinOp op) {
  return op == BinOp::Eq || op == BinOp::Ne;
}
inline bool is_logical(BinOp op) {
  return op == BinOp::And || op == BinOp::Or;
}

// Binding strength used by the parser and the printer.
inline int binop_prec(BinOp op) {
  switch (op) {
  case BinOp::Or:
    return 1;
  case BinOp::And:
    return 2;
  case BinOp::Eq:
  case BinOp::Ne:
    return 3;
  case BinOp::Lt:
  case BinOp::Le:
  case BinOp::Gt:
  case BinOp::Ge:
    return 4;
  case BinOp::Add:
  case BinOp::Sub:
    return 5;
  default:
    return 6;
  }
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SrcPos pos;
  Type type; // void until typechecked
  std::int64_t int_val = 0;
  bool bool_val = false;
  std::string name; // Var name, Call callee, StrLit text
  BinOp bin = BinOp::Add;
  UnOp un = UnOp::Neg;
  Type alloc; // NewArray / NewMap
  // Index: base, index. Unary: operand. Binary: lhs, rhs. Call: arguments.
  // NewArray: length.
  std::vector<ExprPtr> args;
};

enum class StmtKind : std::uint8_t {
  Decl,
  Assign,
  Store,
  Eval,
  If,
  While,
  For,
  Break,
  Return,
  Block
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using StmtList = std::vector<StmtPtr>;

struct Stmt {
  StmtKind kind = StmtKind::Block;
  SrcPos pos;
  Type decl_type;   // Decl
  std::string name; // Decl / Assign / Store target
  ExprPtr value;    // Decl init, Assign/Store rhs, Eval, Return (nullable)
  ExprPtr index;    // Store
  ExprPtr cond;     // If / While / For (For: nullable)
  StmtList body;    // Block, If-then, While, For
  StmtList orelse;  // If-else
  bool has_else = false;
  StmtPtr init, step; // For (nullable)
};

struct Param {
  Type type;
  std::string name;
  SrcPos pos;
};

struct Function {
  Type ret;
  std::string name;
  std::vector<Param> params;
  StmtList body;
  SrcPos pos;
};

struct Program {
  std::vector<Function> functions;
  bool typed = false;
  bool normalized = false;

  const Function *find(const std::string &name) const {
    for (const auto &f : functions)
      if (f.name == name)
        return &f;
    return nullptr;
  }
};

// Node builders.

inline ExprPtr int_lit(std::int64_t v, SrcPos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->int_val = v;
  e->type = Type::int_();
  e->pos = pos;
  return e;
}

inline ExprPtr bool_lit(bool v, SrcPos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->bool_val = v;
  e->type = Type::bool_();
  e->pos = pos;
  return e;
}

inline ExprPtr str_lit(std::string v, SrcPos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::StrLit;
  e->name = std::move(v);
  e->type = Type::string();
  e->pos = pos;
  return e;
}

inline ExprPtr var_ref(std::string name, Type t = {}, SrcPos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  e->type = t;
  e->pos = pos;
  return e;
}

inline ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r, Type t = {},
                      SrcPos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->bin = op;
  e->args = {std::move(l), std::move(r)};
  e->type = t;
  e->pos = pos;
  return e;
}

inline ExprPtr unary(UnOp op, ExprPtr x, Type t = {}, SrcPos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->un = op;
  e->args = {std::move(x)};
  e->type = t;
  e->pos = pos;
  return e;
}

inline ExprPtr index_expr(ExprPtr base, ExprPtr idx, Type t = {},
                          SrcPos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Index;
  e->args = {std::move(base), std::move(idx)};
  e->type = t;
  e->pos = pos;
  return e;
}

inline ExprPtr call(std::string callee, std::vector<ExprPtr> args,
                    Type t = {}, SrcPos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Call;
  e->name = std::move(callee);
  e->args = std::move(args);
  e->type = t;
  e->pos = pos;
  return e;
}

inline StmtPtr decl_stmt(Type t, std::string name, ExprPtr init,
                         SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Decl;
  s->decl_type = t;
  s->name = std::move(name);
  s->value = std::move(init);
  s->pos = pos;
  return s;
}

inline StmtPtr assign_stmt(std::string name, ExprPtr v, SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assign;
  s->name = std::move(name);
  s->value = std::move(v);
  s->pos = pos;
  return s;
}

inline StmtPtr store_stmt(std::string name, ExprPtr idx, ExprPtr v,
                          SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Store;
  s->name = std::move(name);
  s->index = std::move(idx);
  s->value = std::move(v);
  s->pos = pos;
  return s;
}

inline StmtPtr eval_stmt(ExprPtr e, SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Eval;
  s->value = std::move(e);
  s->pos = pos;
  return s;
}

inline StmtPtr if_stmt(ExprPtr c, StmtList then, SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::If;
  s->cond = std::move(c);
  s->body = std::move(then);
  s->pos = pos;
  return s;
}

inline StmtPtr if_else_stmt(ExprPtr c, StmtList then, StmtList orelse,
                            SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::If;
  s->cond = std::move(c);
  s->body = std::move(then);
  s->orelse = std::move(orelse);
  s->has_else = true;
  s->pos = pos;
  return s;
}

inline StmtPtr while_stmt(ExprPtr c, StmtList body, SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::While;
  s->cond = std::move(c);
  s->body = std::move(body);
  s->pos = pos;
  return s;
}

inline StmtPtr break_stmt(SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Break;
  s->pos = pos;
  return s;
}

inline StmtPtr return_stmt(ExprPtr v, SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Return;
  s->value = std::move(v);
  s->pos = pos;
  return s;
}

inline StmtPtr block_stmt(StmtList body, SrcPos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Block;
  s->body = std::move(body);
  s->pos = pos;
  return s;
}

// Pre-order visit of every expression node below e.
inline void walk_expr(const ExprPtr &e,
                      const std::function<void(const Expr &)> &fn) {
  if (!e)
    return;
  fn(*e);
  for (const auto &a : e->args)
    walk_expr(a, fn);
}

// Pre-order visit of statements, descending into nested bodies.
inline void walk_stmts(const StmtList &list,
                       const std::function<void(const Stmt &)> &fn) {
  for (const auto &s : list) {
    fn(*s);
    if (s->init)
      walk_stmts({s->init}, fn);
    walk_stmts(s->body, fn);
    walk_stmts(s->orelse, fn);
    if (s->step)
      walk_stmts({s->step}, fn);
  }
}

// Every expression directly owned by a statement (not by nested statements).
inline std::vector<ExprPtr> stmt_exprs(const Stmt &s) {
  std::vector<ExprPtr> out;
  for (const auto &e : {s.index, s.value, s.cond})
    if (e)
      out.push_back(e);
  return out;
}

} // namespace liftmr::mj
