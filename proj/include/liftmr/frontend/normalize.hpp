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

#include "liftmr/frontend/ast.hpp"

#include <set>
#include <string>

namespace liftmr::mj {

// Atoms are literals, variables, and length(var).
inline bool is_atom(const Expr &e) {
  switch (e.kind) {
  case ExprKind::IntLit:
  case ExprKind::BoolLit:
  case ExprKind::StrLit:
  case ExprKind::Var:
    return true;
  case ExprKind::Call:
    return e.name == "length" && e.args.size() == 1 &&
           e.args[0]->kind == ExprKind::Var;
  default:
    return false;
  }
}

namespace detail {

class Normalizer {
public:
  Program run(const Program &p) {
    Program out;
    out.typed = p.typed;
    out.normalized = true;
    for (const auto &f : p.functions) {
      used_.clear();
      next_ = 1;
      for (const auto &prm : f.params)
        used_.insert(prm.name);
      walk_stmts(f.body, [&](const Stmt &s) {
        if (s.kind == StmtKind::Decl)
          used_.insert(s.name);
      });
      Function nf = f;
      nf.body = list(f.body);
      out.functions.push_back(std::move(nf));
    }
    return out;
  }

private:
  std::set<std::string> used_;
  int next_ = 1;

  std::string fresh() {
    for (;;) {
      std::string n = "_t" + std::to_string(next_++);
      if (used_.insert(n).second)
        return n;
    }
  }

  ExprPtr atom(const ExprPtr &e, StmtList &out) {
    if (is_atom(*e))
      return e;
    ExprPtr s = simple(e, out);
    if (is_atom(*s))
      return s;
    std::string t = fresh();
    out.push_back(decl_stmt(e->type, t, s, e->pos));
    return var_ref(t, e->type, e->pos);
  }

  // At most one operator applied to atoms.
  ExprPtr simple(const ExprPtr &e, StmtList &out) {
    if (is_atom(*e))
      return e;
    auto n = std::make_shared<Expr>(*e);
    switch (e->kind) {
    case ExprKind::Binary:
      if (is_logical(e->bin))
        return short_circuit(e, out);
      n->args[0] = atom(e->args[0], out);
      n->args[1] = atom(e->args[1], out);
      return n;
    case ExprKind::Unary:
    case ExprKind::Index:
    case ExprKind::Call:
    case ExprKind::NewArray:
      for (auto &a : n->args)
        a = atom(a, out);
      return n;
    default:
      return e;
    }
  }

  // a && b  =>  bool t = a; if (t) { t = b; }
  // a || b  =>  bool t = a; if (!t) { t = b; }
  ExprPtr short_circuit(const ExprPtr &e, StmtList &out) {
    ExprPtr l = simple(e->args[0], out);
    std::string t = fresh();
    out.push_back(decl_stmt(Type::bool_(), t, l, e->pos));
    ExprPtr tv = var_ref(t, Type::bool_(), e->pos);
    StmtList then;
    ExprPtr r = simple(e->args[1], then);
    then.push_back(assign_stmt(t, r, e->pos));
    ExprPtr c = e->bin == BinOp::And ? tv : unary(UnOp::Not, tv, Type::bool_(), e->pos);
    out.push_back(if_stmt(c, std::move(then), e->pos));
    return tv;
  }

  StmtList list(const StmtList &in) {
    StmtList out;
    for (const auto &s : in)
      stmt(s, out);
    return out;
  }

  StmtList loop_body(const ExprPtr &cond, const StmtList &body,
                     const StmtPtr &step, SrcPos pos) {
    StmtList b;
    if (cond) {
      ExprPtr c = simple(cond, b);
      b.push_back(if_stmt(unary(UnOp::Not, c, Type::bool_(), cond->pos),
                          {break_stmt(cond->pos)}, cond->pos));
    }
    for (const auto &s : body)
      stmt(s, b);
    if (step)
      stmt(step, b);
    (void)pos;
    return b;
  }

  void stmt(const StmtPtr &s, StmtList &out) {
    auto n = std::make_shared<Stmt>(*s);
    switch (s->kind) {
    case StmtKind::Decl:
      if (s->value)
        n->value = simple(s->value, out);
      break;
    case StmtKind::Assign:
      n->value = simple(s->value, out);
      break;
    case StmtKind::Store:
      n->index = atom(s->index, out);
      n->value = simple(s->value, out);
      break;
    case StmtKind::Eval:
      n->value = simple(s->value, out);
      break;
    case StmtKind::Return:
      if (s->value)
        n->value = simple(s->value, out);
      break;
    case StmtKind::If:
      n->cond = simple(s->cond, out);
      n->body = list(s->body);
      n->orelse = list(s->orelse);
      break;
    case StmtKind::While:
      out.push_back(while_stmt(bool_lit(true, s->pos),
                               loop_body(s->cond, s->body, nullptr, s->pos),
                               s->pos));
      return;
    case StmtKind::For: {
      StmtList blk;
      if (s->init)
        stmt(s->init, blk);
      blk.push_back(while_stmt(bool_lit(true, s->pos),
                               loop_body(s->cond, s->body, s->step, s->pos),
                               s->pos));
      out.push_back(block_stmt(std::move(blk), s->pos));
      return;
    }
    case StmtKind::Block:
      n->body = list(s->body);
      break;
    case StmtKind::Break:
      break;
    }
    out.push_back(n);
  }
};

} // namespace detail

// Lowers every expression to at most one operator over atoms and every loop
// to while(true) { prelude; if (!(c)) break; body; step; }.
inline Program normalize(const Program &p) {
  return detail::Normalizer().run(p);
}

} // namespace liftmr::mj
