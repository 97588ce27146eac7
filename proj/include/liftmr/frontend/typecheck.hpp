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

#include <map>
#include <set>
#include <string>
#include <vector>

namespace liftmr::mj {

// Builtins callable from MJ. The mr_* family only appears in rewritten
// programs, where it hands a loop over to the MapReduce runtime.
inline bool is_builtin(const std::string &name) {
  static const std::set<std::string> names = {
      "length", "get",     "put",     "mr_run",
      "mr_int", "mr_bool", "mr_cell", "mr_collect"};
  return names.count(name) > 0;
}

namespace detail {

class TypeChecker {
public:
  explicit TypeChecker(const Program &p) : prog_(p) {}

  Program run() {
    for (const auto &f : prog_.functions) {
      if (sigs_.count(f.name))
        throw TypeError(f.pos, "duplicate function '" + f.name + "'");
      if (is_builtin(f.name))
        throw TypeError(f.pos, "'" + f.name + "' is a builtin");
      sigs_[f.name] = &f;
    }
    const Function *main = prog_.find("main");
    if (!main)
      throw TypeError({1, 1}, "missing function 'main'");
    Program out;
    for (const auto &f : prog_.functions)
      out.functions.push_back(function(f));
    check_recursion();
    out.typed = true;
    out.normalized = prog_.normalized;
    return out;
  }

private:
  const Program &prog_;
  std::map<std::string, const Function *> sigs_;
  std::vector<std::map<std::string, Type>> scopes_;
  const Function *cur_ = nullptr;
  int loop_depth_ = 0;
  std::map<std::string, std::set<std::string>> calls_;

  static void check_type(const Type &t, SrcPos pos, bool allow_void = false) {
    if (t.malformed)
      throw TypeError(pos, "nested array/map type");
    if (t.is_void() && !allow_void)
      throw TypeError(pos, "void is only a return type");
    if (t.kind == Type::Kind::Map &&
        (t.key == Prim::Bool || t.val == Prim::Str))
      throw TypeError(pos, "unsupported map type " + t.name());
  }

  const Type *lookup(const std::string &name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end())
        return &f->second;
    }
    return nullptr;
  }

  void declare(const std::string &name, const Type &t, SrcPos pos) {
    if (lookup(name))
      throw TypeError(pos, "duplicate declaration of '" + name + "'");
    scopes_.back()[name] = t;
  }

  Function function(const Function &f) {
    cur_ = &f;
    check_type(f.ret, f.pos, true);
    scopes_.clear();
    scopes_.emplace_back();
    Function out = f;
    for (const auto &p : f.params) {
      check_type(p.type, p.pos);
      declare(p.name, p.type, p.pos);
    }
    out.body = stmts(f.body);
    scopes_.clear();
    return out;
  }

  StmtList stmts(const StmtList &in) {
    StmtList out;
    for (const auto &s : in)
      out.push_back(stmt(*s));
    return out;
  }

  StmtList scoped(const StmtList &in) {
    scopes_.emplace_back();
    StmtList out = stmts(in);
    scopes_.pop_back();
    return out;
  }

  static void expect(const Type &got, const Type &want, SrcPos pos) {
    if (!(got == want))
      throw TypeError(pos, "type mismatch: expected " + want.name() +
                               ", got " + got.name());
  }

  StmtPtr stmt(const Stmt &s) {
    auto out = std::make_shared<Stmt>(s);
    switch (s.kind) {
    case StmtKind::Decl:
      check_type(s.decl_type, s.pos);
      if (s.value) {
        out->value = expr(s.value);
        expect(out->value->type, s.decl_type, s.value->pos);
      }
      declare(s.name, s.decl_type, s.pos);
      break;
    case StmtKind::Assign: {
      const Type *t = lookup(s.name);
      if (!t)
        throw TypeError(s.pos, "use of undeclared variable '" + s.name + "'");
      out->value = expr(s.value);
      expect(out->value->type, *t, s.value->pos);
      break;
    }
    case StmtKind::Store: {
      const Type *t = lookup(s.name);
      if (!t)
        throw TypeError(s.pos, "use of undeclared variable '" + s.name + "'");
      if (t->kind != Type::Kind::Array)
        throw TypeError(s.pos, "'" + s.name + "' is not an array");
      out->index = expr(s.index);
      expect(out->index->type, Type::int_(), s.index->pos);
      out->value = expr(s.value);
      expect(out->value->type, Type::prim(t->elem), s.value->pos);
      break;
    }
    case StmtKind::Eval:
      if (s.value->kind != ExprKind::Call)
        throw TypeError(s.pos, "expression statement must be a call");
      out->value = expr(s.value, true);
      break;
    case StmtKind::If:
      out->cond = expr(s.cond);
      expect(out->cond->type, Type::bool_(), s.cond->pos);
      out->body = scoped(s.body);
      out->orelse = scoped(s.orelse);
      break;
    case StmtKind::While:
      out->cond = expr(s.cond);
      expect(out->cond->type, Type::bool_(), s.cond->pos);
      ++loop_depth_;
      out->body = scoped(s.body);
      --loop_depth_;
      break;
    case StmtKind::For:
      scopes_.emplace_back();
      if (s.init)
        out->init = stmt(*s.init);
      if (s.cond) {
        out->cond = expr(s.cond);
        expect(out->cond->type, Type::bool_(), s.cond->pos);
      }
      if (s.step)
        out->step = stmt(*s.step);
      ++loop_depth_;
      out->body = scoped(s.body);
      --loop_depth_;
      scopes_.pop_back();
      break;
    case StmtKind::Break:
      if (loop_depth_ == 0)
        throw TypeError(s.pos, "break outside of a loop");
      break;
    case StmtKind::Return:
      if (s.value) {
        if (cur_->ret.is_void())
          throw TypeError(s.pos, "void function returns a value");
        out->value = expr(s.value);
        expect(out->value->type, cur_->ret, s.value->pos);
      } else if (!cur_->ret.is_void()) {
        throw TypeError(s.pos, "missing return value");
      }
      break;
    case StmtKind::Block:
      out->body = scoped(s.body);
      break;
    }
    return out;
  }

  ExprPtr expr(const ExprPtr &in, bool allow_void = false) {
    auto e = std::make_shared<Expr>(*in);
    switch (in->kind) {
    case ExprKind::IntLit:
      e->type = Type::int_();
      break;
    case ExprKind::BoolLit:
      e->type = Type::bool_();
      break;
    case ExprKind::StrLit:
      e->type = Type::string();
      break;
    case ExprKind::Var: {
      const Type *t = lookup(in->name);
      if (!t)
        throw TypeError(in->pos,
                        "use of undeclared variable '" + in->name + "'");
      e->type = *t;
      break;
    }
    case ExprKind::Index: {
      e->args[0] = expr(in->args[0]);
      e->args[1] = expr(in->args[1]);
      const Type &bt = e->args[0]->type;
      if (bt.kind == Type::Kind::Map)
        throw TypeError(in->pos, "maps are accessed with get/put");
      if (bt.kind != Type::Kind::Array)
        throw TypeError(in->pos, "indexing a non-array value");
      expect(e->args[1]->type, Type::int_(), in->args[1]->pos);
      e->type = Type::prim(bt.elem);
      break;
    }
    case ExprKind::Unary:
      e->args[0] = expr(in->args[0]);
      if (in->un == UnOp::Neg) {
        expect(e->args[0]->type, Type::int_(), in->args[0]->pos);
        e->type = Type::int_();
      } else {
        expect(e->args[0]->type, Type::bool_(), in->args[0]->pos);
        e->type = Type::bool_();
      }
      break;
    case ExprKind::Binary: {
      e->args[0] = expr(in->args[0]);
      e->args[1] = expr(in->args[1]);
      const Type &l = e->args[0]->type;
      const Type &r = e->args[1]->type;
      if (is_arith(in->bin)) {
        expect(l, Type::int_(), in->args[0]->pos);
        expect(r, Type::int_(), in->args[1]->pos);
        e->type = Type::int_();
      } else if (is_order_cmp(in->bin)) {
        expect(l, Type::int_(), in->args[0]->pos);
        expect(r, Type::int_(), in->args[1]->pos);
        e->type = Type::bool_();
      } else if (is_equality(in->bin)) {
        if (!l.is_scalar())
          throw TypeError(in->pos, "equality on non-scalar type " + l.name());
        expect(r, l, in->args[1]->pos);
        e->type = Type::bool_();
      } else {
        expect(l, Type::bool_(), in->args[0]->pos);
        expect(r, Type::bool_(), in->args[1]->pos);
        e->type = Type::bool_();
      }
      break;
    }
    case ExprKind::Call:
      for (auto &a : e->args)
        a = expr(a);
      e->type = call_type(*e);
      if (e->type.is_void() && !allow_void)
        throw TypeError(in->pos, "void call used as a value");
      break;
    case ExprKind::NewArray:
      check_type(in->alloc, in->pos);
      e->args[0] = expr(in->args[0]);
      expect(e->args[0]->type, Type::int_(), in->args[0]->pos);
      e->type = in->alloc;
      break;
    case ExprKind::NewMap:
      check_type(in->alloc, in->pos);
      e->type = in->alloc;
      break;
    }
    return e;
  }

  void arity(const Expr &e, std::size_t n) {
    if (e.args.size() != n)
      throw TypeError(e.pos, "'" + e.name + "' expects " + std::to_string(n) +
                                 " argument(s)");
  }

  void job_name(const Expr &e) {
    if (e.args.empty() || e.args[0]->kind != ExprKind::StrLit)
      throw TypeError(e.pos, "'" + e.name + "' expects a job name literal");
  }

  Type call_type(const Expr &e) {
    const std::string &n = e.name;
    if (n == "length") {
      arity(e, 1);
      if (!e.args[0]->type.is_collection())
        throw TypeError(e.pos, "length of a non-collection");
      return Type::int_();
    }
    if (n == "get" || n == "put") {
      arity(e, n == "get" ? 2 : 3);
      const Type &m = e.args[0]->type;
      if (m.kind != Type::Kind::Map)
        throw TypeError(e.pos, "'" + n + "' on a non-map");
      expect(e.args[1]->type, Type::prim(m.key), e.args[1]->pos);
      if (n == "get")
        return Type::prim(m.val);
      expect(e.args[2]->type, Type::prim(m.val), e.args[2]->pos);
      return Type::void_();
    }
    if (n == "mr_run") {
      job_name(e);
      return Type::void_();
    }
    if (n == "mr_int" || n == "mr_bool") {
      arity(e, 2);
      job_name(e);
      expect(e.args[1]->type, Type::int_(), e.args[1]->pos);
      return n == "mr_int" ? Type::int_() : Type::bool_();
    }
    if (n == "mr_cell") {
      arity(e, 3);
      job_name(e);
      expect(e.args[1]->type, Type::int_(), e.args[1]->pos);
      expect(e.args[2]->type, Type::int_(), e.args[2]->pos);
      return Type::int_();
    }
    if (n == "mr_collect") {
      arity(e, 3);
      job_name(e);
      expect(e.args[1]->type, Type::int_(), e.args[1]->pos);
      if (e.args[2]->type.kind != Type::Kind::Map)
        throw TypeError(e.pos, "mr_collect target must be a map");
      return Type::void_();
    }
    auto it = sigs_.find(n);
    if (it == sigs_.end())
      throw TypeError(e.pos, "call to unknown function '" + n + "'");
    const Function &f = *it->second;
    arity(e, f.params.size());
    for (std::size_t i = 0; i < f.params.size(); ++i)
      expect(e.args[i]->type, f.params[i].type, e.args[i]->pos);
    calls_[cur_->name].insert(n);
    return f.ret;
  }

  void check_recursion() {
    std::map<std::string, int> state;
    std::function<void(const std::string &)> visit = [&](const std::string &n) {
      state[n] = 1;
      for (const auto &callee : calls_[n]) {
        if (state[callee] == 1)
          throw TypeError(sigs_[callee]->pos,
                          "recursion is not supported ('" + callee + "')");
        if (state[callee] == 0)
          visit(callee);
      }
      state[n] = 2;
    };
    for (const auto &f : prog_.functions)
      if (state[f.name] == 0)
        visit(f.name);
  }
};

} // namespace detail

inline Program typecheck(const Program &p) {
  return detail::TypeChecker(p).run();
}

} // namespace liftmr::mj
