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

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace liftmr::analysis {

using mj::Expr;
using mj::ExprKind;
using mj::Stmt;
using mj::StmtKind;
using mj::StmtList;
using mj::StmtPtr;
using mj::Type;

class AnalysisError : public Error {
public:
  using Error::Error;
};

enum class RejectReason {
  UnsupportedCall,
  UnstructuredControlFlow,
  NestedLoop,
  AliasingAssignment
};

inline const char *reason_name(RejectReason r) {
  switch (r) {
  case RejectReason::UnsupportedCall:
    return "unsupported-call";
  case RejectReason::UnstructuredControlFlow:
    return "unstructured-control-flow";
  case RejectReason::NestedLoop:
    return "nested-loop";
  case RejectReason::AliasingAssignment:
    return "aliasing-assignment";
  }
  return "?";
}

// One step into a statement list: take statement `index`, then descend into
// its body (branch 0) or else-branch (branch 1) for the following step.
struct PathStep {
  int index = 0;
  int branch = 0;
  bool operator==(const PathStep &) const = default;
};

struct Location {
  std::string function;
  int loop_index = 0; // pre-order among the function's loops
  std::vector<PathStep> path;
  SrcPos pos;

  std::string id() const {
    return function + ":L" + std::to_string(loop_index);
  }
};

using Binding = std::pair<std::string, Type>;

struct LoopFragment {
  std::string id;
  Location loc;
  StmtPtr loop; // canonical while(true)
  std::vector<Binding> scope; // enclosing bindings in declaration order
  std::string data_var;
  mj::Prim data_elem = mj::Prim::Int;
  std::int64_t stride = 1;
  std::string counter;
  std::size_t prelude = 0; // statements before the exit test
  StmtList function_body;
  std::vector<std::string> params;

  const Type *type_of(const std::string &name) const {
    for (const auto &[n, t] : scope)
      if (n == name)
        return &t;
    return nullptr;
  }
};

struct RejectionReport {
  Location loc;
  RejectReason reason = RejectReason::UnstructuredControlFlow;
  std::string detail;

  std::string str() const {
    return "fragment=" + loc.id() + " reason=" + reason_name(reason);
  }
};

struct Extraction {
  std::vector<LoopFragment> fragments;
  std::vector<RejectionReport> rejections;
};

inline bool whitelisted_call(const std::string &name) {
  return name == "length" || name == "get" || name == "put";
}

namespace detail {

inline bool contains_loop(const StmtList &body) {
  bool found = false;
  mj::walk_stmts(body, [&](const Stmt &s) {
    if (s.kind == StmtKind::While || s.kind == StmtKind::For)
      found = true;
  });
  return found;
}

inline void all_exprs(const StmtList &body,
                      const std::function<void(const Expr &)> &fn) {
  mj::walk_stmts(body, [&](const Stmt &s) {
    for (const auto &e : mj::stmt_exprs(s))
      mj::walk_expr(e, fn);
  });
}

inline bool is_var(const mj::ExprPtr &e, const std::string &name) {
  return e && e->kind == ExprKind::Var && e->name == name;
}

struct Shape {
  std::string counter, data;
  mj::Prim elem = mj::Prim::Int;
  std::int64_t stride = 0;
  std::size_t prelude = 0;
};

// Recognizes: prelude decls; if (!(c < length(d))) break; body; c = c + s;
inline std::optional<Shape> canonical_shape(const Stmt &loop,
                                            std::string *why = nullptr) {
  auto fail = [&](const char *msg) -> std::optional<Shape> {
    if (why)
      *why = msg;
    return std::nullopt;
  };
  if (loop.kind != StmtKind::While || !loop.cond ||
      loop.cond->kind != ExprKind::BoolLit || !loop.cond->bool_val)
    return fail("loop is not in while(true) form");
  const StmtList &b = loop.body;
  std::size_t k = 0;
  while (k < b.size() && b[k]->kind == StmtKind::Decl &&
         b[k]->decl_type.is_scalar())
    ++k;
  if (k >= b.size())
    return fail("no exit test");
  const Stmt &exit = *b[k];
  if (exit.kind != StmtKind::If || exit.has_else || exit.body.size() != 1 ||
      exit.body[0]->kind != StmtKind::Break)
    return fail("first statement is not the exit test");
  const Expr &c = *exit.cond;
  if (c.kind != ExprKind::Unary || c.un != mj::UnOp::Not)
    return fail("exit test is not a negated condition");
  const Expr &lt = *c.args[0];
  if (lt.kind != ExprKind::Binary || lt.bin != mj::BinOp::Lt ||
      lt.args[0]->kind != ExprKind::Var)
    return fail("exit condition is not counter < length(data)");
  const Expr &len = *lt.args[1];
  if (len.kind != ExprKind::Call || len.name != "length" ||
      len.args.size() != 1 || len.args[0]->kind != ExprKind::Var ||
      len.args[0]->type.kind != Type::Kind::Array)
    return fail("exit condition is not counter < length(data)");
  Shape sh;
  sh.counter = lt.args[0]->name;
  sh.data = len.args[0]->name;
  sh.elem = len.args[0]->type.elem;
  sh.prelude = k;
  if (b.size() < k + 2)
    return fail("no counter update");
  const Stmt &last = *b.back();
  if (last.kind != StmtKind::Assign || last.name != sh.counter ||
      last.value->kind != ExprKind::Binary || last.value->bin != mj::BinOp::Add)
    return fail("last statement is not the counter update");
  const auto &a0 = last.value->args[0];
  const auto &a1 = last.value->args[1];
  if (is_var(a0, sh.counter) && a1->kind == ExprKind::IntLit)
    sh.stride = a1->int_val;
  else if (is_var(a1, sh.counter) && a0->kind == ExprKind::IntLit)
    sh.stride = a0->int_val;
  else
    return fail("stride is not a literal");
  if (sh.stride < 1)
    return fail("stride is not positive");
  return sh;
}

} // namespace detail

// Checks the four admission criteria in a fixed order. `scope` supplies the
// types of variables declared outside the loop.
inline std::optional<std::pair<RejectReason, std::string>>
check_criteria(const Stmt &loop, const std::vector<Binding> &scope) {
  using R = RejectReason;
  if (detail::contains_loop(loop.body))
    return std::make_pair(R::NestedLoop, std::string("loop contains a loop"));
  std::optional<std::string> bad_call;
  detail::all_exprs(loop.body, [&](const Expr &e) {
    if (e.kind == ExprKind::Call && !whitelisted_call(e.name) && !bad_call)
      bad_call = e.name;
  });
  if (bad_call)
    return std::make_pair(R::UnsupportedCall, "call to '" + *bad_call + "'");
  std::optional<std::string> alias;
  mj::walk_stmts(loop.body, [&](const Stmt &s) {
    if (alias)
      return;
    if (s.kind == StmtKind::Assign && s.value->type.is_collection())
      alias = s.name;
    if (s.kind == StmtKind::Decl && s.decl_type.is_collection() && s.value)
      alias = s.name;
  });
  if (alias)
    return std::make_pair(R::AliasingAssignment,
                          "collection assignment to '" + *alias + "'");
  std::string why;
  auto shape = detail::canonical_shape(loop, &why);
  if (!shape)
    return std::make_pair(R::UnstructuredControlFlow, why);
  int breaks = 0;
  bool returns = false;
  int counter_writes = 0;
  bool data_written = false;
  mj::walk_stmts(loop.body, [&](const Stmt &s) {
    if (s.kind == StmtKind::Break)
      ++breaks;
    if (s.kind == StmtKind::Return)
      returns = true;
    if ((s.kind == StmtKind::Assign || s.kind == StmtKind::Decl) &&
        s.name == shape->counter)
      ++counter_writes;
    if (s.kind == StmtKind::Store && s.name == shape->data)
      data_written = true;
  });
  if (breaks != 1)
    return std::make_pair(R::UnstructuredControlFlow,
                          std::string("break other than the exit test"));
  if (returns)
    return std::make_pair(R::UnstructuredControlFlow,
                          std::string("return inside the loop"));
  if (counter_writes != 1)
    return std::make_pair(R::UnstructuredControlFlow,
                          std::string("counter written inside the body"));
  if (data_written)
    return std::make_pair(R::UnstructuredControlFlow,
                          std::string("iterated collection is modified"));
  bool counter_ok = false, data_ok = false;
  for (const auto &[n, t] : scope) {
    if (n == shape->counter && t.kind == Type::Kind::Int)
      counter_ok = true;
    if (n == shape->data && t.kind == Type::Kind::Array)
      data_ok = true;
  }
  if (!counter_ok || !data_ok)
    return std::make_pair(R::UnstructuredControlFlow,
                          std::string("counter or data not declared before the loop"));
  return std::nullopt;
}

namespace detail {

class Extractor {
public:
  Extraction run(const mj::Program &p) {
    for (const auto &f : p.functions) {
      fn_ = f.name;
      body_ = f.body;
      params_.clear();
      for (const auto &prm : f.params)
        params_.push_back(prm.name);
      loops_ = 0;
      std::vector<Binding> scope;
      for (const auto &prm : f.params)
        scope.emplace_back(prm.name, prm.type);
      std::vector<PathStep> path;
      list(f.body, scope, path);
    }
    return std::move(out_);
  }

private:
  Extraction out_;
  std::string fn_;
  StmtList body_;
  std::vector<std::string> params_;
  int loops_ = 0;

  void list(const StmtList &body, std::vector<Binding> scope,
            std::vector<PathStep> &path) {
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Stmt &s = *body[i];
      path.push_back({static_cast<int>(i), 0});
      if (s.kind == StmtKind::While || s.kind == StmtKind::For)
        loop(body[i], scope, path);
      else if (s.kind == StmtKind::Block)
        list(s.body, scope, path);
      else if (s.kind == StmtKind::If) {
        list(s.body, scope, path);
        path.back().branch = 1;
        list(s.orelse, scope, path);
      }
      path.pop_back();
      if (s.kind == StmtKind::Decl)
        scope.emplace_back(s.name, s.decl_type);
    }
  }

  void loop(const StmtPtr &sp, const std::vector<Binding> &scope,
            std::vector<PathStep> &path) {
    Location loc{fn_, loops_++, path, sp->pos};
    auto verdict = check_criteria(*sp, scope);
    if (verdict) {
      out_.rejections.push_back({loc, verdict->first, verdict->second});
    } else {
      auto sh = canonical_shape(*sp);
      LoopFragment f;
      f.id = loc.id();
      f.loc = loc;
      f.loop = sp;
      f.scope = scope;
      f.data_var = sh->data;
      f.data_elem = sh->elem;
      f.stride = sh->stride;
      f.counter = sh->counter;
      f.prelude = sh->prelude;
      f.function_body = body_;
      f.params = params_;
      out_.fragments.push_back(std::move(f));
    }
    // Inner loops are judged on their own.
    list(sp->body, scope, path);
  }
};

} // namespace detail

inline Extraction extract_fragments(const mj::Program &p) {
  return detail::Extractor().run(p);
}

struct SyntheticInput {
  std::string array;
  std::int64_t index = 0;
};

struct VarRoles {
  std::vector<std::string> inputs;  // data first, then scope order, then synthetic
  std::vector<std::string> outputs; // declaration order
  std::vector<std::string> locals;
  std::set<std::string> read_written;
  std::map<std::string, SyntheticInput> synthetic; // "a[2]" -> (a, 2)
  std::map<std::string, int> id_of;
  std::map<std::string, Type> types;

  bool is_input(const std::string &n) const {
    return std::find(inputs.begin(), inputs.end(), n) != inputs.end();
  }
  bool is_output(const std::string &n) const {
    return std::find(outputs.begin(), outputs.end(), n) != outputs.end();
  }
  bool is_local(const std::string &n) const {
    return std::find(locals.begin(), locals.end(), n) != locals.end();
  }
};

inline std::string synthetic_name(const std::string &array, std::int64_t idx) {
  return array + "[" + std::to_string(idx) + "]";
}

inline VarRoles classify_vars(const LoopFragment &f) {
  std::set<std::string> targets, reads, declared, dynamic_arrays;
  std::map<std::string, std::set<std::int64_t>> const_reads;
  std::map<std::string, Type> types;
  for (const auto &[n, t] : f.scope)
    types[n] = t;

  std::function<void(const mj::ExprPtr &)> read = [&](const mj::ExprPtr &e) {
    if (!e)
      return;
    if (e->kind == ExprKind::Var) {
      reads.insert(e->name);
      return;
    }
    if (e->kind == ExprKind::Index && e->args[0]->kind == ExprKind::Var) {
      const std::string &a = e->args[0]->name;
      if (e->args[1]->kind == ExprKind::IntLit) {
        const_reads[a].insert(e->args[1]->int_val);
      } else {
        dynamic_arrays.insert(a);
        reads.insert(a);
        read(e->args[1]);
      }
      return;
    }
    if (e->kind == ExprKind::Call && e->name == "put" && !e->args.empty() &&
        e->args[0]->kind == ExprKind::Var) {
      targets.insert(e->args[0]->name);
      for (std::size_t i = 1; i < e->args.size(); ++i)
        read(e->args[i]);
      return;
    }
    for (const auto &a : e->args)
      read(a);
  };

  mj::walk_stmts(f.loop->body, [&](const Stmt &s) {
    switch (s.kind) {
    case StmtKind::Decl:
      declared.insert(s.name);
      types[s.name] = s.decl_type;
      read(s.value);
      break;
    case StmtKind::Assign:
      targets.insert(s.name);
      read(s.value);
      break;
    case StmtKind::Store:
      targets.insert(s.name);
      read(s.index);
      read(s.value);
      break;
    default:
      for (const auto &e : mj::stmt_exprs(s))
        read(e);
      break;
    }
  });

  VarRoles r;
  std::set<std::string> locals = declared;
  locals.insert(f.counter);
  std::set<std::string> outputs;
  for (const auto &t : targets)
    if (!locals.count(t))
      outputs.insert(t);
  for (const auto &[a, idxs] : const_reads)
    if (!dynamic_arrays.count(a) && !outputs.count(a) && !locals.count(a))
      reads.erase(a);
    else
      reads.insert(a);

  for (const auto &[n, t] : f.scope)
    if (outputs.count(n))
      r.outputs.push_back(n);
  if (r.outputs.size() != outputs.size())
    throw AnalysisError("classification-impossible: output not in scope");
  for (const auto &o : r.outputs)
    if (reads.count(o))
      r.read_written.insert(o);

  std::set<std::string> input_set;
  for (const auto &n : reads)
    if (!locals.count(n) && !outputs.count(n))
      input_set.insert(n);
  if (input_set.count(f.data_var))
    r.inputs.push_back(f.data_var);
  for (const auto &[n, t] : f.scope)
    if (input_set.count(n) && n != f.data_var)
      r.inputs.push_back(n);
  for (const auto &[a, idxs] : const_reads) {
    if (dynamic_arrays.count(a) || outputs.count(a) || locals.count(a))
      continue;
    for (std::int64_t k : idxs) {
      std::string n = synthetic_name(a, k);
      r.inputs.push_back(n);
      r.synthetic[n] = {a, k};
      auto it = types.find(a);
      types[n] = it == types.end() ? Type::int_() : Type::prim(it->second.elem);
    }
  }
  for (const auto &n : input_set)
    if (std::find(r.inputs.begin(), r.inputs.end(), n) == r.inputs.end())
      throw AnalysisError("classification-impossible: input '" + n +
                          "' not in scope");

  if (locals.count(f.counter))
    r.locals.push_back(f.counter);
  for (const auto &n : declared)
    if (n != f.counter)
      r.locals.push_back(n);
  r.types = std::move(types);
  return r;
}

// Assigns ids 0..n-1 in declaration order.
inline VarRoles assign_var_ids(VarRoles roles) {
  if (roles.outputs.empty())
    throw AnalysisError("fragment has no outputs");
  roles.id_of.clear();
  for (std::size_t i = 0; i < roles.outputs.size(); ++i)
    roles.id_of[roles.outputs[i]] = static_cast<int>(i);
  return roles;
}

// Locates the statement a path points at.
inline const StmtPtr *resolve_path(const StmtList &body,
                                   const std::vector<PathStep> &path) {
  const StmtList *cur = &body;
  const StmtPtr *at = nullptr;
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto idx = static_cast<std::size_t>(path[i].index);
    if (idx >= cur->size())
      return nullptr;
    at = &(*cur)[idx];
    if (i + 1 < path.size())
      cur = path[i].branch == 0 ? &(*at)->body : &(*at)->orelse;
  }
  return at;
}

} // namespace liftmr::analysis
