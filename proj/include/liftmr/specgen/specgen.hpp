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

#include "liftmr/analyzer/analyzer.hpp"
#include "liftmr/common/error.hpp"
#include "liftmr/frontend/types.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace liftmr::spec {

using analysis::LoopFragment;
using analysis::VarRoles;
using mj::BinOp;
using mj::Expr;
using mj::ExprKind;
using mj::Prim;
using mj::Scalar;
using mj::Stmt;
using mj::StmtKind;
using mj::StmtList;
using mj::Type;

class SpecError : public Error {
public:
  using Error::Error;
};

class PolicyExhausted : public Error {
public:
  using Error::Error;
};

enum class InitKind { Literal, Array, EmptyMap, Fresh };

struct InitValue {
  InitKind kind = InitKind::Fresh;
  Scalar lit = std::int64_t{0};       // Literal
  std::optional<std::int64_t> length; // Array
  Prim elem = Prim::Int;              // Array
  std::string fresh;                  // Fresh

  static InitValue literal(Scalar s) {
    InitValue v;
    v.kind = InitKind::Literal;
    v.lit = std::move(s);
    return v;
  }
  static InitValue zero_array(std::int64_t n, Prim e) {
    InitValue v;
    v.kind = InitKind::Array;
    v.length = n;
    v.elem = e;
    return v;
  }
  static InitValue empty_map() {
    InitValue v;
    v.kind = InitKind::EmptyMap;
    return v;
  }
  static InitValue fresh_symbol(std::string name) {
    InitValue v;
    v.kind = InitKind::Fresh;
    v.fresh = std::move(name);
    return v;
  }

  std::string str() const {
    switch (kind) {
    case InitKind::Literal:
      if (auto *s = std::get_if<std::string>(&lit))
        return "\"" + *s + "\"";
      return mj::scalar_str(lit);
    case InitKind::Array:
      return "[" + mj::scalar_str(mj::default_scalar(elem)) + ".." +
             mj::scalar_str(mj::default_scalar(elem)) + "](" +
             std::to_string(*length) + ")";
    case InitKind::EmptyMap:
      return "{}";
    case InitKind::Fresh:
      return fresh;
    }
    return "?";
  }

  bool operator==(const InitValue &) const = default;
};

struct Precondition {
  std::vector<std::pair<std::string, InitValue>> bindings;

  const InitValue *find(const std::string &name) const {
    for (const auto &[n, v] : bindings)
      if (n == name)
        return &v;
    return nullptr;
  }

  std::string str() const {
    std::string out;
    for (const auto &[n, v] : bindings) {
      if (!out.empty())
        out += " && ";
      out += n + " = " + v.str();
    }
    return out.empty() ? "true" : out;
  }
};

namespace detail {

// Folds an expression built from literals and traceable variables.
class Tracer {
public:
  explicit Tracer(const LoopFragment &f) {
    const StmtList *cur = &f.function_body;
    for (const auto &step : f.loc.path) {
      levels_.push_back({cur, static_cast<std::size_t>(step.index)});
      const Stmt &s = *(*cur)[static_cast<std::size_t>(step.index)];
      cur = step.branch == 0 ? &s.body : &s.orelse;
    }
  }

  // Value of `name` just before the loop, or nullopt when unknown.
  std::optional<InitValue> trace(const std::string &name) const {
    return trace_at(name, levels_.size(), levels_.back().at);
  }

private:
  struct Level {
    const StmtList *list;
    std::size_t at;
  };
  std::vector<Level> levels_;

  static bool writes(const StmtList &body, const std::string &name) {
    bool w = false;
    mj::walk_stmts(body, [&](const Stmt &s) {
      if ((s.kind == StmtKind::Decl || s.kind == StmtKind::Assign ||
           s.kind == StmtKind::Store) &&
          s.name == name)
        w = true;
      for (const auto &e : mj::stmt_exprs(s))
        mj::walk_expr(e, [&](const Expr &x) {
          if (x.kind == ExprKind::Call && x.name == "put" && !x.args.empty() &&
              x.args[0]->kind == ExprKind::Var && x.args[0]->name == name)
            w = true;
        });
    });
    return w;
  }

  // Searches backwards from statement `at` of level `depth - 1`.
  std::optional<InitValue> trace_at(const std::string &name, std::size_t depth,
                                    std::size_t at) const {
    while (depth > 0) {
      const Level &lv = levels_[depth - 1];
      for (std::size_t k = at; k-- > 0;) {
        const auto &sp = (*lv.list)[k];
        if (!writes({sp}, name))
          continue;
        if (sp->kind == StmtKind::Decl && sp->name == name)
          return decl_value(*sp, depth, k);
        if (sp->kind == StmtKind::Assign && sp->name == name)
          return const_eval(sp->value, depth, k);
        return std::nullopt;
      }
      if (depth >= 2) {
        const Level &up = levels_[depth - 2];
        const Stmt &owner = *(*up.list)[up.at];
        if (owner.kind == StmtKind::While || owner.kind == StmtKind::For)
          return std::nullopt;
      }
      --depth;
      if (depth > 0)
        at = levels_[depth - 1].at;
    }
    return std::nullopt;
  }

  std::optional<InitValue> decl_value(const Stmt &s, std::size_t depth,
                                      std::size_t at) const {
    const Type &t = s.decl_type;
    if (!s.value) {
      if (t.is_scalar())
        return InitValue::literal(mj::default_scalar(t.as_prim()));
      return std::nullopt;
    }
    const Expr &v = *s.value;
    if (v.kind == ExprKind::NewArray) {
      auto n = const_eval(v.args[0], depth, at);
      if (!n || n->kind != InitKind::Literal ||
          !std::holds_alternative<std::int64_t>(n->lit))
        return std::nullopt;
      std::int64_t len = std::get<std::int64_t>(n->lit);
      if (len < 0)
        return std::nullopt;
      return InitValue::zero_array(len, v.alloc.elem);
    }
    if (v.kind == ExprKind::NewMap)
      return InitValue::empty_map();
    return const_eval(s.value, depth, at);
  }

  std::optional<InitValue> const_eval(const mj::ExprPtr &e, std::size_t depth,
                                      std::size_t at) const {
    auto s = scalar_eval(e, depth, at);
    if (!s)
      return std::nullopt;
    return InitValue::literal(*s);
  }

  std::optional<Scalar> scalar_eval(const mj::ExprPtr &e, std::size_t depth,
                                    std::size_t at) const {
    switch (e->kind) {
    case ExprKind::IntLit:
      return Scalar(e->int_val);
    case ExprKind::BoolLit:
      return Scalar(e->bool_val);
    case ExprKind::StrLit:
      return Scalar(e->name);
    case ExprKind::Var: {
      auto v = trace_at(e->name, depth, at);
      if (!v || v->kind != InitKind::Literal)
        return std::nullopt;
      return v->lit;
    }
    case ExprKind::Unary: {
      auto x = scalar_eval(e->args[0], depth, at);
      if (!x)
        return std::nullopt;
      if (e->un == mj::UnOp::Not)
        return Scalar(!std::get<bool>(*x));
      std::int64_t r;
      if (__builtin_sub_overflow(std::int64_t{0}, std::get<std::int64_t>(*x),
                                 &r))
        return std::nullopt;
      return Scalar(r);
    }
    case ExprKind::Binary: {
      auto a = scalar_eval(e->args[0], depth, at);
      auto b = scalar_eval(e->args[1], depth, at);
      if (!a || !b)
        return std::nullopt;
      return binop(e->bin, *a, *b);
    }
    default:
      return std::nullopt;
    }
  }

  static std::optional<Scalar> binop(BinOp op, const Scalar &a,
                                     const Scalar &b) {
    if (op == BinOp::Eq)
      return Scalar(a == b);
    if (op == BinOp::Ne)
      return Scalar(a != b);
    if (op == BinOp::And)
      return Scalar(std::get<bool>(a) && std::get<bool>(b));
    if (op == BinOp::Or)
      return Scalar(std::get<bool>(a) || std::get<bool>(b));
    std::int64_t x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
    std::int64_t r = 0;
    switch (op) {
    case BinOp::Add:
      if (__builtin_add_overflow(x, y, &r))
        return std::nullopt;
      return Scalar(r);
    case BinOp::Sub:
      if (__builtin_sub_overflow(x, y, &r))
        return std::nullopt;
      return Scalar(r);
    case BinOp::Mul:
      if (__builtin_mul_overflow(x, y, &r))
        return std::nullopt;
      return Scalar(r);
    case BinOp::Div:
    case BinOp::Mod:
      if (y == 0 || (x == INT64_MIN && y == -1))
        return std::nullopt;
      return Scalar(op == BinOp::Div ? x / y : x % y);
    case BinOp::Lt:
      return Scalar(x < y);
    case BinOp::Le:
      return Scalar(x <= y);
    case BinOp::Gt:
      return Scalar(x > y);
    case BinOp::Ge:
      return Scalar(x >= y);
    default:
      return std::nullopt;
    }
  }
};

} // namespace detail

// Traces the initial values of outputs and counter backwards from loop
// entry. Unknown values become fresh symbols s0, s1, ... in output order.
inline Precondition gen_precondition(const LoopFragment &f,
                                     const VarRoles &roles) {
  detail::Tracer tracer(f);
  Precondition pre;
  int fresh = 0;
  auto bind = [&](const std::string &name) {
    auto v = tracer.trace(name);
    if (!v)
      v = InitValue::fresh_symbol("s" + std::to_string(fresh++));
    pre.bindings.emplace_back(name, *v);
  };
  for (const auto &o : roles.outputs)
    bind(o);
  bind(f.counter);
  return pre;
}

enum class OutShape { Scalar, Array, Map };

inline const char *shape_name(OutShape s) {
  switch (s) {
  case OutShape::Scalar:
    return "scalar";
  case OutShape::Array:
    return "array";
  case OutShape::Map:
    return "map";
  }
  return "?";
}

struct OutputSlot {
  std::string name;
  int id = 0;
  OutShape shape = OutShape::Scalar;
  Prim value = Prim::Int;
  Prim key = Prim::Int; // Map
  std::optional<std::int64_t> length; // Array
  InitValue init;

  // Fold init forced by the precondition, if any.
  std::optional<Scalar> fixed_init() const {
    if (init.kind == InitKind::Literal)
      return init.lit;
    if (init.kind == InitKind::Array)
      return mj::default_scalar(init.elem);
    return std::nullopt;
  }

  bool operator==(const OutputSlot &) const = default;
};

struct ScalarInput {
  std::string name;
  Prim type = Prim::Int;
  std::optional<analysis::SyntheticInput> element; // synthetic a[k]

  bool operator==(const ScalarInput &o) const {
    return name == o.name && type == o.type;
  }
};

struct SummaryTemplate {
  std::string fragment;
  std::string data_var;
  Prim data_elem = Prim::Int;
  std::string counter;
  std::int64_t stride = 1;
  std::vector<OutputSlot> outputs;
  std::vector<ScalarInput> inputs;
  Precondition pre;

  const OutputSlot *output(const std::string &name) const {
    for (const auto &o : outputs)
      if (o.name == name)
        return &o;
    return nullptr;
  }

  std::string conjunct(const OutputSlot &o, const std::string &coll) const {
    std::string red = "reduce(map(" + coll + ", f_m), f_r)";
    std::string id = std::to_string(o.id);
    switch (o.shape) {
    case OutShape::Scalar:
      return o.name + " = " + red + "[" + id + "]";
    case OutShape::Array:
      return "forall j in [0, " + o.name + ".length). " + o.name + "[j] = " +
             red + "[(" + id + ", j)]";
    case OutShape::Map:
      return "forall k. (k in " + o.name + " <-> (" + id + ", k) in " + red +
             ") && (k in " + o.name + " -> " + o.name + "[k] = " + red + "[(" +
             id + ", k)])";
    }
    return "";
  }

  std::string postcondition() const {
    std::string out;
    for (const auto &o : outputs)
      out += (out.empty() ? "" : " && ") + conjunct(o, data_var);
    return out;
  }

  std::string invariant() const {
    std::string out =
        "LoopCounterExp(" + counter + ")";
    for (const auto &o : outputs)
      out += " && " + conjunct(o, data_var + "[0:" + counter + "]");
    return out;
  }

  std::vector<std::string> statements() const {
    std::string cond = counter + " < length(" + data_var + ")";
    return {"preCondition(s) -> loopInvariant(s)",
            "loopInvariant(s) && " + cond + " -> loopInvariant(body(s))",
            "loopInvariant(s) && !(" + cond + ") -> postCondition(s)"};
  }

  std::string str() const {
    std::ostringstream os;
    os << "template v1\n";
    os << "fragment " << fragment << "\n";
    os << "data " << data_var << ":" << mj::prim_name(data_elem) << "[]\n";
    os << "counter " << counter << " stride " << stride << "\n";
    for (const auto &o : outputs) {
      os << "output " << o.id << " " << o.name << " " << shape_name(o.shape)
         << " " << mj::prim_name(o.value);
      if (o.shape == OutShape::Map)
        os << " key " << mj::prim_name(o.key);
      if (o.length)
        os << " length " << *o.length;
      os << "\n";
    }
    for (const auto &in : inputs)
      os << "input " << in.name << ":" << mj::prim_name(in.type) << "\n";
    os << "pre " << pre.str() << "\n";
    os << "post " << postcondition() << "\n";
    os << "inv " << invariant() << "\n";
    auto st = statements();
    for (std::size_t k = 0; k < st.size(); ++k)
      os << "vc" << k + 1 << " " << st[k] << "\n";
    return os.str();
  }
};

inline SummaryTemplate gen_template(const LoopFragment &f,
                                    const VarRoles &roles,
                                    const Precondition &pre) {
  if (roles.outputs.empty())
    throw SpecError("fragment has no outputs");
  SummaryTemplate t;
  t.fragment = f.id;
  t.data_var = f.data_var;
  t.data_elem = f.data_elem;
  t.counter = f.counter;
  t.stride = f.stride;
  t.pre = pre;
  for (const auto &name : roles.outputs) {
    const Type &ty = roles.types.at(name);
    OutputSlot o;
    o.name = name;
    o.id = roles.id_of.at(name);
    if (const auto *iv = pre.find(name))
      o.init = *iv;
    switch (ty.kind) {
    case Type::Kind::Int:
    case Type::Kind::Bool:
      o.shape = OutShape::Scalar;
      o.value = ty.as_prim();
      break;
    case Type::Kind::Array:
      if (ty.elem != Prim::Int)
        throw SpecError("unsupported output type " + ty.name() + " for '" +
                        name + "'");
      o.shape = OutShape::Array;
      o.value = Prim::Int;
      if (o.init.kind == InitKind::Array)
        o.length = o.init.length;
      break;
    case Type::Kind::Map:
      o.shape = OutShape::Map;
      o.key = ty.key;
      o.value = ty.val;
      break;
    default:
      throw SpecError("unsupported output type " + ty.name() + " for '" +
                      name + "'");
    }
    t.outputs.push_back(std::move(o));
  }
  for (const auto &in : roles.inputs) {
    if (in == f.data_var)
      continue;
    const Type &ty = roles.types.at(in);
    if (!ty.is_scalar())
      throw SpecError("collection input '" + in + "' is not supported");
    ScalarInput si{in, ty.as_prim(), std::nullopt};
    auto it = roles.synthetic.find(in);
    if (it != roles.synthetic.end())
      si.element = it->second;
    t.inputs.push_back(std::move(si));
  }
  return t;
}

// Literals and operators occurring in a fragment. The exit test contributes
// its comparison but not the negation wrapping it.
struct Harvest {
  std::set<std::int64_t> ints;
  std::set<std::string> strs;
  std::set<bool> bools;
  std::set<BinOp> ops;
  bool has_not = false;
};

inline Harvest harvest(const LoopFragment &f) {
  Harvest h;
  const Stmt *exit = f.loop->body[f.prelude].get();
  std::function<void(const mj::ExprPtr &)> visit = [&](const mj::ExprPtr &e) {
    if (!e)
      return;
    switch (e->kind) {
    case ExprKind::IntLit:
      h.ints.insert(e->int_val);
      return;
    case ExprKind::BoolLit:
      h.bools.insert(e->bool_val);
      return;
    case ExprKind::StrLit:
      h.strs.insert(e->name);
      return;
    case ExprKind::Binary:
      h.ops.insert(e->bin);
      break;
    case ExprKind::Unary:
      if (e->un == mj::UnOp::Not)
        h.has_not = true;
      else if (e->args[0]->kind == ExprKind::IntLit) {
        h.ints.insert(-e->args[0]->int_val);
        return;
      }
      break;
    default:
      break;
    }
    for (const auto &a : e->args)
      visit(a);
  };
  mj::walk_stmts(f.loop->body, [&](const Stmt &s) {
    if (&s == exit) {
      visit(s.cond->args[0]);
      return;
    }
    if (s.kind == StmtKind::Store)
      visit(s.index);
    if (s.kind != StmtKind::If && s.kind != StmtKind::While)
      visit(s.value);
    else
      visit(s.cond);
  });
  return h;
}

struct GrammarSpec {
  int iteration = 1;
  int recursion_bound = 2;
  int emit_budget = 1;
  std::set<BinOp> ops;
  bool allow_not = false;
  std::vector<std::int64_t> int_lits; // 0, 1, harvested ascending
  std::vector<std::string> str_lits;
  std::vector<bool> bool_lits;
  std::string data_var;
  Prim data_elem = Prim::Int;
  std::string counter;
  std::vector<ScalarInput> inputs;
  std::vector<OutputSlot> outputs;
  int max_key_arity = 2;
  bool guards = true;

  std::set<BinOp> int_fold_ops() const {
    std::set<BinOp> out{BinOp::Add};
    for (BinOp op : ops)
      if (mj::is_arith(op))
        out.insert(op);
    return out;
  }
  static std::set<BinOp> bool_fold_ops() { return {BinOp::And, BinOp::Or}; }

  bool has(BinOp op) const { return ops.count(op) > 0; }

  std::string str() const {
    std::ostringstream os;
    os << "grammar v1\n";
    os << "iteration " << iteration << "\n";
    os << "recursion-bound " << recursion_bound << "\n";
    os << "emit-budget " << emit_budget << "\n";
    os << "operators";
    for (BinOp op : ops)
      os << " " << mj::binop_text(op);
    if (allow_not)
      os << " !";
    os << "\nliterals.int";
    for (auto v : int_lits)
      os << " " << v;
    os << "\nliterals.str";
    for (const auto &s : str_lits)
      os << " \"" << s << "\"";
    os << "\nliterals.bool";
    for (bool b : bool_lits)
      os << (b ? " true" : " false");
    os << "\nterminals " << counter << ":int " << data_var << "["
       << mj::prim_name(data_elem) << "]";
    for (const auto &in : inputs)
      os << " " << in.name << ":" << mj::prim_name(in.type);
    os << "\n";
    for (const auto &o : outputs)
      os << "emit " << o.id << " key-arity "
         << (o.shape == OutShape::Scalar ? 1 : 2) << " value "
         << mj::prim_name(o.value) << "\n";
    os << "fold.int";
    for (BinOp op : int_fold_ops())
      os << " " << mj::binop_text(op);
    os << "\nfold.bool && ||\n";
    os << "loop-terms";
    for (auto v : int_lits)
      os << " " << v;
    os << " length(" << data_var << ")\n";
    os << "guards " << (guards ? "on" : "off") << "\n";
    return os.str();
  }
};

struct PolicyStep {
  enum class Kind { RaiseBound, AddOps, RaiseEmits };
  Kind kind = Kind::RaiseBound;
  std::vector<BinOp> ops;
  bool add_not = false;
};

// Each round is applied by one call to expand().
struct ExpansionPolicy {
  std::vector<std::vector<PolicyStep>> rounds;

  static ExpansionPolicy standard() {
    using K = PolicyStep::Kind;
    ExpansionPolicy p;
    p.rounds = {
        {{K::RaiseBound, {}, false},
         {K::AddOps, {BinOp::Mod, BinOp::Mul}, false},
         {K::AddOps, {BinOp::Eq}, false},
         {K::AddOps, {BinOp::And, BinOp::Or}, false}},
        {{K::RaiseEmits, {}, false}},
        {{K::RaiseBound, {}, false},
         {K::AddOps,
          {BinOp::Sub, BinOp::Div, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt,
           BinOp::Ge},
          true}},
        {{K::RaiseEmits, {}, false}},
    };
    return p;
  }

  int max_iteration() const { return static_cast<int>(rounds.size()) + 1; }
};

inline GrammarSpec expand(const GrammarSpec &g, const ExpansionPolicy &policy) {
  auto r = static_cast<std::size_t>(g.iteration - 1);
  if (r >= policy.rounds.size())
    throw PolicyExhausted("expansion policy exhausted at iteration " +
                          std::to_string(g.iteration));
  GrammarSpec out = g;
  for (const auto &step : policy.rounds[r]) {
    switch (step.kind) {
    case PolicyStep::Kind::RaiseBound:
      ++out.recursion_bound;
      break;
    case PolicyStep::Kind::RaiseEmits:
      ++out.emit_budget;
      break;
    case PolicyStep::Kind::AddOps:
      out.ops.insert(step.ops.begin(), step.ops.end());
      out.allow_not = out.allow_not || step.add_not;
      break;
    }
  }
  ++out.iteration;
  return out;
}

inline GrammarSpec gen_grammar(const LoopFragment &f, const VarRoles &roles,
                               const SummaryTemplate &t, int iteration = 1,
                               const ExpansionPolicy &policy =
                                   ExpansionPolicy::standard()) {
  (void)roles;
  Harvest h = harvest(f);
  GrammarSpec g;
  g.iteration = 1;
  g.recursion_bound = 2;
  g.emit_budget = static_cast<int>(t.outputs.size());
  g.ops = h.ops;
  g.allow_not = h.has_not;
  g.int_lits = {0, 1};
  for (auto v : h.ints)
    if (v != 0 && v != 1)
      g.int_lits.push_back(v);
  g.str_lits.assign(h.strs.begin(), h.strs.end());
  g.bool_lits.assign(h.bools.begin(), h.bools.end());
  g.data_var = f.data_var;
  g.data_elem = f.data_elem;
  g.counter = f.counter;
  g.inputs = t.inputs;
  g.outputs = t.outputs;
  while (g.iteration < iteration)
    g = expand(g, policy);
  return g;
}

} // namespace liftmr::spec
