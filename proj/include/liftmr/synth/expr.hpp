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
#include "liftmr/frontend/types.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace liftmr::synth {

using mj::BinOp;
using mj::Prim;

// Marks a trapped evaluation inside vectorized signatures.
constexpr std::int64_t kTrap = INT64_MIN;

// Interned strings. Every scalar is encoded as an int64: ints as themselves,
// bools as 0/1, strings as symbol ids.
class Symbols {
public:
  std::int64_t intern(const std::string &s) {
    auto it = ids_.find(s);
    if (it != ids_.end())
      return it->second;
    auto id = static_cast<std::int64_t>(names_.size());
    names_.push_back(s);
    ids_.emplace(s, id);
    return id;
  }
  std::int64_t find(const std::string &s) const {
    auto it = ids_.find(s);
    return it == ids_.end() ? -1 : it->second;
  }
  const std::string &name(std::int64_t id) const {
    return names_.at(static_cast<std::size_t>(id));
  }
  std::size_t size() const { return names_.size(); }

  std::int64_t encode(const mj::Scalar &s) {
    if (auto *i = std::get_if<std::int64_t>(&s))
      return *i;
    if (auto *b = std::get_if<bool>(&s))
      return *b ? 1 : 0;
    return intern(std::get<std::string>(s));
  }
  mj::Scalar decode(std::int64_t c, Prim p) const {
    switch (p) {
    case Prim::Int:
      return c;
    case Prim::Bool:
      return c != 0;
    case Prim::Str:
      return name(c);
    }
    return c;
  }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int64_t> ids_;
};

enum class SK : std::uint8_t {
  IntLit,
  BoolLit,
  StrLit,
  Counter,
  Input,
  Data,
  Bin,
  Not,
  Acc,  // fold accumulator `value`
  Elem  // fold element `v`
};

struct SExpr;
using SExprPtr = std::shared_ptr<const SExpr>;

struct SExpr {
  SK kind = SK::IntLit;
  Prim type = Prim::Int;
  BinOp op = BinOp::Add;
  std::int64_t ival = 0; // IntLit value, BoolLit 0/1, Input index
  std::string sval;      // StrLit text, Input / Counter name
  SExprPtr a, b;
};

inline SExprPtr s_int(std::int64_t v) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::IntLit;
  e->ival = v;
  return e;
}
inline SExprPtr s_bool(bool v) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::BoolLit;
  e->type = Prim::Bool;
  e->ival = v ? 1 : 0;
  return e;
}
inline SExprPtr s_str(std::string v) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::StrLit;
  e->type = Prim::Str;
  e->sval = std::move(v);
  return e;
}
inline SExprPtr s_counter(std::string name) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::Counter;
  e->sval = std::move(name);
  return e;
}
inline SExprPtr s_input(int index, std::string name, Prim t) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::Input;
  e->type = t;
  e->ival = index;
  e->sval = std::move(name);
  return e;
}
inline SExprPtr s_data(SExprPtr idx, Prim elem) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::Data;
  e->type = elem;
  e->a = std::move(idx);
  return e;
}
inline Prim binop_result(BinOp op) {
  return mj::is_arith(op) ? Prim::Int : Prim::Bool;
}
inline SExprPtr s_bin(BinOp op, SExprPtr l, SExprPtr r) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::Bin;
  e->op = op;
  e->type = binop_result(op);
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}
inline SExprPtr s_not(SExprPtr x) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::Not;
  e->type = Prim::Bool;
  e->a = std::move(x);
  return e;
}
inline SExprPtr s_acc(Prim t) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::Acc;
  e->type = t;
  return e;
}
inline SExprPtr s_elem(Prim t) {
  auto e = std::make_shared<SExpr>();
  e->kind = SK::Elem;
  e->type = t;
  return e;
}

inline int cost(const SExprPtr &e) {
  if (!e)
    return 0;
  return 1 + cost(e->a) + cost(e->b);
}

// Leaves have depth 1; indexing into data adds no depth.
inline int depth(const SExprPtr &e) {
  switch (e->kind) {
  case SK::Data:
    return depth(e->a);
  case SK::Bin:
    return 1 + std::max(depth(e->a), depth(e->b));
  case SK::Not:
    return 1 + depth(e->a);
  default:
    return 1;
  }
}

inline bool mentions(const SExprPtr &e, SK k) {
  if (!e)
    return false;
  return e->kind == k || mentions(e->a, k) || mentions(e->b, k);
}

inline bool equal(const SExprPtr &x, const SExprPtr &y) {
  if (!x || !y)
    return !x && !y;
  return x->kind == y->kind && x->type == y->type && x->op == y->op &&
         x->ival == y->ival && x->sval == y->sval && equal(x->a, y->a) &&
         equal(x->b, y->b);
}

inline std::string quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    out += c;
  }
  return out + "\"";
}

// Parenthesized prefix notation.
inline std::string to_prefix(const SExprPtr &e) {
  switch (e->kind) {
  case SK::IntLit:
    return std::to_string(e->ival);
  case SK::BoolLit:
    return e->ival ? "true" : "false";
  case SK::StrLit:
    return quote(e->sval);
  case SK::Counter:
  case SK::Input:
    return e->sval;
  case SK::Data:
    return "(data " + to_prefix(e->a) + ")";
  case SK::Bin:
    return std::string("(") + mj::binop_text(e->op) + " " + to_prefix(e->a) +
           " " + to_prefix(e->b) + ")";
  case SK::Not:
    return "(! " + to_prefix(e->a) + ")";
  case SK::Acc:
    return "value";
  case SK::Elem:
    return "v";
  }
  return "?";
}

// Infix MJ-like rendering with the given spelling for the leaves.
struct InfixNames {
  std::string data = "data";
  std::string acc = "value";
  std::string elem = "v";
};

inline std::string to_infix(const SExprPtr &e, const InfixNames &n = {},
                            int parent = 0) {
  switch (e->kind) {
  case SK::IntLit:
    return e->ival < 0 && parent > 0 ? "(" + std::to_string(e->ival) + ")"
                                     : std::to_string(e->ival);
  case SK::BoolLit:
    return e->ival ? "true" : "false";
  case SK::StrLit:
    return quote(e->sval);
  case SK::Counter:
  case SK::Input:
    return e->sval;
  case SK::Data:
    return n.data + "[" + to_infix(e->a, n, 0) + "]";
  case SK::Bin: {
    int p = mj::binop_prec(e->op);
    std::string s = to_infix(e->a, n, p) + " " + mj::binop_text(e->op) + " " +
                    to_infix(e->b, n, p + 1);
    return p < parent ? "(" + s + ")" : s;
  }
  case SK::Not:
    return "!" + to_infix(e->a, n, 7);
  case SK::Acc:
    return n.acc;
  case SK::Elem:
    return n.elem;
  }
  return "?";
}

// Scalar type checking against the expected leaf types.
struct TypeEnv {
  Prim data = Prim::Int;
  std::vector<Prim> inputs;
  Prim fold = Prim::Int;
};

inline bool well_typed(const SExprPtr &e, const TypeEnv &env) {
  switch (e->kind) {
  case SK::IntLit:
  case SK::Counter:
    return e->type == Prim::Int;
  case SK::BoolLit:
    return e->type == Prim::Bool;
  case SK::StrLit:
    return e->type == Prim::Str;
  case SK::Input:
    return e->ival >= 0 &&
           static_cast<std::size_t>(e->ival) < env.inputs.size() &&
           env.inputs[static_cast<std::size_t>(e->ival)] == e->type;
  case SK::Data:
    return e->type == env.data && e->a->type == Prim::Int &&
           !mentions(e->a, SK::Data) && well_typed(e->a, env);
  case SK::Not:
    return e->type == Prim::Bool && e->a->type == Prim::Bool &&
           well_typed(e->a, env);
  case SK::Acc:
  case SK::Elem:
    return e->type == env.fold;
  case SK::Bin: {
    if (!well_typed(e->a, env) || !well_typed(e->b, env))
      return false;
    if (e->type != binop_result(e->op))
      return false;
    if (mj::is_arith(e->op) || mj::is_order_cmp(e->op))
      return e->a->type == Prim::Int && e->b->type == Prim::Int;
    if (mj::is_logical(e->op))
      return e->a->type == Prim::Bool && e->b->type == Prim::Bool;
    return e->a->type == e->b->type;
  }
  }
  return false;
}

namespace detail {

inline bool arith(BinOp op, std::int64_t x, std::int64_t y, std::int64_t &r) {
  switch (op) {
  case BinOp::Add:
    return !__builtin_add_overflow(x, y, &r);
  case BinOp::Sub:
    return !__builtin_sub_overflow(x, y, &r);
  case BinOp::Mul:
    return !__builtin_mul_overflow(x, y, &r);
  case BinOp::Div:
    if (y == 0 || (x == INT64_MIN && y == -1))
      return false;
    r = x / y;
    return true;
  case BinOp::Mod:
    if (y == 0 || (x == INT64_MIN && y == -1))
      return false;
    r = x % y;
    return true;
  case BinOp::Lt:
    r = x < y;
    return true;
  case BinOp::Le:
    r = x <= y;
    return true;
  case BinOp::Gt:
    r = x > y;
    return true;
  case BinOp::Ge:
    r = x >= y;
    return true;
  case BinOp::Eq:
    r = x == y;
    return true;
  case BinOp::Ne:
    r = x != y;
    return true;
  case BinOp::And:
    r = x && y;
    return true;
  case BinOp::Or:
    r = x || y;
    return true;
  }
  return false;
}

} // namespace detail

struct EvalCtx {
  const std::int64_t *data = nullptr;
  std::int64_t len = 0;
  std::int64_t i = 0;
  const std::int64_t *inputs = nullptr;
  std::int64_t acc = 0;
  std::int64_t elem = 0;
};

// Flattened expression with string literals resolved to symbol ids.
class Compiled {
public:
  Compiled() = default;
  Compiled(const SExprPtr &e, Symbols &syms) { root_ = add(e, syms); }

  bool empty() const { return nodes_.empty(); }

  // Returns false on a trap.
  bool eval(const EvalCtx &c, std::int64_t &out) const {
    return run(root_, c, out);
  }

private:
  struct Node {
    SK kind;
    BinOp op;
    std::int64_t imm;
    int a, b;
  };
  std::vector<Node> nodes_;
  int root_ = -1;

  int add(const SExprPtr &e, Symbols &syms) {
    int a = e->a ? add(e->a, syms) : -1;
    int b = e->b ? add(e->b, syms) : -1;
    std::int64_t imm = e->ival;
    if (e->kind == SK::StrLit)
      imm = syms.intern(e->sval);
    nodes_.push_back({e->kind, e->op, imm, a, b});
    return static_cast<int>(nodes_.size()) - 1;
  }

  bool run(int k, const EvalCtx &c, std::int64_t &out) const {
    const Node &n = nodes_[static_cast<std::size_t>(k)];
    switch (n.kind) {
    case SK::IntLit:
    case SK::BoolLit:
    case SK::StrLit:
      out = n.imm;
      return true;
    case SK::Counter:
      out = c.i;
      return true;
    case SK::Input:
      out = c.inputs[n.imm];
      return true;
    case SK::Acc:
      out = c.acc;
      return true;
    case SK::Elem:
      out = c.elem;
      return true;
    case SK::Data: {
      std::int64_t idx;
      if (!run(n.a, c, idx) || idx < 0 || idx >= c.len)
        return false;
      out = c.data[idx];
      return true;
    }
    case SK::Not: {
      std::int64_t x;
      if (!run(n.a, c, x))
        return false;
      out = !x;
      return true;
    }
    case SK::Bin: {
      std::int64_t x, y;
      if (!run(n.a, c, x))
        return false;
      if (n.op == BinOp::And && !x) {
        out = 0;
        return true;
      }
      if (n.op == BinOp::Or && x) {
        out = 1;
        return true;
      }
      if (!run(n.b, c, y))
        return false;
      return detail::arith(n.op, x, y, out);
    }
    }
    return false;
  }
};

} // namespace liftmr::synth
