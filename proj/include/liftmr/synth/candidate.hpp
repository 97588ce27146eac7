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

#include "liftmr/synth/expr.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace liftmr::synth {

// Key of an emitted pair: the output id followed by up to two components.
struct Key {
  std::uint8_t arity = 1;
  std::array<std::int64_t, 3> c{};

  std::int64_t id() const { return c[0]; }
  bool operator==(const Key &o) const {
    return arity == o.arity && c == o.c;
  }
  bool operator<(const Key &o) const {
    if (arity != o.arity)
      return arity < o.arity;
    return c < o.c;
  }
};

struct KeyHash {
  std::size_t operator()(const Key &k) const {
    std::size_t h = k.arity;
    for (auto x : k.c)
      h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::size_t>(x);
    return h ^ (h >> 29);
  }
};

struct Emit {
  int output = 0;
  SExprPtr guard; // null when unconditional
  std::vector<SExprPtr> rest; // key components after the id
  SExprPtr value;

  int cost() const {
    int c = 1 + synth::cost(value);
    if (guard)
      c += 1 + synth::cost(guard);
    if (rest.empty())
      c += 1;
    else {
      c += 2;
      for (const auto &r : rest)
        c += synth::cost(r);
    }
    return c;
  }

  std::string str(const InfixNames &n = {}) const {
    std::string key = std::to_string(output);
    if (!rest.empty()) {
      key = "(" + key;
      for (const auto &r : rest)
        key += ", " + to_infix(r, n);
      key += ")";
    }
    std::string s = "emit(" + key + ", " + to_infix(value, n) + ")";
    if (guard)
      s = "if (" + to_infix(guard, n) + ") " + s;
    return s;
  }
};

struct Fold {
  int output = 0;
  Prim type = Prim::Int;
  std::int64_t init = 0; // encoded literal
  SExprPtr body;

  int cost() const { return 1 + synth::cost(body); }
};

struct LoopTerm {
  bool length = false;
  std::int64_t lit = 0;

  bool operator==(const LoopTerm &) const = default;
  std::string str(const std::string &data) const {
    return length ? "length(" + data + ")" : std::to_string(lit);
  }
  std::int64_t at(std::int64_t len) const { return length ? len : lit; }
};

// lo <= counter <= hi
struct LoopCounterExp {
  LoopTerm lo, hi;

  static constexpr int kCost = 5;
  bool holds(std::int64_t i, std::int64_t len) const {
    return lo.at(len) <= i && i <= hi.at(len);
  }
  std::string str(const std::string &counter, const std::string &data) const {
    return lo.str(data) + " <= " + counter + " <= " + hi.str(data);
  }
  bool operator==(const LoopCounterExp &) const = default;
};

struct Candidate {
  std::vector<Emit> emits;  // grouped by output id
  std::vector<Fold> folds;  // one per output, by id
  LoopCounterExp lce;

  int cost() const {
    int c = LoopCounterExp::kCost;
    for (const auto &e : emits)
      c += e.cost();
    for (const auto &f : folds)
      c += f.cost();
    return c;
  }

  const Fold *fold_for(int id) const {
    for (const auto &f : folds)
      if (f.output == id)
        return &f;
    return nullptr;
  }
};

using AssocArray = std::map<Key, std::int64_t>;

// Candidate compiled against a symbol table, shared by checking and the
// runtime.
class CompiledCandidate {
public:
  struct CEmit {
    int id;
    bool guarded;
    Compiled guard;
    std::vector<Compiled> rest;
    Compiled value;
  };
  struct CFold {
    bool present = false;
    std::int64_t init = 0;
    Compiled body;
  };

  CompiledCandidate() = default;
  CompiledCandidate(const Candidate &c, Symbols &syms) {
    for (const auto &e : c.emits) {
      CEmit ce{e.output, e.guard != nullptr, {}, {}, Compiled(e.value, syms)};
      if (e.guard)
        ce.guard = Compiled(e.guard, syms);
      for (const auto &r : e.rest)
        ce.rest.emplace_back(r, syms);
      emits_.push_back(std::move(ce));
    }
    for (const auto &f : c.folds) {
      auto id = static_cast<std::size_t>(f.output);
      if (folds_.size() <= id)
        folds_.resize(id + 1);
      folds_[id].present = true;
      folds_[id].init = f.init;
      folds_[id].body = Compiled(f.body, syms);
    }
  }

  const std::vector<CEmit> &emits() const { return emits_; }

  // Applies f_m at ctx.i. Returns false on a trap. The sink takes the key,
  // the value and optionally the emit position.
  template <class Sink> bool map_at(const EvalCtx &ctx, Sink &&sink) const {
    for (std::size_t n = 0; n < emits_.size(); ++n) {
      const auto &e = emits_[n];
      std::int64_t g = 1;
      if (e.guarded && !e.guard.eval(ctx, g))
        return false;
      if (!g)
        continue;
      Key k;
      k.arity = static_cast<std::uint8_t>(1 + e.rest.size());
      k.c[0] = e.id;
      for (std::size_t r = 0; r < e.rest.size(); ++r)
        if (!e.rest[r].eval(ctx, k.c[r + 1]))
          return false;
      std::int64_t v;
      if (!e.value.eval(ctx, v))
        return false;
      if constexpr (std::is_invocable_v<Sink, const Key &, std::int64_t,
                                        std::size_t>)
        sink(k, v, n);
      else
        sink(k, v);
    }
    return true;
  }

  bool has_fold(std::int64_t id) const {
    return id >= 0 && static_cast<std::size_t>(id) < folds_.size() &&
           folds_[static_cast<std::size_t>(id)].present;
  }
  std::int64_t init(std::int64_t id) const {
    return folds_[static_cast<std::size_t>(id)].init;
  }
  bool fold(std::int64_t id, std::int64_t acc, std::int64_t v,
            std::int64_t &out) const {
    EvalCtx c;
    c.acc = acc;
    c.elem = v;
    return folds_[static_cast<std::size_t>(id)].body.eval(c, out);
  }

private:
  std::vector<CEmit> emits_;
  std::vector<CFold> folds_;
};

// Applies f_m at every index below prefix, groups by key and folds each
// group in index order. Returns nullopt on a trap or an unknown key id.
inline std::optional<AssocArray>
eval_compiled(const CompiledCandidate &cc, const std::int64_t *data,
              std::int64_t len, std::int64_t prefix,
              const std::int64_t *inputs) {
  AssocArray out;
  EvalCtx ctx;
  ctx.data = data;
  ctx.len = len;
  ctx.inputs = inputs;
  bool ok = true;
  for (std::int64_t i = 0; i < prefix && ok; ++i) {
    ctx.i = i;
    ok = cc.map_at(ctx, [&](const Key &k, std::int64_t v) {
      if (!ok)
        return;
      if (!cc.has_fold(k.id())) {
        ok = false;
        return;
      }
      auto it = out.find(k);
      std::int64_t acc = it == out.end() ? cc.init(k.id()) : it->second;
      std::int64_t r;
      if (!cc.fold(k.id(), acc, v, r)) {
        ok = false;
        return;
      }
      out[k] = r;
    });
  }
  if (!ok)
    return std::nullopt;
  return out;
}

// Scalar-level entry point: data is an MJ array value and inputs are the
// template's scalar inputs in order.
using ScalarKey = std::vector<mj::Scalar>;
using ScalarAssoc = std::map<ScalarKey, mj::Scalar>;

inline std::optional<ScalarAssoc>
eval_candidate(const Candidate &c, const mj::Value &data, std::int64_t prefix,
               const std::vector<mj::Scalar> &inputs = {}) {
  Symbols syms;
  std::vector<std::int64_t> codes;
  Prim elem = Prim::Int;
  if (data.is_int_array()) {
    codes = data.int_array();
  } else {
    elem = Prim::Str;
    for (const auto &s : data.str_array())
      codes.push_back(syms.intern(s));
  }
  (void)elem;
  std::vector<std::int64_t> in;
  std::vector<Prim> in_types;
  for (const auto &s : inputs) {
    in.push_back(syms.encode(s));
    in_types.push_back(std::holds_alternative<std::int64_t>(s) ? Prim::Int
                       : std::holds_alternative<bool>(s)       ? Prim::Bool
                                                               : Prim::Str);
  }
  CompiledCandidate cc(c, syms);
  auto len = static_cast<std::int64_t>(codes.size());
  if (prefix < 0 || prefix > len)
    throw Error("prefix outside the collection");
  auto raw = eval_compiled(cc, codes.data(), len, prefix, in.data());
  if (!raw)
    return std::nullopt;
  std::map<int, Prim> key_type, val_type;
  for (const auto &e : c.emits)
    if (!e.rest.empty())
      key_type[e.output] = e.rest[0]->type;
  for (const auto &f : c.folds)
    val_type[f.output] = f.type;
  ScalarAssoc out;
  for (const auto &[k, v] : *raw) {
    int id = static_cast<int>(k.id());
    ScalarKey key{mj::Scalar(k.c[0])};
    for (int r = 1; r < k.arity; ++r)
      key.push_back(syms.decode(k.c[static_cast<std::size_t>(r)],
                                key_type.count(id) ? key_type[id] : Prim::Int));
    out[key] = syms.decode(v, val_type[id]);
  }
  return out;
}

// True iff folding from init is invariant under every permutation and every
// contiguous regrouping of value lists up to length 4 drawn from `values`.
// Regrouping folds each group from init and then folds the partial results.
inline bool check_commutative_associative(const SExprPtr &body,
                                          std::int64_t init,
                                          const std::vector<std::int64_t> &values,
                                          std::vector<std::int64_t> *witness =
                                              nullptr) {
  Symbols syms;
  Compiled f(body, syms);
  auto step = [&](std::int64_t acc, std::int64_t v, std::int64_t &out) {
    EvalCtx c;
    c.acc = acc;
    c.elem = v;
    return f.eval(c, out);
  };
  auto fold_all = [&](const std::int64_t *xs, std::size_t n,
                      std::int64_t &out) {
    std::int64_t acc = init;
    for (std::size_t k = 0; k < n; ++k)
      if (!step(acc, xs[k], acc))
        return false;
    out = acc;
    return true;
  };
  std::vector<std::int64_t> list;
  auto fail = [&]() {
    if (witness)
      *witness = list;
    return false;
  };
  const std::size_t nv = values.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k)
      total *= nv;
    list.assign(n, 0);
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      for (std::size_t k = 0; k < n; ++k) {
        list[k] = values[c % nv];
        c /= nv;
      }
      std::int64_t base;
      if (!fold_all(list.data(), n, base))
        return fail();
      for (std::size_t k = 0; k + 1 < n; ++k) {
        std::swap(list[k], list[k + 1]);
        std::int64_t r;
        bool ok = fold_all(list.data(), n, r);
        std::swap(list[k], list[k + 1]);
        if (!ok || r != base)
          return fail();
      }
      for (std::size_t mask = 1; mask < (std::size_t{1} << (n - 1)); ++mask) {
        std::int64_t acc = init;
        std::size_t start = 0;
        bool ok = true;
        for (std::size_t k = 0; k < n && ok; ++k) {
          bool cut = k + 1 == n || (mask >> k & 1);
          if (!cut)
            continue;
          std::int64_t part;
          ok = fold_all(list.data() + start, k + 1 - start, part) &&
               step(acc, part, acc);
          start = k + 1;
        }
        if (!ok || acc != base)
          return fail();
      }
    }
  }
  return true;
}

} // namespace liftmr::synth
