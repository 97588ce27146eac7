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

#include "liftmr/specgen/specgen.hpp"
#include "liftmr/synth/domain.hpp"

#include <array>
#include <map>
#include <unordered_map>
#include <vector>

namespace liftmr::synth {

using spec::GrammarSpec;

class ResourceLimit : public Error {
public:
  using Error::Error;
};

// Evaluation points of the counterexample cache: every index of every
// cached dataset.
struct PointSet {
  std::vector<std::size_t> sets; // domain dataset indices
  std::vector<std::size_t> base; // first point of each set
  std::vector<const Dataset *> ds; // per point
  std::vector<std::int64_t> idx;   // per point

  std::size_t size() const { return idx.size(); }

  void add(const Domain &dom, std::size_t di) {
    const Dataset &d = dom.datasets()[di];
    sets.push_back(di);
    base.push_back(idx.size());
    for (std::int64_t i = 0; i < d.len(); ++i) {
      ds.push_back(&d);
      idx.push_back(i);
    }
  }
  bool contains(std::size_t di) const {
    return std::find(sets.begin(), sets.end(), di) != sets.end();
  }
};

inline int prim_slot(Prim p) { return static_cast<int>(p); }

// Expressions of the grammar grouped by type and cost, in production order.
// With points, entries that agree on every point with an earlier entry of no
// greater depth are dropped.
class ExprBank {
public:
  struct Entry {
    SExprPtr e;
    Prim type;
    int cost;
    int depth;
    bool has_data;
  };

  ExprBank(const GrammarSpec &g, const Symbols &syms, const PointSet *pts,
           std::size_t max_cells = std::size_t{1} << 26)
      : g_(g), syms_(syms), pts_(pts), max_cells_(max_cells) {
    np_ = pts ? pts->size() : 0;
    for (BinOp op : g.ops)
      if (mj::is_arith(op))
        int_ops_.push_back(op);
      else
        bool_ops_.push_back(op);
    levels_.resize(3);
    for (auto &l : levels_)
      l.emplace_back(); // cost 0 is empty
  }

  const Entry &entry(int k) const { return entries_[static_cast<std::size_t>(k)]; }
  const std::int64_t *sig(int k) const {
    return sigs_.data() + static_cast<std::size_t>(k) * np_;
  }
  std::size_t size() const { return entries_.size(); }

  const std::vector<int> &level(Prim t, int c) {
    ensure(c);
    return levels_[static_cast<std::size_t>(prim_slot(t))]
                  [static_cast<std::size_t>(c)];
  }

  // True when no expression of any type has cost >= c.
  bool exhausted_from(int c) {
    ensure(c);
    int top = 0;
    for (int k = 1; k <= built_; ++k)
      for (const auto &l : levels_)
        if (!l[static_cast<std::size_t>(k)].empty())
          top = k;
    return c > top && built_ >= 2 * top + 2;
  }

  void ensure(int c) {
    while (built_ < c)
      build(++built_);
  }

private:
  const GrammarSpec &g_;
  const Symbols &syms_;
  const PointSet *pts_;
  std::size_t max_cells_;
  std::size_t np_ = 0;
  std::vector<BinOp> int_ops_, bool_ops_;
  std::vector<Entry> entries_;
  std::vector<std::int64_t> sigs_;
  std::vector<std::vector<std::vector<int>>> levels_; // [type][cost]
  std::unordered_map<std::uint64_t, std::vector<int>> seen_;
  std::vector<std::int64_t> scratch_;
  int built_ = 0;

  static std::uint64_t mix(std::uint64_t h, std::int64_t v) {
    h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) +
         (h >> 2);
    return h;
  }

  template <class F>
  void add(SExprPtr e, int cost, int depth, bool has_data, F &&point_value) {
    Prim t = e->type;
    auto &lvl = levels_[static_cast<std::size_t>(prim_slot(t))];
    while (lvl.size() <= static_cast<std::size_t>(cost))
      lvl.emplace_back();
    if (pts_) {
      scratch_.resize(np_);
      std::uint64_t h = static_cast<std::uint64_t>(t) + 1;
      for (std::size_t p = 0; p < np_; ++p) {
        scratch_[p] = point_value(p);
        h = mix(h, scratch_[p]);
      }
      auto &bucket = seen_[h];
      for (int k : bucket) {
        const Entry &o = entries_[static_cast<std::size_t>(k)];
        if (o.type == t && o.depth <= depth &&
            std::equal(scratch_.begin(), scratch_.end(), sig(k)))
          return;
      }
      if ((entries_.size() + 1) * std::max<std::size_t>(np_, 1) > max_cells_)
        throw ResourceLimit("expression bank exceeds its memory budget");
      bucket.push_back(static_cast<int>(entries_.size()));
      sigs_.insert(sigs_.end(), scratch_.begin(), scratch_.end());
    } else if (entries_.size() > max_cells_) {
      throw ResourceLimit("expression bank exceeds its size budget");
    }
    lvl[static_cast<std::size_t>(cost)].push_back(
        static_cast<int>(entries_.size()));
    entries_.push_back({std::move(e), t, cost, depth, has_data});
  }

  const std::vector<int> &lv(Prim t, int c) const {
    const auto &l = levels_[static_cast<std::size_t>(prim_slot(t))];
    static const std::vector<int> none;
    return static_cast<std::size_t>(c) < l.size()
               ? l[static_cast<std::size_t>(c)]
               : none;
  }

  void leaves() {
    for (auto v : g_.int_lits)
      add(s_int(v), 1, 1, false, [&](std::size_t) { return v; });
    add(s_counter(g_.counter), 1, 1, false,
        [&](std::size_t p) { return pts_->idx[p]; });
    for (std::size_t k = 0; k < g_.inputs.size(); ++k)
      if (g_.inputs[k].type == Prim::Int)
        add(s_input(static_cast<int>(k), g_.inputs[k].name, Prim::Int), 1, 1,
            false, [&](std::size_t p) { return pts_->ds[p]->inputs[k]; });
    for (const auto &s : g_.str_lits) {
      std::int64_t code = syms_.find(s);
      add(s_str(s), 1, 1, false, [&](std::size_t) { return code; });
    }
    for (std::size_t k = 0; k < g_.inputs.size(); ++k)
      if (g_.inputs[k].type == Prim::Str)
        add(s_input(static_cast<int>(k), g_.inputs[k].name, Prim::Str), 1, 1,
            false, [&](std::size_t p) { return pts_->ds[p]->inputs[k]; });
    for (bool b : g_.bool_lits)
      add(s_bool(b), 1, 1, false, [&](std::size_t) { return b ? 1 : 0; });
    for (std::size_t k = 0; k < g_.inputs.size(); ++k)
      if (g_.inputs[k].type == Prim::Bool)
        add(s_input(static_cast<int>(k), g_.inputs[k].name, Prim::Bool), 1, 1,
            false, [&](std::size_t p) { return pts_->ds[p]->inputs[k]; });
  }

  void data_level(int c) {
    // Copy: add() may grow the level vectors.
    std::vector<int> idxs = lv(Prim::Int, c - 1);
    for (int k : idxs) {
      Entry x = entries_[static_cast<std::size_t>(k)];
      if (x.has_data)
        continue;
      add(s_data(x.e, g_.data_elem), c, x.depth, true, [&](std::size_t p) {
        std::int64_t i = sig(k)[p];
        const Dataset &d = *pts_->ds[p];
        if (i == kTrap || i < 0 || i >= d.len())
          return kTrap;
        return d.data[static_cast<std::size_t>(i)];
      });
    }
  }

  void binary_level(BinOp op, Prim operand, int c) {
    for (int c1 = 1; c1 <= c - 2; ++c1) {
      int c2 = c - 1 - c1;
      std::vector<int> as = lv(operand, c1), bs = lv(operand, c2);
      for (int a : as)
        for (int b : bs) {
          Entry ea = entries_[static_cast<std::size_t>(a)];
          Entry eb = entries_[static_cast<std::size_t>(b)];
          int d = 1 + std::max(ea.depth, eb.depth);
          if (d > g_.recursion_bound)
            continue;
          add(s_bin(op, ea.e, eb.e), c, d, ea.has_data || eb.has_data,
              [&](std::size_t p) {
                std::int64_t x = sig(a)[p];
                if (x == kTrap)
                  return kTrap;
                if (op == BinOp::And && !x)
                  return std::int64_t{0};
                if (op == BinOp::Or && x)
                  return std::int64_t{1};
                std::int64_t y = sig(b)[p];
                if (y == kTrap)
                  return kTrap;
                std::int64_t r;
                if (!detail::arith(op, x, y, r) || r == kTrap)
                  return kTrap;
                return r;
              });
        }
    }
  }

  void build(int c) {
    if (c == 1) {
      leaves();
      return;
    }
    if (g_.data_elem == Prim::Int)
      data_level(c);
    for (BinOp op : int_ops_)
      binary_level(op, Prim::Int, c);
    if (g_.data_elem == Prim::Str)
      data_level(c);
    for (BinOp op : bool_ops_) {
      if (mj::is_logical(op)) {
        binary_level(op, Prim::Bool, c);
        continue;
      }
      binary_level(op, Prim::Int, c);
      if (mj::is_equality(op))
        binary_level(op, Prim::Str, c);
    }
    if (g_.allow_not) {
      std::vector<int> xs = lv(Prim::Bool, c - 1);
      for (int k : xs) {
        Entry x = entries_[static_cast<std::size_t>(k)];
        if (x.depth + 1 > g_.recursion_bound)
          continue;
        add(s_not(x.e), c, x.depth + 1, x.has_data, [&](std::size_t p) {
          std::int64_t v = sig(k)[p];
          return v == kTrap ? kTrap : std::int64_t{!v};
        });
      }
    }
    for (auto &l : levels_)
      if (l.size() <= static_cast<std::size_t>(c))
        l.resize(static_cast<std::size_t>(c) + 1);
  }
};

// Fold bodies over {value, v, literals} for one value type, by cost, keeping
// those that reference both value and v and pass the regrouping check for
// the given init.
class FoldBank {
public:
  struct Option {
    SExprPtr body;
    std::int64_t init;
    int cost; // 1 + body cost
  };

  FoldBank(const GrammarSpec &g, Prim type, std::vector<std::int64_t> inits,
           std::vector<std::int64_t> check_values)
      : g_(g), type_(type), inits_(std::move(inits)),
        values_(std::move(check_values)) {
    if (type == Prim::Int) {
      for (BinOp op : g.int_fold_ops())
        ops_.push_back(op);
    } else {
      for (BinOp op : GrammarSpec::bool_fold_ops())
        ops_.push_back(op);
    }
    levels_.emplace_back();
    options_.emplace_back();
  }

  // Options whose cost is exactly c, in production order then init order.
  const std::vector<Option> &options(int c) {
    ensure(c - 1);
    return options_[static_cast<std::size_t>(c)];
  }

  bool exhausted_from(int c) {
    ensure(c - 1);
    int top = 0;
    for (int k = 1; k <= built_; ++k)
      if (!levels_[static_cast<std::size_t>(k)].empty())
        top = k;
    return c - 1 > top && built_ >= 2 * top + 2;
  }

private:
  struct Node {
    SExprPtr e;
    int depth;
    bool acc, elem;
  };
  const GrammarSpec &g_;
  Prim type_;
  std::vector<std::int64_t> inits_, values_;
  std::vector<BinOp> ops_;
  std::vector<std::vector<Node>> levels_;    // by body cost
  std::vector<std::vector<Option>> options_; // by fold cost
  int built_ = 0;

  void ensure(int c) {
    while (built_ < c)
      build(++built_);
  }

  void build(int c) {
    std::vector<Node> lvl;
    if (c == 1) {
      lvl.push_back({s_acc(type_), 1, true, false});
      lvl.push_back({s_elem(type_), 1, false, true});
      if (type_ == Prim::Int)
        for (auto v : g_.int_lits)
          lvl.push_back({s_int(v), 1, false, false});
      else
        for (bool b : g_.bool_lits)
          lvl.push_back({s_bool(b), 1, false, false});
    } else {
      for (BinOp op : ops_)
        for (int c1 = 1; c1 <= c - 2; ++c1) {
          int c2 = c - 1 - c1;
          for (const auto &a : levels_[static_cast<std::size_t>(c1)])
            for (const auto &b : levels_[static_cast<std::size_t>(c2)]) {
              int d = 1 + std::max(a.depth, b.depth);
              if (d > g_.recursion_bound)
                continue;
              lvl.push_back({s_bin(op, a.e, b.e), d, a.acc || b.acc,
                             a.elem || b.elem});
            }
        }
      if (type_ == Prim::Bool && g_.allow_not)
        for (const auto &a : levels_[static_cast<std::size_t>(c - 1)])
          if (a.depth + 1 <= g_.recursion_bound)
            lvl.push_back({s_not(a.e), a.depth + 1, a.acc, a.elem});
    }
    std::vector<Option> opts;
    for (const auto &n : lvl) {
      if (!n.acc || !n.elem)
        continue;
      for (auto init : inits_)
        if (check_commutative_associative(n.e, init, values_))
          opts.push_back({n.e, init, c + 1});
    }
    levels_.push_back(std::move(lvl));
    while (options_.size() <= static_cast<std::size_t>(c + 1))
      options_.emplace_back();
    options_[static_cast<std::size_t>(c + 1)] = std::move(opts);
  }
};

// Emit statements for one output, by cost, in production order: unguarded
// before guarded, then by guard, key and value cost, then by entry order.
// With points, emits producing identical emissions everywhere are merged.
class EmitBank {
public:
  struct Entry {
    int guard; // bank entry or -1
    int key;   // bank entry or -1
    int value;
    int cost;
  };

  EmitBank(ExprBank &bank, const GrammarSpec &g, const OutputSlot &o,
           const PointSet *pts)
      : bank_(bank), g_(g), o_(o), pts_(pts) {
    levels_.emplace_back();
  }

  const Entry &entry(int k) const { return entries_[static_cast<std::size_t>(k)]; }

  const std::vector<int> &level(int c) {
    while (built_ < c)
      build(++built_);
    return levels_[static_cast<std::size_t>(c)];
  }

  int key_overhead() const { return o_.shape == OutShape::Scalar ? 1 : 2; }
  int min_cost() const { return o_.shape == OutShape::Scalar ? 3 : 5; }

  // An emit of cost c has a component of cost at least (c - 4) / 3.
  bool exhausted_from(int c) {
    int part = std::max(1, (c - 2) / 3);
    return c > 3 * part + 1 && bank_.exhausted_from(part);
  }

  // Emission of entry k at point p: 0 none, 1 pair, 2 trap.
  int emission(int k, std::size_t p, std::int64_t &key,
               std::int64_t &val) const {
    const Entry &e = entries_[static_cast<std::size_t>(k)];
    if (e.guard >= 0) {
      std::int64_t gv = bank_.sig(e.guard)[p];
      if (gv == kTrap)
        return 2;
      if (!gv)
        return 0;
    }
    key = 0;
    if (e.key >= 0) {
      key = bank_.sig(e.key)[p];
      if (key == kTrap)
        return 2;
    }
    val = bank_.sig(e.value)[p];
    if (val == kTrap)
      return 2;
    return 1;
  }

  Emit to_emit(int k) const {
    const Entry &e = entries_[static_cast<std::size_t>(k)];
    Emit out;
    out.output = o_.id;
    if (e.guard >= 0)
      out.guard = bank_.entry(e.guard).e;
    if (e.key >= 0)
      out.rest.push_back(bank_.entry(e.key).e);
    out.value = bank_.entry(e.value).e;
    return out;
  }

private:
  ExprBank &bank_;
  const GrammarSpec &g_;
  const OutputSlot &o_;
  const PointSet *pts_;
  std::vector<Entry> entries_;
  std::vector<std::vector<int>> levels_;
  std::unordered_map<std::uint64_t, std::vector<int>> seen_;
  int built_ = 0;

  Prim key_type() const {
    return o_.shape == OutShape::Map ? o_.key : Prim::Int;
  }

  std::uint64_t hash_of(int k) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t p = 0; p < pts_->size(); ++p) {
      std::int64_t key = 0, val = 0;
      int st = emission(k, p, key, val);
      h = (h ^ static_cast<std::uint64_t>(st)) * 1099511628211ULL;
      if (st == 1) {
        h = (h ^ static_cast<std::uint64_t>(key)) * 1099511628211ULL;
        h = (h ^ static_cast<std::uint64_t>(val)) * 1099511628211ULL;
      }
    }
    return h;
  }

  bool same(int a, int b) const {
    for (std::size_t p = 0; p < pts_->size(); ++p) {
      std::int64_t ka = 0, va = 0, kb = 0, vb = 0;
      int sa = emission(a, p, ka, va), sb = emission(b, p, kb, vb);
      if (sa != sb || (sa == 1 && (ka != kb || va != vb)))
        return false;
    }
    return true;
  }

  void push(const Entry &e, std::vector<int> &lvl) {
    int k = static_cast<int>(entries_.size());
    entries_.push_back(e);
    if (pts_) {
      auto &bucket = seen_[hash_of(k)];
      for (int o : bucket)
        if (same(o, k)) {
          entries_.pop_back();
          return;
        }
      bucket.push_back(k);
    }
    lvl.push_back(k);
  }

  void build(int c) {
    std::vector<int> lvl;
    const int ko = key_overhead();
    std::vector<int> guard_costs{0};
    if (g_.guards)
      for (int gc = 1; 1 + (1 + gc) + ko + 1 <= c; ++gc)
        guard_costs.push_back(gc);
    for (int gc : guard_costs) {
      int gpart = gc ? 1 + gc : 0;
      std::vector<int> gs = gc ? bank_.level(Prim::Bool, gc) : std::vector<int>{-1};
      int kmax = o_.shape == OutShape::Scalar ? 0 : c;
      for (int kc = o_.shape == OutShape::Scalar ? 0 : 1; kc <= kmax; ++kc) {
        int vc = c - 1 - gpart - ko - kc;
        if (vc < 1)
          break;
        std::vector<int> ks =
            kc ? bank_.level(key_type(), kc) : std::vector<int>{-1};
        std::vector<int> vs = bank_.level(o_.value, vc);
        for (int gi : gs)
          for (int ki : ks)
            for (int vi : vs)
              push({gi, ki, vi, c}, lvl);
      }
    }
    levels_.push_back(std::move(lvl));
  }
};

} // namespace liftmr::synth
