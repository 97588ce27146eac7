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
#include "liftmr/synth/bank.hpp"
#include "liftmr/synth/check.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <variant>

namespace liftmr::synth {

struct SynthConfig {
  DomainConfig domain;
  spec::ExpansionPolicy policy = spec::ExpansionPolicy::standard();
  std::optional<int> recursion_bound; // initial bound override
  std::optional<int> max_emits;       // initial emit budget override
  double timeout_s = 600;
  int workers = 1;
  std::uint64_t seed = 1;
  std::size_t seed_examples = 6;
};

struct SynthStats {
  std::size_t candidates = 0;
  std::size_t counterexamples = 0;
  std::size_t datasets = 0;
  int iteration = 0;
  double seconds = 0;
};

struct Summary {
  std::string fragment;
  Candidate candidate;
  SummaryTemplate tmpl;
  GrammarSpec grammar;
  DomainConfig domain;
  SynthStats stats;
};

struct GiveUp {
  std::string reason;
  SynthStats stats;
};

using SynthResult = std::variant<Summary, GiveUp>;

class SynthTimeout : public Error {
public:
  using Error::Error;
};

// One output's part of a candidate: its fold and its emits (EmitBank ids).
struct SubCandidate {
  FoldBank::Option fold;
  std::vector<int> emits;
  int cost = 0;
};

namespace detail {

inline std::vector<std::int64_t> fold_inits(const GrammarSpec &g,
                                            const OutputSlot &o,
                                            Symbols &syms) {
  if (auto fixed = o.fixed_init())
    return {syms.encode(*fixed)};
  if (o.value == Prim::Bool)
    return {0, 1};
  if (o.value == Prim::Int)
    return g.int_lits;
  return {};
}

// Per-output enumeration state: expression, emit and fold banks.
class OutputSpace {
public:
  OutputSpace(const GrammarSpec &g, const OutputSlot &o, ExprBank &bank,
              const PointSet *pts, std::vector<std::int64_t> inits,
              std::vector<std::int64_t> check_values, int max_emits)
      : o_(o), emits_(bank, g, o, pts),
        folds_(g, o.value, std::move(inits), std::move(check_values)),
        max_emits_(max_emits) {}

  EmitBank &emits() { return emits_; }
  FoldBank &folds() { return folds_; }
  const OutputSlot &slot() const { return o_; }
  int max_emits() const { return max_emits_; }

  int min_cost() const { return 4 + emits_.min_cost(); }

  // Upper bound on the cost of any sub-candidate.
  int max_cost() {
    if (!fold_top_)
      fold_top_ = top([&](int k) { return folds_.exhausted_from(k); });
    if (!emit_top_)
      emit_top_ = top([&](int k) { return emits_.exhausted_from(k); });
    return *fold_top_ + max_emits_ * *emit_top_;
  }

  // Visits sub-candidates of cost c in order: fold cost, fold order, emit
  // count, emit costs, emit order. Stops when visit returns false.
  bool visit(int c, const std::function<bool(const SubCandidate &)> &visit) {
    for (int fc = 4; fc + emits_.min_cost() <= c; ++fc) {
      const auto opts = folds_.options(fc);
      for (const auto &f : opts) {
        SubCandidate s{f, {}, c};
        for (int m = 1; m <= max_emits_; ++m)
          if (!tuples(c - fc, m, 0, 0, s, visit))
            return false;
      }
    }
    return true;
  }

private:
  const OutputSlot &o_;
  EmitBank emits_;
  FoldBank folds_;
  int max_emits_;
  std::optional<int> fold_top_, emit_top_;

  template <class F> static int top(F &&exhausted) {
    int c = 1;
    while (!exhausted(c))
      ++c;
    return c - 1;
  }

  // Nondecreasing (cost, position) tuples of m emits with total cost e.
  bool tuples(int e, int m, int min_cost, std::size_t min_pos,
              SubCandidate &s,
              const std::function<bool(const SubCandidate &)> &visit) {
    if (m == 0)
      return e != 0 || visit(s);
    int lo = std::max(min_cost, emits_.min_cost());
    for (int c = lo; c * m <= e; ++c) {
      if (m == 1 && c != e)
        continue;
      const auto lvl = emits_.level(c);
      for (std::size_t k = c == min_cost ? min_pos : 0; k < lvl.size(); ++k) {
        s.emits.push_back(lvl[k]);
        bool go = tuples(e - c, m - 1, c, k, s, visit);
        s.emits.pop_back();
        if (!go)
          return false;
      }
    }
    return true;
  }
};

inline OutState normalize(const OutputSlot &o, std::int64_t init,
                          const std::vector<std::pair<std::int64_t, std::int64_t>>
                              &cells) {
  OutState s;
  switch (o.shape) {
  case OutShape::Scalar:
    s.emplace_back(0, cells.empty() ? init : cells.front().second);
    return s;
  case OutShape::Array:
    for (const auto &c : cells)
      if (c.second != 0)
        s.push_back(c);
    break;
  case OutShape::Map:
    s = cells;
    break;
  }
  std::sort(s.begin(), s.end());
  return s;
}

// Replays the emissions of one output over a dataset and compares the
// folded state with the sequential trajectory at every boundary.
// map_at(i, apply) calls apply(subkey, value) per emission and returns false
// on a trap or when apply does.
template <class MapAt>
bool track(const Dataset &d, const OutputSlot &o, std::size_t pos,
           std::int64_t init, const Compiled &fold, MapAt &&map_at) {
  std::vector<std::pair<std::int64_t, std::int64_t>> cur;
  auto apply = [&](std::int64_t sub, std::int64_t v) {
    if (o.shape == OutShape::Array && (sub < 0 || sub >= *o.length))
      return false;
    auto it = std::find_if(cur.begin(), cur.end(),
                           [&](const auto &c) { return c.first == sub; });
    EvalCtx ctx;
    ctx.acc = it == cur.end() ? init : it->second;
    ctx.elem = v;
    std::int64_t r;
    if (!fold.eval(ctx, r))
      return false;
    if (it == cur.end())
      cur.emplace_back(sub, r);
    else
      it->second = r;
    return true;
  };
  std::int64_t idx = 0;
  for (std::size_t k = 0; k < d.points.size(); ++k) {
    std::int64_t end = std::clamp<std::int64_t>(d.points[k], 0, d.len());
    for (; idx < end; ++idx)
      if (!map_at(idx, apply))
        return false;
    if (normalize(o, init, cur) != d.expected[k][pos])
      return false;
  }
  return true;
}

} // namespace detail

// Lifts one fragment: enumerative CEGIS over the grammar iterations, each
// candidate checked against the bounded domain.
class Synthesizer {
public:
  Synthesizer(const mj::Program &prog, const analysis::LoopFragment &f,
              const analysis::VarRoles &roles, SynthConfig cfg)
      : prog_(prog), frag_(f), roles_(roles), cfg_(std::move(cfg)) {}

  SynthResult run() {
    start_ = std::chrono::steady_clock::now();
    try {
      return run_inner();
    } catch (const SynthTimeout &) {
      return give_up("timeout after " + fmt_seconds(cfg_.timeout_s));
    } catch (const ResourceLimit &e) {
      return give_up(e.what());
    }
  }

private:
  const mj::Program &prog_;
  const analysis::LoopFragment &frag_;
  const analysis::VarRoles &roles_;
  SynthConfig cfg_;
  SynthStats stats_;
  std::chrono::steady_clock::time_point start_;
  std::optional<SummaryTemplate> tmpl_;
  std::unique_ptr<Domain> dom_;
  Symbols syms_;
  std::vector<std::size_t> order_;

  static std::string fmt_seconds(double s) {
    std::ostringstream os;
    os << s << "s";
    return os.str();
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }
  void tick() {
    if ((++stats_.candidates & 1023) == 0 && elapsed() > cfg_.timeout_s)
      throw SynthTimeout("timeout");
  }

  SynthResult give_up(std::string reason) {
    stats_.seconds = elapsed();
    return GiveUp{std::move(reason), stats_};
  }

  SynthResult run_inner() {
    auto pre = spec::gen_precondition(frag_, roles_);
    tmpl_ = spec::gen_template(frag_, roles_, pre);
    for (const auto &o : tmpl_->outputs)
      if (o.init.kind == spec::InitKind::Fresh)
        return give_up("output '" + o.name +
                       "' has no known initial value");
    const auto *ci = pre.find(tmpl_->counter);
    if (!ci || ci->kind != spec::InitKind::Literal)
      return give_up("counter '" + tmpl_->counter +
                     "' has no known initial value");

    GrammarSpec g = spec::gen_grammar(frag_, roles_, *tmpl_, 1, cfg_.policy);
    if (cfg_.recursion_bound)
      g.recursion_bound = *cfg_.recursion_bound;
    if (cfg_.max_emits)
      g.emit_budget = *cfg_.max_emits;

    dom_ = std::make_unique<Domain>(prog_, frag_, *tmpl_, g.str_lits,
                                    cfg_.domain);
    syms_ = dom_->symbols();
    stats_.datasets = dom_->datasets().size();
    order_.resize(dom_->datasets().size());
    for (std::size_t k = 0; k < order_.size(); ++k)
      order_[k] = k;
    std::mt19937_64 rng(cfg_.seed);
    std::shuffle(order_.begin(), order_.end(), rng);

    auto lce = choose_lce(g);
    if (!lce)
      return give_up("no loop counter expression holds on the domain");

    PointSet pts = seed_points();
    for (;;) {
      stats_.iteration = g.iteration;
      if (auto c = search_iteration(g, *lce, pts)) {
        stats_.seconds = elapsed();
        return Summary{frag_.id, std::move(*c), *tmpl_, g, cfg_.domain, stats_};
      }
      if (g.iteration >= cfg_.policy.max_iteration())
        return give_up("no summary within " +
                       std::to_string(g.iteration) + " grammar iterations");
      g = spec::expand(g, cfg_.policy);
    }
  }

  std::optional<LoopCounterExp> choose_lce(const GrammarSpec &g) const {
    std::vector<LoopTerm> terms;
    for (auto v : g.int_lits)
      terms.push_back({false, v});
    terms.push_back({true, 0});
    for (const auto &lo : terms)
      for (const auto &hi : terms) {
        LoopCounterExp e{lo, hi};
        bool ok = true;
        for (const auto &d : dom_->datasets()) {
          for (auto i : d.points)
            if (!e.holds(i, d.len())) {
              ok = false;
              break;
            }
          if (!ok)
            break;
        }
        if (ok)
          return e;
      }
    return std::nullopt;
  }

  PointSet seed_points() const {
    PointSet pts;
    const auto &sets = dom_->datasets();
    std::int64_t longest = 0;
    for (const auto &d : sets)
      longest = std::max(longest, d.len());
    for (std::size_t di : order_) {
      if (pts.sets.size() >= cfg_.seed_examples)
        break;
      if (sets[di].len() == longest)
        pts.add(*dom_, di);
    }
    return pts;
  }

  // Full-domain check of one output's sub-candidate; returns the first
  // failing dataset in the shuffled order.
  std::optional<std::size_t> full_check(const OutputSlot &o, std::size_t pos,
                                        detail::OutputSpace &sp,
                                        const SubCandidate &s) {
    Candidate c;
    for (int k : s.emits)
      c.emits.push_back(sp.emits().to_emit(k));
    CompiledCandidate cc(c, syms_);
    Compiled fold(s.fold.body, syms_);
    const auto &sets = dom_->datasets();
    for (std::size_t di : order_) {
      const Dataset &d = sets[di];
      EvalCtx ctx;
      ctx.data = d.data.data();
      ctx.len = d.len();
      ctx.inputs = d.inputs.data();
      auto map_at = [&](std::int64_t i, auto &apply) {
        ctx.i = i;
        bool ok = true;
        bool trap_free = cc.map_at(ctx, [&](const Key &k, std::int64_t v) {
          if (!ok)
            return;
          int want = o.shape == OutShape::Scalar ? 1 : 2;
          if (k.arity != want) {
            ok = false;
            return;
          }
          ok = apply(want == 1 ? 0 : k.c[1], v);
        });
        return ok && trap_free;
      };
      if (!detail::track(d, o, pos, s.fold.init, fold, map_at))
        return di;
    }
    return std::nullopt;
  }

  // Cheapest sub-candidate of an output that passes the whole domain.
  // Counterexamples found on the way are added to pts.
  struct Found {
    FoldBank::Option fold;
    std::vector<Emit> emits;
  };

  std::optional<Found> search_output(const GrammarSpec &g,
                                            std::size_t pos, PointSet &pts) {
    const OutputSlot &o = tmpl_->outputs[pos];
    const int max_emits =
        g.emit_budget - static_cast<int>(tmpl_->outputs.size()) + 1;
    if (max_emits < 1)
      return std::nullopt;
    auto inits = detail::fold_inits(g, o, syms_);
    const auto &vals = dom_->values(o.value);
    int b = 0;
    for (;;) {
      ExprBank bank(g, syms_, &pts);
      detail::OutputSpace sp(g, o, bank, &pts, inits, vals, max_emits);
      if (b == 0)
        b = sp.min_cost();
      bool restart = false;
      std::optional<Found> found;
      for (;; ++b) {
        if (b > sp.max_cost())
          return std::nullopt;
        sp.visit(b, [&](const SubCandidate &s) {
          tick();
          if (!cex_check(o, pos, sp, s, pts))
            return true;
          if (auto bad = full_check(o, pos, sp, s)) {
            ++stats_.counterexamples;
            pts.add(*dom_, *bad);
            restart = true;
            return false;
          }
          found = Found{s.fold, {}};
          for (int k : s.emits)
            found->emits.push_back(sp.emits().to_emit(k));
          return false;
        });
        if (found)
          return found;
        if (restart)
          break;
      }
    }
  }

  bool cex_check(const OutputSlot &o, std::size_t pos, detail::OutputSpace &sp,
                 const SubCandidate &s, const PointSet &pts) {
    Compiled fold(s.fold.body, syms_);
    const auto &sets = dom_->datasets();
    for (std::size_t k = 0; k < pts.sets.size(); ++k) {
      const Dataset &d = sets[pts.sets[k]];
      const std::size_t base = pts.base[k];
      auto map_at = [&](std::int64_t i, auto &apply) {
        for (int e : s.emits) {
          std::int64_t key = 0, val = 0;
          int st = sp.emits().emission(e, base + static_cast<std::size_t>(i),
                                       key, val);
          if (st == 2)
            return false;
          if (st == 1 && !apply(key, val))
            return false;
        }
        return true;
      };
      if (!detail::track(d, o, pos, s.fold.init, fold, map_at))
        return false;
    }
    return true;
  }

  std::optional<Candidate> search_iteration(const GrammarSpec &g,
                                            const LoopCounterExp &lce,
                                            PointSet &pts) {
    for (;;) {
      Candidate c;
      c.lce = lce;
      for (std::size_t pos = 0; pos < tmpl_->outputs.size(); ++pos) {
        auto s = search_output(g, pos, pts);
        if (!s)
          return std::nullopt;
        const OutputSlot &o = tmpl_->outputs[pos];
        c.emits.insert(c.emits.end(), s->emits.begin(), s->emits.end());
        c.folds.push_back(Fold{o.id, o.value, s->fold.init, s->fold.body});
      }
      if (static_cast<int>(c.emits.size()) > g.emit_budget)
        return std::nullopt;
      auto v = check_bounded(c, *dom_, &order_);
      if (v.verified())
        return c;
      if (pts.contains(v.cex->dataset))
        throw Error("bounded check disagrees with the trajectory check on " +
                    v.cex->str());
      ++stats_.counterexamples;
      pts.add(*dom_, v.cex->dataset);
    }
  }
};

inline SynthResult synthesize(const mj::Program &prog,
                              const analysis::LoopFragment &f,
                              const analysis::VarRoles &roles,
                              const SynthConfig &cfg = {}) {
  return Synthesizer(prog, f, roles, cfg).run();
}

// Every candidate of a grammar in search order (total cost, then each
// output's sub-candidate in turn, then the loop counter expression), without
// equivalence pruning. Intended for small grammars.
inline std::vector<Candidate> enumerate_candidates(const GrammarSpec &g,
                                                   const SummaryTemplate &t,
                                                   std::size_t limit) {
  Symbols syms;
  for (const auto &s : g.str_lits)
    syms.intern(s);
  ExprBank bank(g, syms, nullptr);
  const int max_emits = g.emit_budget - static_cast<int>(t.outputs.size()) + 1;
  std::vector<std::unique_ptr<detail::OutputSpace>> spaces;
  for (const auto &o : t.outputs) {
    std::vector<std::int64_t> vals = o.value == Prim::Bool
                                         ? std::vector<std::int64_t>{0, 1}
                                         : std::vector<std::int64_t>{-2, -1, 0,
                                                                     1, 2};
    spaces.push_back(std::make_unique<detail::OutputSpace>(
        g, o, bank, nullptr, detail::fold_inits(g, o, syms), vals,
        std::max(1, max_emits)));
  }
  std::vector<LoopCounterExp> lces;
  std::vector<LoopTerm> terms;
  for (auto v : g.int_lits)
    terms.push_back({false, v});
  terms.push_back({true, 0});
  for (const auto &lo : terms)
    for (const auto &hi : terms)
      lces.push_back({lo, hi});

  std::vector<Candidate> out;
  const std::size_t n = t.outputs.size();
  int min_total = LoopCounterExp::kCost;
  for (auto &sp : spaces)
    min_total += sp->min_cost();
  std::vector<std::vector<Emit>> emits(n);
  std::vector<Fold> folds(n);

  std::function<bool(std::size_t, int)> rec = [&](std::size_t k,
                                                  int left) -> bool {
    if (k == n) {
      if (left != 0)
        return true;
      Candidate c;
      for (std::size_t j = 0; j < n; ++j) {
        c.emits.insert(c.emits.end(), emits[j].begin(), emits[j].end());
        c.folds.push_back(folds[j]);
      }
      if (static_cast<int>(c.emits.size()) > g.emit_budget)
        return true;
      for (const auto &l : lces) {
        c.lce = l;
        out.push_back(c);
        if (out.size() >= limit)
          return false;
      }
      return true;
    }
    int rest_min = 0;
    for (std::size_t j = k + 1; j < n; ++j)
      rest_min += spaces[j]->min_cost();
    for (int s = spaces[k]->min_cost(); s <= left - rest_min; ++s) {
      bool go = spaces[k]->visit(s, [&](const SubCandidate &sc) {
        emits[k].clear();
        for (int e : sc.emits)
          emits[k].push_back(spaces[k]->emits().to_emit(e));
        const auto &o = t.outputs[k];
        folds[k] = Fold{o.id, o.value, sc.fold.init, sc.fold.body};
        return rec(k + 1, left - s);
      });
      if (!go)
        return false;
    }
    return true;
  };
  int max_total = LoopCounterExp::kCost;
  for (auto &sp : spaces)
    max_total += sp->max_cost();
  for (int total = min_total; total <= max_total; ++total)
    if (!rec(0, total - LoopCounterExp::kCost))
      break;
  return out;
}

// Whether every part of a candidate is derivable from the grammar.
inline bool derivable(const Candidate &c, const GrammarSpec &g) {
  TypeEnv env;
  env.data = g.data_elem;
  for (const auto &in : g.inputs)
    env.inputs.push_back(in.type);
  std::function<bool(const SExprPtr &, bool)> ok =
      [&](const SExprPtr &e, bool fold) -> bool {
    switch (e->kind) {
    case SK::IntLit:
      return std::find(g.int_lits.begin(), g.int_lits.end(), e->ival) !=
             g.int_lits.end();
    case SK::StrLit:
      return !fold && std::find(g.str_lits.begin(), g.str_lits.end(),
                                e->sval) != g.str_lits.end();
    case SK::BoolLit:
      return std::find(g.bool_lits.begin(), g.bool_lits.end(),
                       e->ival != 0) != g.bool_lits.end();
    case SK::Counter:
      return !fold && e->sval == g.counter;
    case SK::Input:
      return !fold;
    case SK::Data:
      return !fold && ok(e->a, fold);
    case SK::Acc:
    case SK::Elem:
      return fold;
    case SK::Not:
      return (fold ? e->type == Prim::Bool && g.allow_not : g.allow_not) &&
             ok(e->a, fold);
    case SK::Bin: {
      bool op_ok = fold ? (e->a->type == Prim::Bool
                               ? GrammarSpec::bool_fold_ops().count(e->op) > 0
                               : g.int_fold_ops().count(e->op) > 0)
                        : g.has(e->op);
      return op_ok && ok(e->a, fold) && ok(e->b, fold);
    }
    }
    return false;
  };
  auto expr_ok = [&](const SExprPtr &e) {
    return e && depth(e) <= g.recursion_bound && well_typed(e, env) &&
           ok(e, false);
  };
  if (static_cast<int>(c.emits.size()) > g.emit_budget)
    return false;
  for (const auto &e : c.emits) {
    if (e.guard && (!g.guards || e.guard->type != Prim::Bool ||
                    !expr_ok(e.guard)))
      return false;
    if (static_cast<int>(e.rest.size()) + 1 > g.max_key_arity)
      return false;
    for (const auto &r : e.rest)
      if (!expr_ok(r))
        return false;
    if (!expr_ok(e.value))
      return false;
  }
  for (const auto &f : c.folds) {
    TypeEnv fe = env;
    fe.fold = f.type;
    if (!f.body || depth(f.body) > g.recursion_bound ||
        !well_typed(f.body, fe) || !ok(f.body, true) ||
        !mentions(f.body, SK::Acc) || !mentions(f.body, SK::Elem))
      return false;
  }
  return true;
}

} // namespace liftmr::synth
