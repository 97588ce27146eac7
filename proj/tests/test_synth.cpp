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

#include "liftmr/frontend/frontend.hpp"
#include "liftmr/synth/search.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace liftmr;
using namespace liftmr::synth;
using testutil::corpus_file;

namespace {

struct Prepared {
  mj::Program prog;
  analysis::LoopFragment frag;
  analysis::VarRoles roles;
  SummaryTemplate tmpl;
};

Prepared prepare(const std::string &src) {
  Prepared p;
  p.prog = mj::compile(src);
  auto ex = analysis::extract_fragments(p.prog);
  EXPECT_EQ(ex.fragments.size(), 1u);
  p.frag = ex.fragments.at(0);
  p.roles = analysis::assign_var_ids(analysis::classify_vars(p.frag));
  p.tmpl = spec::gen_template(p.frag, p.roles,
                              spec::gen_precondition(p.frag, p.roles));
  return p;
}

SExprPtr di() { return s_data(s_counter("i"), Prim::Int); }
SExprPtr add_fold() {
  return s_bin(BinOp::Add, s_acc(Prim::Int), s_elem(Prim::Int));
}

Candidate sum_candidate(SExprPtr fold_body = add_fold()) {
  Candidate c;
  c.emits.push_back(Emit{0, nullptr, {}, di()});
  c.folds.push_back(Fold{0, Prim::Int, 0, std::move(fold_body)});
  c.lce = {{false, 0}, {true, 0}};
  return c;
}

const Summary &summary_of(const SynthResult &r) {
  if (const auto *g = std::get_if<GiveUp>(&r))
    ADD_FAILURE() << "gave up: " << g->reason;
  return std::get<Summary>(r);
}

SynthResult lift(const Prepared &p, SynthConfig cfg = {}) {
  return synthesize(p.prog, p.frag, p.roles, cfg);
}

std::string emits_str(const Candidate &c) {
  std::string s;
  for (const auto &e : c.emits)
    s += (s.empty() ? "" : "; ") + e.str();
  return s;
}

// Runs the fragment's program on env and evaluates the candidate on the
// same data; compares every output.
void expect_agrees(const Prepared &p, const Candidate &c, const mj::Env &env) {
  auto out = mj::interpret(p.prog, env);
  ASSERT_FALSE(out.trap.has_value());
  const auto &data = env.at(p.tmpl.data_var);
  auto len = static_cast<std::int64_t>(data.is_int_array()
                                           ? data.int_array().size()
                                           : data.str_array().size());
  std::vector<mj::Scalar> inputs;
  for (const auto &in : p.tmpl.inputs)
    inputs.push_back(env.at(in.name).to_scalar());
  auto assoc = eval_candidate(c, data, len, inputs);
  ASSERT_TRUE(assoc.has_value());
  for (const auto &o : p.tmpl.outputs) {
    const mj::Value &got = out.env.at(o.name);
    auto init = c.fold_for(o.id)->init;
    switch (o.shape) {
    case OutShape::Scalar: {
      auto it = assoc->find({mj::Scalar(std::int64_t{o.id})});
      mj::Scalar want = it == assoc->end()
                            ? Symbols().decode(init, o.value)
                            : it->second;
      EXPECT_EQ(got.to_scalar(), want) << o.name;
      break;
    }
    case OutShape::Array: {
      mj::IntArray want(got.int_array().size(), init);
      for (const auto &[k, v] : *assoc)
        if (std::get<std::int64_t>(k[0]) == o.id)
          want.at(static_cast<std::size_t>(std::get<std::int64_t>(k[1]))) =
              std::get<std::int64_t>(v);
      EXPECT_EQ(got.int_array(), want) << o.name;
      break;
    }
    case OutShape::Map: {
      mj::MapData want;
      for (const auto &[k, v] : *assoc)
        if (std::get<std::int64_t>(k[0]) == o.id)
          want[k[1]] = v;
      EXPECT_EQ(got.map(), want) << o.name;
      break;
    }
    }
  }
}

} // namespace

TEST(EvalCandidate, SumOfTwo) {
  auto r = eval_candidate(sum_candidate(), mj::Value(mj::IntArray{2, 3}), 2);
  ASSERT_TRUE(r.has_value());
  ScalarAssoc want{{{mj::Scalar(std::int64_t{0})}, mj::Scalar(std::int64_t{5})}};
  EXPECT_EQ(*r, want);
}

TEST(EvalCandidate, EmptyPrefixIsEmpty) {
  auto r = eval_candidate(sum_candidate(), mj::Value(mj::IntArray{2, 3}), 0);
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(r->empty());
}

TEST(EvalCandidate, HistogramTriples) {
  Candidate c;
  auto guard = s_bin(BinOp::Eq, s_bin(BinOp::Mod, s_counter("i"), s_int(3)),
                     s_int(0));
  auto at = [](int off) {
    return s_data(off ? s_bin(BinOp::Add, s_counter("i"), s_int(off))
                      : s_counter("i"),
                  Prim::Int);
  };
  for (int k = 0; k < 3; ++k) {
    c.emits.push_back(Emit{k, guard, {at(k)}, s_int(1)});
    c.folds.push_back(Fold{k, Prim::Int, 0, add_fold()});
  }
  auto r = eval_candidate(c, mj::Value(mj::IntArray{1, 0, 2}), 3);
  ASSERT_TRUE(r.has_value());
  auto i = [](std::int64_t v) { return mj::Scalar(v); };
  ScalarAssoc want{{{i(0), i(1)}, i(1)}, {{i(1), i(0)}, i(1)},
                   {{i(2), i(2)}, i(1)}};
  EXPECT_EQ(*r, want);
}

TEST(EvalCandidate, TrapYieldsNothing) {
  Candidate c = sum_candidate();
  c.emits[0].value = s_data(s_bin(BinOp::Add, s_counter("i"), s_int(1)),
                            Prim::Int);
  EXPECT_FALSE(
      eval_candidate(c, mj::Value(mj::IntArray{1, 2}), 2).has_value());
}

TEST(CommAssoc, KnownFolds) {
  std::vector<std::int64_t> vals{-2, -1, 0, 1, 2};
  EXPECT_TRUE(check_commutative_associative(add_fold(), 0, vals));
  EXPECT_TRUE(check_commutative_associative(
      s_bin(BinOp::Or, s_acc(Prim::Bool), s_elem(Prim::Bool)), 0, {0, 1}));
  EXPECT_TRUE(check_commutative_associative(
      s_bin(BinOp::Mul, s_acc(Prim::Int), s_elem(Prim::Int)), 1, vals));
  std::vector<std::int64_t> witness;
  EXPECT_FALSE(check_commutative_associative(
      s_bin(BinOp::Sub, s_acc(Prim::Int), s_elem(Prim::Int)), 0, vals,
      &witness));
  EXPECT_FALSE(witness.empty());
  // Regrouping from a nonzero init counts the init once per group.
  EXPECT_FALSE(check_commutative_associative(add_fold(), 5, vals));
}

class BoundedCheck : public ::testing::Test {
protected:
  void SetUp() override {
    p_ = prepare(corpus_file("summation"));
    dom_ = std::make_unique<Domain>(p_.prog, p_.frag, p_.tmpl,
                                    std::vector<std::string>{}, DomainConfig{});
  }
  Prepared p_;
  std::unique_ptr<Domain> dom_;
};

TEST_F(BoundedCheck, SummationVerifies) {
  EXPECT_TRUE(check_bounded(sum_candidate(), *dom_).verified());
}

TEST_F(BoundedCheck, ProductFoldFails) {
  auto v = check_bounded(
      sum_candidate(s_bin(BinOp::Mul, s_acc(Prim::Int), s_elem(Prim::Int))),
      *dom_);
  ASSERT_FALSE(v.verified());
  EXPECT_NE(v.cex->str().find("statement"), std::string::npos);
}

TEST_F(BoundedCheck, NarrowCounterBoundFailsInduction) {
  Candidate c = sum_candidate();
  c.lce = {{false, 0}, {false, 0}};
  auto v = check_bounded(c, *dom_);
  ASSERT_FALSE(v.verified());
  EXPECT_EQ(v.cex->statement, 2);
}

TEST_F(BoundedCheck, DomainIsExhaustiveAndTrapFree) {
  // Lengths 0..4 over five values.
  EXPECT_EQ(dom_->datasets().size(), 1u + 5 + 25 + 125 + 625);
  for (const auto &d : dom_->datasets()) {
    EXPECT_EQ(d.points.size(), d.data.size() + 1);
    EXPECT_EQ(d.points.back(), d.len());
  }
}

TEST(Enumerate, CostOrderedAndDerivable) {
  auto p = prepare(corpus_file("summation"));
  auto g = spec::gen_grammar(p.frag, p.roles, p.tmpl, 1);
  auto cands = enumerate_candidates(g, p.tmpl, 3000);
  ASSERT_FALSE(cands.empty());
  TypeEnv env;
  int last = 0;
  for (const auto &c : cands) {
    EXPECT_GE(c.cost(), last);
    last = c.cost();
    EXPECT_TRUE(derivable(c, g));
    for (const auto &e : c.emits)
      EXPECT_TRUE(well_typed(e.value, env));
  }
  EXPECT_EQ(cands.front().cost(), 3 + 4 + LoopCounterExp::kCost);
}

TEST(Enumerate, GrammarIterationsAreMonotone) {
  for (const char *name : {"summation", "histogram3d"}) {
    auto p = prepare(corpus_file(name));
    auto g1 = spec::gen_grammar(p.frag, p.roles, p.tmpl, 1);
    auto g2 = spec::gen_grammar(p.frag, p.roles, p.tmpl, 2);
    for (const auto &c : enumerate_candidates(g1, p.tmpl, 500))
      EXPECT_TRUE(derivable(c, g2)) << name;
  }
}

TEST(Enumerate, FirstVerifiedMatchesSynthesizer) {
  auto p = prepare(corpus_file("summation"));
  auto g = spec::gen_grammar(p.frag, p.roles, p.tmpl, 1);
  Domain dom(p.prog, p.frag, p.tmpl, g.str_lits, DomainConfig{});
  std::optional<Candidate> first;
  for (const auto &c : enumerate_candidates(g, p.tmpl, 20000))
    if (check_bounded(c, dom).verified()) {
      first = c;
      break;
    }
  ASSERT_TRUE(first.has_value());
  auto r = lift(p);
  const auto &s = summary_of(r);
  EXPECT_EQ(emits_str(s.candidate), emits_str(*first));
  EXPECT_EQ(s.candidate.cost(), first->cost());
  EXPECT_EQ(s.candidate.lce, first->lce);
}

struct Expected {
  const char *name;
  int iteration;
  std::vector<int> emit_costs;
};

class Corpus : public ::testing::TestWithParam<Expected> {};

TEST_P(Corpus, LiftsAtExpectedIteration) {
  const auto &want = GetParam();
  auto p = prepare(corpus_file(want.name));
  auto r = lift(p);
  const auto &s = summary_of(r);
  EXPECT_EQ(s.stats.iteration, want.iteration);
  std::vector<int> costs;
  for (const auto &e : s.candidate.emits)
    costs.push_back(e.cost());
  EXPECT_EQ(costs, want.emit_costs) << emits_str(s.candidate);
  EXPECT_TRUE(derivable(s.candidate, s.grammar));
  Domain dom(p.prog, p.frag, p.tmpl, s.grammar.str_lits, s.domain);
  EXPECT_TRUE(check_bounded(s.candidate, dom).verified());

  std::mt19937_64 rng(7);
  const auto &main = p.prog.functions.at(0);
  for (int k = 0; k < 200; ++k) {
    std::int64_t lo = want.name == std::string("histogram3d") ? 0 : -50;
    auto env = testutil::random_env(main, rng, 30, lo, 50, 4);
    auto &data = env[p.tmpl.data_var];
    if (data.is_int_array())
      data.int_array().resize(data.int_array().size() -
                              data.int_array().size() %
                                  static_cast<std::size_t>(p.tmpl.stride));
    if (p.tmpl.data_elem == Prim::Str)
      for (const auto &in : p.tmpl.inputs)
        env[in.name] = mj::Value("w" + std::to_string(k % 5));
    expect_agrees(p, s.candidate, env);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Benchmarks, Corpus,
    ::testing::Values(Expected{"summation", 1, {4}},
                      Expected{"wordcount", 1, {6}},
                      Expected{"stringmatch", 1, {6, 6}},
                      Expected{"histogram3d", 2, {12, 10, 12}},
                      Expected{"linregress", 2, {10, 8, 13, 15, 11}}),
    [](const auto &info) { return std::string(info.param.name); });

TEST(Synthesize, DeterministicAcrossSeeds) {
  auto p = prepare(corpus_file("histogram3d"));
  SynthConfig a, b;
  a.seed = 1;
  b.seed = 99;
  auto ra = lift(p, a);
  auto rb = lift(p, b);
  const auto &sa = summary_of(ra);
  const auto &sb = summary_of(rb);
  EXPECT_EQ(emits_str(sa.candidate), emits_str(sb.candidate));
  EXPECT_EQ(sa.candidate.cost(), sb.candidate.cost());
}

TEST(Synthesize, UnknownInitialValueGivesUp) {
  auto p = prepare(R"(
int main(int[] data, int s) {
  for (int i = 0; i < length(data); i++) { s = s + data[i]; }
  return s;
})");
  auto r = lift(p);
  ASSERT_TRUE(std::holds_alternative<GiveUp>(r));
  EXPECT_NE(std::get<GiveUp>(r).reason.find("initial value"),
            std::string::npos);
}

TEST(Synthesize, TimeoutGivesUp) {
  auto p = prepare(R"(
int main(int[] data) {
  int s = 0;
  for (int i = 0; i < length(data); i++) { s = s * 2 + data[i]; }
  return s;
})");
  SynthConfig cfg;
  cfg.timeout_s = 2;
  auto r = lift(p, cfg);
  ASSERT_TRUE(std::holds_alternative<GiveUp>(r));
}
