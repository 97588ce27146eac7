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
#include "liftmr/specgen/specgen.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace liftmr;
using namespace liftmr::spec;
using testutil::corpus_file;

namespace {

struct Lifted {
  analysis::LoopFragment frag;
  analysis::VarRoles roles;
  Precondition pre;
  SummaryTemplate tmpl;
};

Lifted prepare(const std::string &src) {
  auto ex = analysis::extract_fragments(mj::compile(src));
  EXPECT_EQ(ex.fragments.size(), 1u);
  Lifted l;
  l.frag = ex.fragments.at(0);
  l.roles = analysis::assign_var_ids(analysis::classify_vars(l.frag));
  l.pre = gen_precondition(l.frag, l.roles);
  l.tmpl = gen_template(l.frag, l.roles, l.pre);
  return l;
}

Lifted corpus(const std::string &name) { return prepare(corpus_file(name)); }

GrammarSpec grammar(const Lifted &l, int iteration) {
  return gen_grammar(l.frag, l.roles, l.tmpl, iteration);
}

} // namespace

TEST(Precondition, HistogramZeroArrays) {
  auto l = corpus("histogram3d");
  for (const char *h : {"hR", "hG", "hB"}) {
    const InitValue *v = l.pre.find(h);
    ASSERT_NE(v, nullptr) << h;
    EXPECT_EQ(*v, InitValue::zero_array(256, mj::Prim::Int)) << h;
  }
  EXPECT_EQ(*l.pre.find("i"), InitValue::literal(std::int64_t{0}));
  EXPECT_EQ(l.pre.str(), "hR = [0..0](256) && hG = [0..0](256) && "
                         "hB = [0..0](256) && i = 0");
}

TEST(Precondition, ConstantInitializer) {
  auto l = prepare(R"(
int main(int[] data) {
  int s = 5;
  for (int i = 0; i < length(data); i++) { s = s + data[i]; }
  return s;
})");
  EXPECT_EQ(*l.pre.find("s"), InitValue::literal(std::int64_t{5}));
}

TEST(Precondition, ConstantPropagation) {
  auto l = prepare(R"(
int main(int[] data) {
  int a = 2;
  int s = a * 3 + 1;
  int i = a - 2;
  while (i < length(data)) { s = s + data[i]; i = i + 1; }
  return s;
})");
  EXPECT_EQ(*l.pre.find("s"), InitValue::literal(std::int64_t{7}));
  EXPECT_EQ(*l.pre.find("i"), InitValue::literal(std::int64_t{0}));
}

TEST(Precondition, ParameterBecomesFresh) {
  auto l = prepare(R"(
int main(int[] data, int start) {
  int s = start;
  for (int i = 0; i < length(data); i++) { s = s + data[i]; }
  return s;
})");
  EXPECT_EQ(*l.pre.find("s"), InitValue::fresh_symbol("s0"));
}

TEST(Precondition, WriteInsideEarlierLoopIsUnknown) {
  auto l = prepare(R"(
int main(int[] data) {
  int s = 0;
  while (s < 3) { s = s + 1; }
  for (int i = 0; i < length(data); i++) { s = s + data[i]; }
  return s;
})");
  EXPECT_EQ(l.pre.find("s")->kind, InitKind::Fresh);
}

TEST(Precondition, ConditionalWriteIsUnknown) {
  auto l = prepare(R"(
int main(int[] data, int c) {
  int s = 0;
  if (c > 0) { s = 1; }
  for (int i = 0; i < length(data); i++) { s = s + data[i]; }
  return s;
})");
  EXPECT_EQ(l.pre.find("s")->kind, InitKind::Fresh);
}

TEST(Precondition, TracesThroughEnclosingIf) {
  auto l = prepare(R"(
int main(int[] data, int c) {
  int s = 4;
  if (c > 0) {
    for (int i = 0; i < length(data); i++) { s = s + data[i]; }
  }
  return s;
})");
  EXPECT_EQ(*l.pre.find("s"), InitValue::literal(std::int64_t{4}));
}

TEST(Template, SummationPostcondition) {
  auto l = corpus("summation");
  EXPECT_EQ(l.tmpl.postcondition(), "sum = reduce(map(data, f_m), f_r)[0]");
  EXPECT_EQ(l.tmpl.invariant(),
            "LoopCounterExp(i) && sum = reduce(map(data[0:i], f_m), f_r)[0]");
  ASSERT_EQ(l.tmpl.outputs.size(), 1u);
  EXPECT_EQ(l.tmpl.outputs[0].shape, OutShape::Scalar);
}

TEST(Template, HistogramThreeQuantifiedConjuncts) {
  auto l = corpus("histogram3d");
  EXPECT_EQ(l.tmpl.postcondition(),
            "forall j in [0, hR.length). hR[j] = reduce(map(data, f_m), "
            "f_r)[(0, j)] && forall j in [0, hG.length). hG[j] = "
            "reduce(map(data, f_m), f_r)[(1, j)] && forall j in [0, "
            "hB.length). hB[j] = reduce(map(data, f_m), f_r)[(2, j)]");
  EXPECT_NE(l.tmpl.invariant().find(
                "hB[j] = reduce(map(data[0:i], f_m), f_r)[(2, j)]"),
            std::string::npos);
  for (const auto &o : l.tmpl.outputs) {
    EXPECT_EQ(o.shape, OutShape::Array);
    EXPECT_EQ(o.length, 256);
  }
  EXPECT_EQ(l.tmpl.stride, 3);
}

TEST(Template, WordCountPerKey) {
  auto l = corpus("wordcount");
  ASSERT_EQ(l.tmpl.outputs.size(), 1u);
  EXPECT_EQ(l.tmpl.outputs[0].shape, OutShape::Map);
  EXPECT_EQ(l.tmpl.outputs[0].key, mj::Prim::Str);
  EXPECT_NE(l.tmpl.postcondition().find(
                "counts[k] = reduce(map(data, f_m), f_r)[(0, k)]"),
            std::string::npos);
}

TEST(Template, PostMentionsEveryOutputOnce) {
  for (const char *name : {"summation", "wordcount", "stringmatch",
                           "histogram3d", "linregress"}) {
    auto l = corpus(name);
    std::string post = l.tmpl.postcondition();
    for (const auto &o : l.tmpl.outputs) {
      std::string needle = "f_r)[" + std::string(o.shape == OutShape::Scalar
                                                     ? ""
                                                     : "(") +
                           std::to_string(o.id);
      std::size_t first = post.find(needle);
      ASSERT_NE(first, std::string::npos) << name << " " << o.name;
      EXPECT_EQ(post.find(needle, first + 1), std::string::npos) << name;
    }
  }
}

TEST(Template, StringOutputUnsupported) {
  auto ex = analysis::extract_fragments(mj::compile(R"(
void main(string[] data) {
  string last = "";
  for (int i = 0; i < length(data); i++) { last = data[i]; }
})"));
  ASSERT_EQ(ex.fragments.size(), 1u);
  auto roles = analysis::assign_var_ids(analysis::classify_vars(ex.fragments[0]));
  auto pre = gen_precondition(ex.fragments[0], roles);
  EXPECT_THROW(gen_template(ex.fragments[0], roles, pre), SpecError);
}

TEST(Grammar, SummationIterationOne) {
  auto l = corpus("summation");
  auto g = grammar(l, 1);
  EXPECT_EQ(g.emit_budget, 1);
  EXPECT_EQ(g.recursion_bound, 2);
  EXPECT_TRUE(g.has(mj::BinOp::Add));
  EXPECT_FALSE(g.has(mj::BinOp::Mod));
  EXPECT_EQ(g.int_lits, (std::vector<std::int64_t>{0, 1}));
  EXPECT_EQ(g.int_fold_ops(), (std::set<mj::BinOp>{mj::BinOp::Add}));
  EXPECT_TRUE(g.inputs.empty());
}

TEST(Grammar, StringMatchIterationOne) {
  auto l = corpus("stringmatch");
  auto g = grammar(l, 1);
  EXPECT_EQ(g.emit_budget, 2);
  EXPECT_TRUE(g.has(mj::BinOp::Eq));
  EXPECT_EQ(g.data_elem, mj::Prim::Str);
  ASSERT_EQ(g.inputs.size(), 2u);
  EXPECT_EQ(g.inputs[0].type, mj::Prim::Str);
  EXPECT_EQ(g.bool_lits, (std::vector<bool>{true}));
  for (const auto &o : g.outputs)
    EXPECT_EQ(o.value, mj::Prim::Bool);
}

TEST(Grammar, HistogramIterationTwo) {
  auto l = corpus("histogram3d");
  auto g1 = grammar(l, 1);
  EXPECT_FALSE(g1.has(mj::BinOp::Mod));
  EXPECT_EQ(g1.int_lits, (std::vector<std::int64_t>{0, 1, 2, 3}));
  auto g2 = grammar(l, 2);
  EXPECT_EQ(g2.iteration, 2);
  EXPECT_EQ(g2.emit_budget, 3);
  EXPECT_EQ(g2.recursion_bound, 3);
  EXPECT_TRUE(g2.has(mj::BinOp::Mod));
  EXPECT_TRUE(g2.has(mj::BinOp::Eq));
  for (const auto &o : g2.outputs)
    EXPECT_EQ(o.shape, OutShape::Array);
}

TEST(Grammar, ExpansionGrowsMonotonically) {
  auto l = corpus("summation");
  auto policy = ExpansionPolicy::standard();
  auto g = grammar(l, 1);
  while (g.iteration < policy.max_iteration()) {
    auto n = expand(g, policy);
    EXPECT_EQ(n.iteration, g.iteration + 1);
    EXPECT_GE(n.recursion_bound, g.recursion_bound);
    EXPECT_GE(n.emit_budget, g.emit_budget);
    EXPECT_TRUE(std::includes(n.ops.begin(), n.ops.end(), g.ops.begin(),
                              g.ops.end()));
    EXPECT_TRUE(n.recursion_bound > g.recursion_bound ||
                n.emit_budget > g.emit_budget || n.ops.size() > g.ops.size());
    g = n;
  }
  EXPECT_EQ(g.iteration, 5);
  EXPECT_THROW(expand(g, policy), PolicyExhausted);
}

TEST(Grammar, Deterministic) {
  for (const char *name : {"summation", "wordcount", "stringmatch",
                           "histogram3d", "linregress"}) {
    auto a = corpus(name);
    auto b = corpus(name);
    for (int it = 1; it <= 5; ++it)
      EXPECT_EQ(grammar(a, it).str(), grammar(b, it).str()) << name;
    EXPECT_EQ(a.tmpl.str(), b.tmpl.str());
  }
}

TEST(Grammar, CanonicalText) {
  auto l = corpus("summation");
  EXPECT_EQ(grammar(l, 1).str(), "grammar v1\n"
                                 "iteration 1\n"
                                 "recursion-bound 2\n"
                                 "emit-budget 1\n"
                                 "operators + <\n"
                                 "literals.int 0 1\n"
                                 "literals.str\n"
                                 "literals.bool\n"
                                 "terminals i:int data[int]\n"
                                 "emit 0 key-arity 1 value int\n"
                                 "fold.int +\n"
                                 "fold.bool && ||\n"
                                 "loop-terms 0 1 length(data)\n"
                                 "guards on\n");
}
