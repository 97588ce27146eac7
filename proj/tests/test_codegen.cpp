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

#include "liftmr/cli/driver.hpp"
#include "liftmr/codegen/codegen.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace liftmr;
using namespace liftmr::codegen;

namespace {

std::string golden_path(const std::string &name, const std::string &ext) {
  return std::string(LIFTMR_SOURCE_DIR) + "/tests/golden/" + name + ext;
}

std::string golden_text(const std::string &name) {
  return testutil::read_file(golden_path(name, ".summary"));
}

Summary golden(const std::string &name) {
  return parse_summary(golden_text(name));
}

bool contains(const std::string &s, const std::string &part) {
  return s.find(part) != std::string::npos;
}

std::size_t count(const std::string &s, const std::string &part) {
  std::size_t n = 0;
  for (auto p = s.find(part); p != std::string::npos; p = s.find(part, p + 1))
    ++n;
  return n;
}

cli::LiftReport lift(std::string_view src) { return cli::lift_source(src, {}); }

const std::vector<std::string> kCorpus{"summation", "wordcount", "stringmatch",
                                       "histogram3d", "linregress"};

} // namespace

TEST(SummaryDoc, SummationHasOneEmitAndSumFold) {
  auto text = golden_text("summation");
  EXPECT_EQ(text.rfind("liftmr-summary v1\n", 0), 0u);
  EXPECT_EQ(count(text, "\nemit "), 1u);
  EXPECT_TRUE(contains(text, "emit 0 guard - key - value (data i)\n"));
  EXPECT_TRUE(contains(text, "fold 0 int init 0 body (+ value v)\n"));
}

TEST(SummaryDoc, HistogramHasThreeKeyedEmits) {
  auto s = golden("histogram3d");
  ASSERT_EQ(s.candidate.emits.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(s.candidate.emits[k].output, k);
    ASSERT_EQ(s.candidate.emits[k].rest.size(), 1u);
    EXPECT_EQ(synth::to_prefix(s.candidate.emits[k].rest[0]), "(data i)");
  }
}

TEST(SummaryDoc, RoundTripsEveryCorpusSummary) {
  for (const auto &name : kCorpus) {
    auto text = golden_text(name);
    auto s = parse_summary(text);
    EXPECT_EQ(emit_summary(s), text) << name;
    EXPECT_TRUE(same_summary(parse_summary(emit_summary(s)), s)) << name;
  }
}

TEST(SummaryDoc, LiftIsIdempotentAndMatchesGolden) {
  for (const std::string name : {"summation", "wordcount", "stringmatch"}) {
    auto a = lift(cli::benchmark_source(name)).lifted();
    auto b = lift(cli::benchmark_source(name)).lifted();
    ASSERT_EQ(a.size(), 1u);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(emit_summary(a[0].second), emit_summary(b[0].second));
    EXPECT_EQ(emit_summary(a[0].second), golden_text(name)) << name;
  }
}

TEST(SummaryDoc, QuotedStringsRoundTrip) {
  auto s = golden("stringmatch");
  s.candidate.emits[0].guard = synth::s_bin(
      mj::BinOp::Ne, synth::s_data(synth::s_counter("i"), mj::Prim::Str),
      synth::s_str("a \"q\" \\ b"));
  auto text = emit_summary(s);
  EXPECT_TRUE(contains(text, "\"a \\\"q\\\" \\\\ b\""));
  auto back = parse_summary(text);
  EXPECT_TRUE(same_summary(back, s));
  EXPECT_EQ(emit_summary(back), text);
}

TEST(SummaryDoc, MalformedDocumentsAreRejected) {
  auto text = golden_text("summation");
  EXPECT_THROW(parse_summary(""), DocError);
  EXPECT_THROW(parse_summary("liftmr-summary v2\nend\n"), DocError);
  EXPECT_THROW(parse_summary(text.substr(0, text.size() - 4)), DocError);
  auto with = [&](const std::string &from, const std::string &to) {
    auto t = text;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_THROW(parse_summary(with("(data i)", "(data j)")), DocError);
  EXPECT_THROW(parse_summary(with("(data i)", "(data i")), DocError);
  EXPECT_THROW(parse_summary(with("(+ value v)", "(^ value v)")), DocError);
  EXPECT_THROW(parse_summary(with("lce 0 length", "lce zero length")),
               DocError);
  EXPECT_THROW(parse_summary(with("iteration", "iterations")), DocError);
  try {
    parse_summary(with("(+ value v)", "(+ value w)"));
    FAIL();
  } catch (const DocError &e) {
    EXPECT_TRUE(contains(e.what(), "summary line 9"));
  }
}

TEST(BindJob, SummationEnablesCombiner) {
  auto job = bind_job(golden("summation"));
  EXPECT_TRUE(job.combiner_enabled);
  ASSERT_EQ(job.outputs.size(), 1u);
  EXPECT_EQ(job.outputs[0].shape, spec::OutShape::Scalar);
}

TEST(BindJob, HistogramHasThreeArraysOf256) {
  auto job = bind_job(golden("histogram3d"));
  ASSERT_EQ(job.outputs.size(), 3u);
  for (const auto &o : job.outputs) {
    EXPECT_EQ(o.shape, spec::OutShape::Array);
    EXPECT_EQ(o.length, 256);
  }
  EXPECT_TRUE(job.combiner_enabled);
}

TEST(BindJob, CombinerEnabledForEveryCorpusJob) {
  for (const auto &name : kCorpus)
    EXPECT_TRUE(bind_job(golden(name)).combiner_enabled) << name;
}

TEST(BindJob, DifferingFoldTypesDisableCombiner) {
  auto s = golden("summation");
  s.candidate.folds[0].body =
      synth::s_bin(mj::BinOp::Lt, synth::s_acc(mj::Prim::Int),
                   synth::s_elem(mj::Prim::Int));
  EXPECT_FALSE(bind_job(s).combiner_enabled);
}

TEST(BindJob, UnknownArrayLengthIsRejected) {
  auto s = golden("histogram3d");
  s.tmpl.outputs[1].length.reset();
  try {
    bind_job(s);
    FAIL();
  } catch (const CodegenError &e) {
    EXPECT_TRUE(contains(e.what(), "shape underdetermined"));
  }
}

TEST(BindJob, InitMustMatchPrecondition) {
  auto s = golden("summation");
  s.candidate.folds[0].init = 1;
  EXPECT_THROW(bind_job(s), CodegenError);
}

TEST(Rewrite, HistogramAssignsEachArrayFromResult) {
  auto prog = mj::compile(cli::benchmark_source("histogram3d"));
  auto s = golden("histogram3d");
  auto out = rewrite_program(prog, cli::fragment_for(prog, s), s);
  auto src = mj::to_source(out);
  EXPECT_EQ(count(src, "mr_run(\"main:L0\", data)"), 1u);
  for (const std::string a : {"hR", "hG", "hB"})
    EXPECT_TRUE(contains(src, a + "[mr_j] = mr_cell(\"main:L0\""))
        << src;
  EXPECT_FALSE(contains(src, "data[i + 1]"));
}

TEST(Rewrite, SummationSingleAssignment) {
  auto prog = mj::compile(cli::benchmark_source("summation"));
  auto s = golden("summation");
  auto src = mj::to_source(rewrite_program(prog, cli::fragment_for(prog, s), s));
  EXPECT_TRUE(contains(src, "sum = mr_int(\"main:L0\", 0);"));
  EXPECT_FALSE(contains(src, "sum + data[i]"));
}

TEST(Rewrite, WrongFragmentIsRejected) {
  auto prog = mj::compile(cli::benchmark_source("summation"));
  auto s = golden("summation");
  auto f = cli::fragment_for(prog, s);
  s.fragment = "main:L7";
  EXPECT_THROW(rewrite_program(prog, f, s), CodegenError);
}

TEST(Rewrite, PreservesSemanticsOnCorpus) {
  for (const auto &name : kCorpus) {
    auto prog = mj::compile(cli::benchmark_source(name));
    auto s = golden(name);
    cli::CheckConfig cfg;
    cfg.trials = 1000;
    cfg.seed = 7;
    cfg.runtime.workers = 2;
    auto res = cli::check_lifted(prog, {{cli::fragment_for(prog, s), s}}, cfg);
    EXPECT_EQ(res.trials, 1000u);
    EXPECT_FALSE(res.mismatch) << name << ": " << res.mismatch->detail;
  }
}

TEST(Rewrite, TrappingInputsTrapInBoth) {
  auto prog = mj::compile(cli::benchmark_source("histogram3d"));
  auto s = golden("histogram3d");
  cli::CheckConfig cfg;
  cfg.trials = 200;
  cfg.gen.lo = -300;
  cfg.gen.hi = 300;
  auto res = cli::check_lifted(prog, {{cli::fragment_for(prog, s), s}}, cfg);
  EXPECT_FALSE(res.mismatch);
  EXPECT_GT(res.trapped, 100u);
}

TEST(Rewrite, CorruptedFoldIsCaught) {
  auto prog = mj::compile(cli::benchmark_source("summation"));
  auto s = golden("summation");
  s.candidate.folds[0].body =
      synth::s_bin(mj::BinOp::Mul, synth::s_acc(mj::Prim::Int),
                   synth::s_elem(mj::Prim::Int));
  cli::CheckConfig cfg;
  cfg.trials = 100;
  auto res = cli::check_lifted(prog, {{cli::fragment_for(prog, s), s}}, cfg);
  EXPECT_TRUE(res.mismatch.has_value());
}

TEST(Rewrite, TwoFragmentsInOneFunction) {
  const char *src = R"(int main(int[] data) {
  int s = 0;
  for (int i = 0; i < length(data); i++) {
    s = s + data[i];
  }
  int t = 0;
  int j = 0;
  while (j < length(data)) {
    t = t + data[j] * data[j];
    j = j + 1;
  }
  return s + t + j;
}
)";
  auto rep = lift(src);
  auto lifted = rep.lifted();
  ASSERT_EQ(lifted.size(), 2u);
  auto rw = mj::to_source(rewrite_program(rep.program, lifted));
  EXPECT_EQ(count(rw, "mr_run("), 2u);
  cli::CheckConfig cfg;
  cfg.trials = 300;
  cfg.gen.lo = -50;
  cfg.gen.hi = 50;
  auto res = cli::check_lifted(rep.program, lifted, cfg);
  EXPECT_FALSE(res.mismatch) << res.mismatch->detail;
}

TEST(Rewrite, InnerLoopUnderOuterLoop) {
  const char *src = R"(int main(int[] data, int reps) {
  int total = 0;
  int r = 0;
  while (r < reps) {
    int s = 0;
    for (int i = 0; i < length(data); i++) {
      s = s + data[i];
    }
    total = total + s;
    r = r + 1;
  }
  return total;
}
)";
  auto rep = lift(src);
  EXPECT_EQ(rep.rejections.size(), 1u);
  auto lifted = rep.lifted();
  ASSERT_EQ(lifted.size(), 1u);
  cli::CheckConfig cfg;
  cfg.trials = 200;
  cfg.gen.max_len = 16;
  cfg.gen.lo = 0;
  cfg.gen.hi = 9;
  auto res = cli::check_lifted(rep.program, lifted, cfg);
  EXPECT_FALSE(res.mismatch) << res.mismatch->detail;
}

TEST(Render, HistogramSketchMirrorsReference) {
  auto text = render_target_source(golden("histogram3d"), "hadoop-java-sketch");
  EXPECT_TRUE(contains(text, "extends Mapper"));
  EXPECT_TRUE(contains(text, "extends Reducer"));
  EXPECT_GE(count(text, "    if ("), 2u);
  EXPECT_EQ(count(text, "emit(new Key("), 3u);
  EXPECT_EQ(count(text, "value = value + val;"), 3u);
  EXPECT_TRUE(contains(text, "job.setCombiner("));
}

TEST(Render, SummationSketch) {
  auto text = render_target_source(golden("summation"), "hadoop-java-sketch");
  EXPECT_EQ(count(text, "emit(0, data[i]);"), 1u);
  EXPECT_EQ(count(text, "value = value + val;"), 1u);
}

TEST(Render, UnknownDialectIsAnError) {
  EXPECT_THROW(render_target_source(golden("summation"), "spark"),
               CodegenError);
}

TEST(Render, SketchesAreByteStable) {
  for (const auto &name : kCorpus)
    EXPECT_EQ(render_target_source(golden(name), "hadoop-java-sketch"),
              testutil::read_file(golden_path(name, ".sketch")))
        << name;
}
