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

#include "liftmr/cli/commands.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

using namespace liftmr;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "liftmr");
  std::vector<char *> argv;
  for (auto &a : args)
    argv.push_back(a.data());
  std::ostringstream out, err;
  int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("liftmr-cli-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string &name, const std::string &text) {
    auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string &name) { return (dir_ / name).string(); }

  static std::string corpus(const std::string &name) {
    return testutil::corpus_path(name);
  }
  static std::string golden(const std::string &name) {
    return std::string(LIFTMR_SOURCE_DIR) + "/tests/golden/" + name +
           ".summary";
  }

  fs::path dir_;
};

const char *kNested = R"(int main(int[] data, int reps) {
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

} // namespace

TEST_F(Cli, LiftHistogramWritesOneSummary) {
  auto r = invoke({"lift", corpus("histogram3d"), "--out", path("out")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err.find("rejected"), std::string::npos);
  std::size_t docs = 0;
  for (const auto &e : fs::directory_iterator(path("out")))
    docs += e.path().extension() == ".summary";
  EXPECT_EQ(docs, 1u);
  EXPECT_EQ(testutil::read_file(path("out/histogram3d.main_L0.summary")),
            testutil::read_file(golden("histogram3d")));
}

TEST_F(Cli, LiftNestedLoopLiftsInnerAndRejectsOuter) {
  auto src = file("nested.mj", kNested);
  auto r = invoke({"lift", src, "--format", "tsv"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("main:L0\trejected"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("main:L1\tlifted\t1"), std::string::npos) << r.out;
}

TEST_F(Cli, LiftWithoutLoopsFails) {
  auto src = file("flat.mj", "int main(int x) {\n  return x + 1;\n}\n");
  auto r = invoke({"lift", src});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, LiftParseErrorIsUsageFailure) {
  auto src = file("bad.mj", "int main(int[] data {\n");
  EXPECT_EQ(invoke({"lift", src}).code, 1);
  EXPECT_EQ(invoke({"lift", path("missing.mj")}).code, 1);
}

TEST_F(Cli, LiftIsIdempotent) {
  for (const char *name : {"summation", "stringmatch"}) {
    auto a = invoke({"lift", corpus(name), "--sketch", "--out", path("a")});
    auto b = invoke({"lift", corpus(name), "--sketch", "--out", path("b")});
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    for (const char *ext : {".summary", ".sketch"}) {
      std::string f = std::string("/") + name + ".main_L0" + ext;
      EXPECT_EQ(testutil::read_file(path("a") + f),
                testutil::read_file(path("b") + f));
    }
  }
}

TEST_F(Cli, GlobalFlagsReachTheSynthesizer) {
  auto r = invoke({"lift", corpus("summation"), "--bmc-max-len", "2",
                "--bmc-int-range", "-1:1", "--bmc-alphabet", "2", "--seed",
                "5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("domain max-len 2 int-range -1:1 alphabet 2"),
            std::string::npos)
      << r.out;
  EXPECT_EQ(invoke({"lift", corpus("summation"), "--bmc-int-range", "3"}).code, 1);
  EXPECT_EQ(invoke({"lift", corpus("summation"), "--format", "xml"}).code, 1);
}

TEST_F(Cli, RunSummationPrintsCanonicalLine) {
  auto data = file("d.txt", "2\n3\n");
  auto r = invoke({"run", golden("summation"), data});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0\t-\t5\n");
  auto t = invoke({"run", golden("summation"), data, "--format", "text"});
  EXPECT_EQ(t.out, "sum = 5\n");
}

TEST_F(Cli, RunOnEmptyFileGivesInitValues) {
  auto data = file("e.txt", "");
  EXPECT_EQ(invoke({"run", golden("summation"), data}).out, "0\t-\t0\n");
  auto h = invoke({"run", golden("histogram3d"), data});
  EXPECT_EQ(h.code, 0);
  EXPECT_EQ(std::count(h.out.begin(), h.out.end(), '\n'), 3 * 256);
}

TEST_F(Cli, RunHistogramHasThreeNonzeroCells) {
  auto data = file("h.txt", "1\n0\n2\n");
  for (const char *extra : {"--no-combiner", "--workers=3"}) {
    auto r = invoke({"run", golden("histogram3d"), data, extra,
                  "--partition-size", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> nonzero;
    while (std::getline(in, line))
      if (line.substr(line.rfind('\t') + 1) != "0")
        nonzero.push_back(line);
    EXPECT_EQ(nonzero,
              (std::vector<std::string>{"0\t1\t1", "1\t0\t1", "2\t2\t1"}));
  }
}

TEST_F(Cli, RunBindsScalarInputs) {
  auto data = file("w.txt", "a\nb\na\n");
  auto r = invoke({"run", golden("stringmatch"), data, "--arg", "k1=b", "--arg",
                "k2=z"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0\t-\ttrue\n1\t-\tfalse\n");
  EXPECT_EQ(invoke({"run", golden("stringmatch"), data, "--arg", "k1=b"}).code, 1);
  EXPECT_EQ(invoke({"run", golden("stringmatch"), data, "--arg", "k1=b", "--arg",
                 "k2=c", "--arg", "k3=d"})
                .code,
            1);
  auto wc = invoke({"run", golden("wordcount"), data});
  EXPECT_EQ(wc.out, "0\ta\t2\n0\tb\t1\n");
}

TEST_F(Cli, RunErrors) {
  auto bad = file("bad.txt", "1\nx\n");
  EXPECT_EQ(invoke({"run", golden("summation"), bad}).code, 1);
  auto big = file("big.txt", "1\n999\n2\n");
  auto r = invoke({"run", golden("histogram3d"), big});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("job failed"), std::string::npos);
  auto doc = file("broken.summary", "liftmr-summary v1\nfragment x\n");
  EXPECT_EQ(invoke({"run", doc, big}).code, 1);
}

TEST_F(Cli, CheckPassesOnCorpus) {
  for (const char *name : {"summation", "wordcount", "stringmatch",
                           "histogram3d", "linregress"}) {
    auto r = invoke({"check", corpus(name), golden(name), "--trials", "1000"});
    EXPECT_EQ(r.code, 0) << name << ": " << r.out << r.err;
    EXPECT_NE(r.out.find("pass: 1000 trials"), std::string::npos);
  }
}

TEST_F(Cli, CheckReportsMismatchWithReproducer) {
  auto text = testutil::read_file(golden("summation"));
  text.replace(text.find("(+ value v)"), 11, "(* value v)");
  auto doc = file("bad.summary", text);
  auto r = invoke({"check", corpus("summation"), doc, "--out", path("repro")});
  EXPECT_EQ(r.code, 3);
  auto at = r.out.find("reproducer: ");
  ASSERT_NE(at, std::string::npos) << r.out;
  auto repro = r.out.substr(at + 12, r.out.find('\n', at) - at - 12);
  EXPECT_TRUE(fs::exists(repro));
  auto data = runtime::load_data(repro, mj::Prim::Int);
  auto prog = mj::compile(testutil::corpus_file("summation"));
  auto seq = mj::interpret(prog, mj::Env{{"data", data}});
  auto job = codegen::bind_job(codegen::parse_summary(text));
  auto out = runtime::execute(job, data, {}, {});
  EXPECT_FALSE(*seq.ret == out.at(0));
}

TEST_F(Cli, CheckWithZeroTrialsWarns) {
  auto r = invoke({"check", corpus("summation"), golden("summation"), "--trials",
                "0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST_F(Cli, CheckRejectsForeignSummary) {
  auto r = invoke({"check", corpus("summation"), golden("wordcount")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, BenchReportsEveryWorkerCount) {
  auto r = invoke({"bench", "summation", "wordcount", "--size", "5000",
                "--worker-counts", "1,4", "--runs", "3", "--format", "tsv",
                "--out", path("bench")});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("benchmark\t", 0), 0u);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind('\t') + 1), "pass") << line;
  }
  EXPECT_EQ(rows, 4u);
  EXPECT_TRUE(fs::exists(path("bench/bench.tsv")));
}

TEST_F(Cli, BenchUnknownName) {
  EXPECT_EQ(invoke({"bench", "kmeans"}).code, 1);
}

TEST(Generators, DeterministicUnderSeed) {
  for (const auto &e : bench::corpus()) {
    std::string n(e.name);
    auto a = cli::generate({n, 3001, 9});
    auto b = cli::generate({n, 3001, 9});
    auto c = cli::generate({n, 3001, 10});
    EXPECT_EQ(cli::dataset_hash(a), cli::dataset_hash(b)) << n;
    EXPECT_NE(cli::dataset_hash(a), cli::dataset_hash(c)) << n;
  }
  auto h = cli::generate({"histogram3d", 3001, 1}).at("data").int_array();
  EXPECT_EQ(h.size(), 3000u);
  for (auto v : h)
    EXPECT_TRUE(v >= 0 && v < 256);
  EXPECT_EQ(cli::generate({"linregress", 3001, 1}).at("data").int_array().size(),
            3000u);
  EXPECT_THROW(cli::generate({"kmeans", 10, 1}), Error);
}

TEST(Binary, ExitCodesAndOutput) {
  auto tmp = fs::temp_directory_path() /
             ("liftmr-bin-" + std::to_string(::getpid()) + ".txt");
  std::ofstream(tmp) << "2\n3\n";
  std::string cmd = std::string(LIFTMR_CLI_PATH) + " run " +
                    std::string(LIFTMR_SOURCE_DIR) +
                    "/tests/golden/summation.summary " + tmp.string();
  FILE *p = ::popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  char buf[256];
  std::string out;
  while (std::fgets(buf, sizeof buf, p))
    out += buf;
  int status = ::pclose(p);
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(out, "0\t-\t5\n");
  status = std::system((std::string(LIFTMR_CLI_PATH) + " 2>/dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
  fs::remove(tmp);
}
