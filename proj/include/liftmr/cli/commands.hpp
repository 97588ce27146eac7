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

#include "liftmr/cli/driver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liftmr::cli {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kLiftFailure = 2,
  kMismatch = 3,
};

struct Options {
  int bmc_max_len = 4;
  std::string bmc_int_range = "-2:2";
  int bmc_alphabet = 3;
  std::optional<int> recursion_bound;
  std::optional<int> max_emits;
  double timeout = 600;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;

  std::string file;
  std::string doc;
  std::string data;
  std::vector<std::string> docs;
  std::vector<std::string> args;
  std::size_t partition_size = 0;
  bool no_combiner = false;
  bool sketch = false;
  std::size_t trials = 1000;
  int check_max_len = 64;
  std::string check_int_range = "0:255";
  int check_alphabet = 8;
  std::vector<std::string> benchmarks;
  std::size_t size = 1000000;
  int runs = 3;
  std::vector<int> worker_counts{1, 4};
};

class UsageError : public Error {
public:
  using Error::Error;
};

inline std::pair<std::int64_t, std::int64_t> parse_range(const std::string &s) {
  auto colon = s.find(':', 1);
  if (colon == std::string::npos)
    throw UsageError("expected LO:HI, got '" + s + "'");
  try {
    std::size_t a = 0, b = 0;
    auto lo = std::stoll(s.substr(0, colon), &a);
    auto hi = std::stoll(s.substr(colon + 1), &b);
    if (a != colon || b != s.size() - colon - 1 || lo > hi)
      throw UsageError("bad range '" + s + "'");
    return {lo, hi};
  } catch (const std::logic_error &) {
    throw UsageError("bad range '" + s + "'");
  }
}

inline synth::SynthConfig synth_config(const Options &o) {
  synth::SynthConfig c;
  c.domain.max_len = o.bmc_max_len;
  auto [lo, hi] = parse_range(o.bmc_int_range);
  c.domain.lo = lo;
  c.domain.hi = hi;
  c.domain.alphabet = o.bmc_alphabet;
  c.recursion_bound = o.recursion_bound;
  c.max_emits = o.max_emits;
  c.timeout_s = o.timeout;
  c.workers = o.workers;
  c.seed = o.seed;
  return c;
}

inline std::string read_text(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  out << text;
  if (!out)
    throw Error("cannot write " + path);
}

inline std::string file_stem(const std::string &fragment) {
  std::string s = fragment;
  for (auto &c : s)
    if (c == ':')
      c = '_';
  return s;
}

inline int cmd_lift(const Options &o, std::ostream &out, std::ostream &err) {
  mj::Program prog;
  try {
    prog = mj::compile(read_text(o.file));
  } catch (const Error &e) {
    err << o.file << ": " << e.what() << '\n';
    return kUsage;
  }
  auto rep = lift_program(prog, synth_config(o));
  bool tsv = o.format == "tsv";
  if (!o.out.empty())
    std::filesystem::create_directories(o.out);
  std::string stem = std::filesystem::path(o.file).stem().string();
  std::size_t lifted = 0;
  for (const auto &r : rep.rejections) {
    err << "rejected " << r.str() << '\n';
    if (tsv)
      out << r.loc.id() << "\trejected\t-\t-\t-\t" << r.str() << '\n';
  }
  for (const auto &f : rep.fragments) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", f.seconds);
    if (const auto *g = std::get_if<synth::GiveUp>(&f.result)) {
      err << "gave up on " << f.fragment.id << ": " << g->reason << '\n';
      if (tsv)
        out << f.fragment.id << "\tgave-up\t-\t" << g->stats.candidates << '\t'
            << secs << '\t' << g->reason << '\n';
      continue;
    }
    const auto &s = std::get<synth::Summary>(f.result);
    ++lifted;
    err << "lifted " << s.fragment << " (iteration " << s.stats.iteration
        << ", " << s.stats.candidates << " candidates, " << secs << " s)\n";
    auto doc = codegen::emit_summary(s);
    std::string sketch =
        o.sketch ? codegen::render_target_source(s, "hadoop-java-sketch") : "";
    if (!o.out.empty()) {
      std::string base = o.out + "/" + stem + "." + file_stem(s.fragment);
      write_text(base + ".summary", doc);
      if (o.sketch)
        write_text(base + ".sketch", sketch);
    }
    if (tsv) {
      out << s.fragment << "\tlifted\t" << s.stats.iteration << '\t'
          << s.stats.candidates << '\t' << secs << "\t-\n";
    } else if (o.out.empty()) {
      out << doc;
      if (o.sketch)
        out << sketch;
    }
  }
  if (rep.fragments.empty() && rep.rejections.empty())
    err << "no loops found\n";
  return lifted > 0 ? kOk : kLiftFailure;
}

inline std::map<std::string, std::string>
parse_bindings(const std::vector<std::string> &args) {
  std::map<std::string, std::string> out;
  for (const auto &a : args) {
    auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("expected NAME=VALUE, got '" + a + "'");
    out[a.substr(0, eq)] = a.substr(eq + 1);
  }
  return out;
}

inline int cmd_run(const Options &o, std::ostream &out, std::ostream &err) {
  synth::Summary s;
  runtime::Job job;
  mj::Value data;
  std::vector<mj::Scalar> inputs;
  try {
    s = codegen::parse_summary(read_text(o.doc));
    job = codegen::bind_job(s);
    data = runtime::load_data(o.data, s.tmpl.data_elem);
    inputs = job_inputs(s, parse_bindings(o.args));
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  if (o.no_combiner)
    job.combiner_enabled = false;
  runtime::RuntimeConfig rc;
  rc.workers = o.workers;
  rc.partition_size = o.partition_size;
  try {
    auto env = runtime::execute(job, data, inputs, rc);
    out << (o.format == "text" ? format_text(job, env)
                               : runtime::format_tsv(env));
  } catch (const runtime::RuntimeError &e) {
    err << "job failed: " << e.what() << '\n';
    return kLiftFailure;
  }
  return kOk;
}

inline int cmd_check(const Options &o, std::ostream &out, std::ostream &err) {
  mj::Program prog;
  std::vector<Lifted> lifted;
  try {
    prog = mj::compile(read_text(o.file));
    for (const auto &d : o.docs) {
      auto s = codegen::parse_summary(read_text(d));
      lifted.emplace_back(fragment_for(prog, s), s);
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  if (o.trials == 0)
    err << "warning: 0 trials, the check is vacuous\n";
  CheckConfig cfg;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.gen.max_len = o.check_max_len;
  auto [lo, hi] = parse_range(o.check_int_range);
  cfg.gen.lo = lo;
  cfg.gen.hi = hi;
  cfg.gen.alphabet = o.check_alphabet;
  cfg.runtime.workers = o.workers;
  CheckResult res;
  try {
    res = check_lifted(prog, lifted, cfg);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  if (!res.mismatch) {
    out << "pass: " << res.trials << " trials (" << res.trapped
        << " trapped in both)\n";
    return kOk;
  }
  std::string dir = o.out;
  if (dir.empty())
    dir = (std::filesystem::temp_directory_path() /
           ("liftmr-mismatch-" + std::to_string(o.seed)))
              .string();
  std::filesystem::create_directories(dir);
  auto paths = write_args(res.mismatch->args, dir, "mismatch");
  out << "mismatch at trial " << res.mismatch->trial << ": "
      << res.mismatch->detail << '\n';
  for (const auto &p : paths)
    out << "reproducer: " << p << '\n';
  return kMismatch;
}

inline int cmd_bench(const Options &o, std::ostream &out, std::ostream &err) {
  BenchConfig cfg;
  cfg.names = o.benchmarks;
  if (cfg.names.empty())
    for (const auto &e : bench::corpus())
      cfg.names.emplace_back(e.name);
  for (const auto &n : cfg.names)
    if (!is_benchmark(n)) {
      err << "error: unknown benchmark '" << n << "'\n";
      return kUsage;
    }
  if (o.runs < 1) {
    err << "error: --runs must be at least 1\n";
    return kUsage;
  }
  cfg.size = o.size;
  cfg.seed = o.seed;
  cfg.workers = o.worker_counts;
  cfg.runs = o.runs;
  cfg.synth = synth_config(o);
  cfg.synth.seed = 1;
  std::vector<BenchRow> rows;
  int code = kOk;
  for (const auto &n : cfg.names) {
    err << "bench " << n << '\n';
    rows.push_back(bench_one(n, cfg));
    const auto &r = rows.back();
    if (!r.error.empty())
      code = std::max(code, static_cast<int>(kLiftFailure));
    for (const auto &j : r.jobs)
      if (!j.equivalent)
        code = kMismatch;
  }
  auto report = format_report(rows, o.format == "tsv");
  out << report;
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    write_text(o.out + "/bench." + (o.format == "tsv" ? "tsv" : "txt"),
               report);
  }
  return code;
}

inline int run_cli(int argc, char **argv, std::ostream &out,
                   std::ostream &err) {
  Options o;
  CLI::App app{"liftmr: lift loops into MapReduce summaries"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--bmc-max-len", o.bmc_max_len,
                 "Bounded domain: maximum loop iterations")
      ->check(CLI::PositiveNumber);
  app.add_option("--bmc-int-range", o.bmc_int_range,
                 "Bounded domain: integer range LO:HI");
  app.add_option("--bmc-alphabet", o.bmc_alphabet,
                 "Bounded domain: number of string tokens")
      ->check(CLI::PositiveNumber);
  app.add_option("--recursion-bound", o.recursion_bound,
                 "Initial expression depth bound");
  app.add_option("--max-emits", o.max_emits, "Initial emit budget");
  app.add_option("--timeout", o.timeout, "Per-fragment synthesis timeout (s)");
  app.add_option("--workers", o.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"text", "tsv"}));

  auto *lift = app.add_subcommand("lift", "Lift every loop of an MJ program");
  lift->fallthrough();
  lift->add_option("file", o.file, "MJ source")->required();
  lift->add_flag("--sketch", o.sketch, "Also render the Hadoop-style sketch");

  auto *run = app.add_subcommand("run", "Run a summary on a dataset");
  run->fallthrough();
  run->add_option("summary", o.doc, "Summary document")->required();
  run->add_option("data", o.data, "Dataset, one element per line")->required();
  run->add_option("--arg", o.args, "Scalar input NAME=VALUE");
  run->add_option("--partition-size", o.partition_size,
                  "Elements per map split (0: even split)");
  run->add_flag("--no-combiner", o.no_combiner, "Disable the combiner");

  auto *check = app.add_subcommand(
      "check", "Compare lifted and sequential execution on random data");
  check->fallthrough();
  check->add_option("program", o.file, "MJ source")->required();
  check->add_option("summaries", o.docs, "Summary documents")->required();
  check->add_option("--trials", o.trials, "Random datasets");
  check->add_option("--max-len", o.check_max_len, "Maximum array length")
      ->check(CLI::NonNegativeNumber);
  check->add_option("--int-range", o.check_int_range, "Integer range LO:HI");
  check->add_option("--alphabet", o.check_alphabet, "Number of tokens")
      ->check(CLI::PositiveNumber);

  auto *bench = app.add_subcommand("bench", "Time the corpus benchmarks");
  bench->fallthrough();
  bench->add_option("benchmarks", o.benchmarks, "Benchmark names (default all)");
  bench->add_option("--size", o.size, "Data elements per benchmark");
  bench->add_option("--runs", o.runs, "Timed runs per measurement");
  bench->add_option("--worker-counts", o.worker_counts, "Job worker counts")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  try {
    if (*lift)
      return cmd_lift(o, out, err);
    if (*run)
      return cmd_run(o, out, err);
    if (*check)
      return cmd_check(o, out, err);
    return cmd_bench(o, out, err);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kLiftFailure;
  }
}

} // namespace liftmr::cli
