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
#include "liftmr/bench/corpus.hpp"
#include "liftmr/codegen/codegen.hpp"
#include "liftmr/frontend/frontend.hpp"
#include "liftmr/runtime/runtime.hpp"
#include "liftmr/specgen/specgen.hpp"
#include "liftmr/synth/search.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace liftmr::cli {

using codegen::Lifted;

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct FragmentResult {
  analysis::LoopFragment fragment;
  synth::SynthResult result;
  double seconds = 0;
};

struct LiftReport {
  mj::Program program;
  std::vector<analysis::RejectionReport> rejections;
  std::vector<FragmentResult> fragments;

  std::vector<Lifted> lifted() const {
    std::vector<Lifted> out;
    for (const auto &f : fragments)
      if (const auto *s = std::get_if<synth::Summary>(&f.result))
        out.emplace_back(f.fragment, *s);
    return out;
  }
};

// Compiles the program and lifts every extracted fragment.
inline LiftReport lift_program(mj::Program prog, const synth::SynthConfig &cfg) {
  LiftReport r;
  r.program = std::move(prog);
  auto ex = analysis::extract_fragments(r.program);
  r.rejections = ex.rejections;
  for (const auto &f : ex.fragments) {
    auto t0 = std::chrono::steady_clock::now();
    auto roles = analysis::assign_var_ids(analysis::classify_vars(f));
    auto res = synth::synthesize(r.program, f, roles, cfg);
    r.fragments.push_back({f, std::move(res), seconds_since(t0)});
  }
  return r;
}

inline LiftReport lift_source(std::string_view src,
                              const synth::SynthConfig &cfg) {
  return lift_program(mj::compile(src), cfg);
}

// Finds the fragment a summary was lifted from.
inline analysis::LoopFragment fragment_for(const mj::Program &p,
                                           const synth::Summary &s) {
  auto ex = analysis::extract_fragments(p);
  for (const auto &f : ex.fragments)
    if (f.id == s.fragment)
      return f;
  throw codegen::CodegenError("program has no liftable fragment " +
                              s.fragment);
}

inline const mj::Function &main_function(const mj::Program &p) {
  for (const auto &f : p.functions)
    if (f.name == "main")
      return f;
  throw Error("program has no main function");
}

// Random arguments for main.
struct ArgGen {
  int max_len = 64;
  std::int64_t lo = 0;
  std::int64_t hi = 255;
  int alphabet = 8;
};

inline std::string token(int k) { return "w" + std::to_string(k); }

inline mj::Env random_args(const mj::Function &main, std::mt19937_64 &rng,
                           const ArgGen &g,
                           const std::map<std::string, std::int64_t> &strides =
                               {}) {
  mj::Env env;
  std::uniform_int_distribution<int> len(0, g.max_len);
  std::uniform_int_distribution<std::int64_t> val(g.lo, g.hi);
  std::uniform_int_distribution<int> tok(0, std::max(1, g.alphabet) - 1);
  for (const auto &p : main.params) {
    switch (p.type.kind) {
    case mj::Type::Kind::Int:
      env[p.name] = mj::Value(val(rng));
      break;
    case mj::Type::Kind::Bool:
      env[p.name] = mj::Value(tok(rng) % 2 == 0);
      break;
    case mj::Type::Kind::Str:
      env[p.name] = mj::Value(token(tok(rng)));
      break;
    case mj::Type::Kind::Array: {
      int n = len(rng);
      auto it = strides.find(p.name);
      if (it != strides.end() && it->second > 1)
        n -= n % static_cast<int>(it->second);
      if (p.type.elem == mj::Prim::Str) {
        mj::StrArray a;
        for (int i = 0; i < n; ++i)
          a.push_back(token(tok(rng)));
        env[p.name] = mj::Value(std::move(a));
      } else {
        mj::IntArray a;
        for (int i = 0; i < n; ++i)
          a.push_back(val(rng));
        env[p.name] = mj::Value(std::move(a));
      }
      break;
    }
    default:
      env[p.name] = mj::Value(mj::MapData{});
      break;
    }
  }
  return env;
}

inline mj::Env copy_env(const mj::Env &env) {
  mj::Env out;
  for (const auto &[k, v] : env)
    out[k] = v.deep_copy();
  return out;
}

// Agreement between the original and the rewritten program: both trap, or
// both finish with the same return value and the same final value for every
// variable of the original.
inline std::optional<std::string> compare_outcomes(const mj::InterpOutcome &a,
                                                   const mj::InterpOutcome &b) {
  if (a.trap || b.trap) {
    if (a.trap && b.trap)
      return std::nullopt;
    return a.trap ? "only the original traps: " + a.trap->message
                  : "only the rewritten program traps: " + b.trap->message;
  }
  if (a.ret.has_value() != b.ret.has_value() ||
      (a.ret && !(*a.ret == *b.ret)))
    return std::string("return values differ");
  for (const auto &[k, v] : a.env) {
    auto it = b.env.find(k);
    if (it == b.env.end())
      return "variable " + k + " missing after rewrite";
    if (!(it->second == v))
      return "variable " + k + " differs: " + v.str() + " vs " +
             it->second.str();
  }
  return std::nullopt;
}

struct Rewritten {
  mj::Program program;
  codegen::RuntimeHost host;
};

inline Rewritten rewrite_all(const mj::Program &p,
                             const std::vector<Lifted> &lifted,
                             runtime::RuntimeConfig rt = {},
                             bool combiner = true) {
  Rewritten r{codegen::rewrite_program(p, lifted), codegen::RuntimeHost(rt)};
  for (const auto &[f, s] : lifted) {
    auto job = codegen::bind_job(s);
    job.combiner_enabled = job.combiner_enabled && combiner;
    r.host.add(s.fragment, std::move(job));
  }
  return r;
}

struct Mismatch {
  std::size_t trial = 0;
  mj::Env args;
  std::string detail;
};

struct CheckConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  ArgGen gen;
  runtime::RuntimeConfig runtime;
};

struct CheckResult {
  std::size_t trials = 0;
  std::size_t trapped = 0;
  std::optional<Mismatch> mismatch;
};

// Differential test of the rewritten program against the original on random
// arguments for main.
inline CheckResult check_lifted(const mj::Program &p,
                                const std::vector<Lifted> &lifted,
                                const CheckConfig &cfg) {
  CheckResult res;
  auto rw = rewrite_all(p, lifted, cfg.runtime);
  const auto &main = main_function(p);
  std::map<std::string, std::int64_t> strides;
  for (const auto &[f, s] : lifted)
    strides[s.tmpl.data_var] =
        std::max<std::int64_t>(strides[s.tmpl.data_var], s.tmpl.stride);
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    auto args = random_args(main, rng, cfg.gen, strides);
    auto a = mj::interpret(p, copy_env(args));
    auto b = mj::interpret(rw.program, copy_env(args), mj::kDefaultFuel,
                           &rw.host);
    ++res.trials;
    if (a.trap && b.trap)
      ++res.trapped;
    if (auto d = compare_outcomes(a, b)) {
      res.mismatch = Mismatch{t, args, *d};
      return res;
    }
  }
  return res;
}

// Writes main's arguments as dataset files: one file per array and one
// `name=value` file for the scalars. Returns the written paths.
inline std::vector<std::string> write_args(const mj::Env &args,
                                           const std::string &dir,
                                           const std::string &prefix) {
  std::vector<std::string> paths;
  std::ostringstream scalars;
  for (const auto &[k, v] : args) {
    if (v.is_int_array() || v.is_str_array()) {
      std::string path = dir + "/" + prefix + "-" + k + ".txt";
      std::ofstream out(path);
      if (v.is_int_array())
        for (auto x : v.int_array())
          out << x << '\n';
      else
        for (const auto &x : v.str_array())
          out << x << '\n';
      if (!out)
        throw Error("cannot write " + path);
      paths.push_back(path);
    } else if (!v.is_map()) {
      scalars << k << '=' << runtime::scalar_text(v.to_scalar()) << '\n';
    }
  }
  if (!scalars.str().empty()) {
    std::string path = dir + "/" + prefix + "-args.txt";
    std::ofstream out(path);
    out << scalars.str();
    if (!out)
      throw Error("cannot write " + path);
    paths.push_back(path);
  }
  return paths;
}

// Parses a scalar argument against the input's type.
inline mj::Scalar parse_scalar(const std::string &text, mj::Prim type) {
  switch (type) {
  case mj::Prim::Int: {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(text, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != text.size())
      throw Error("not an integer: " + text);
    return v;
  }
  case mj::Prim::Bool:
    if (text == "true" || text == "false")
      return text == "true";
    throw Error("not a bool: " + text);
  case mj::Prim::Str:
    return text;
  }
  return text;
}

// Scalar job inputs from `name=value` bindings, in template order.
inline std::vector<mj::Scalar>
job_inputs(const synth::Summary &s,
           const std::map<std::string, std::string> &bindings) {
  std::vector<mj::Scalar> out;
  for (const auto &in : s.tmpl.inputs) {
    auto it = bindings.find(in.name);
    if (it == bindings.end())
      throw Error("missing value for input '" + in.name + "' (use --arg " +
                  in.name + "=VALUE)");
    out.push_back(parse_scalar(it->second, in.type));
  }
  for (const auto &[k, v] : bindings) {
    bool known = false;
    for (const auto &in : s.tmpl.inputs)
      known = known || in.name == k;
    if (!known)
      throw Error("summary has no input '" + k + "'");
  }
  return out;
}

// Human-readable output values.
inline std::string format_text(const runtime::Job &job,
                               const runtime::OutputEnv &out) {
  std::ostringstream os;
  for (const auto &o : job.outputs)
    os << o.name << " = " << out.at(o.id).str() << '\n';
  return os.str();
}

// Benchmark datasets.
struct BenchSpec {
  std::string name;
  std::size_t size = 1000000;
  std::uint64_t seed = 1;
};

inline bool is_benchmark(const std::string &name) {
  for (const auto &e : bench::corpus())
    if (e.name == name)
      return true;
  return false;
}

inline std::string_view benchmark_source(const std::string &name) {
  for (const auto &e : bench::corpus())
    if (e.name == name)
      return e.source;
  throw Error("unknown benchmark '" + name + "'");
}

inline constexpr int kVocabulary = 1000;

// Arguments for the benchmark's main. `size` counts data elements and is
// rounded down to the stride.
inline mj::Env generate(const BenchSpec &b) {
  std::mt19937_64 rng(b.seed);
  mj::Env env;
  auto ints = [&](std::size_t n, std::int64_t lo, std::int64_t hi) {
    std::uniform_int_distribution<std::int64_t> d(lo, hi);
    mj::IntArray a(n);
    for (auto &x : a)
      x = d(rng);
    return a;
  };
  auto tokens = [&](std::size_t n) {
    std::uniform_int_distribution<int> d(0, kVocabulary - 1);
    mj::StrArray a(n);
    for (auto &x : a)
      x = token(d(rng));
    return a;
  };
  if (b.name == "summation") {
    env["data"] = mj::Value(ints(b.size, -1000, 1000));
  } else if (b.name == "wordcount") {
    env["data"] = mj::Value(tokens(b.size));
  } else if (b.name == "stringmatch") {
    env["data"] = mj::Value(tokens(b.size));
    std::uniform_int_distribution<int> d(0, 2 * kVocabulary - 1);
    env["k1"] = mj::Value(token(d(rng)));
    env["k2"] = mj::Value(token(d(rng)));
  } else if (b.name == "histogram3d") {
    env["data"] = mj::Value(ints(b.size - b.size % 3, 0, 255));
  } else if (b.name == "linregress") {
    env["data"] = mj::Value(ints(b.size - b.size % 2, -100, 100));
  } else {
    throw Error("unknown benchmark '" + b.name + "'");
  }
  return env;
}

// FNV-1a over the canonical dataset text.
inline std::uint64_t dataset_hash(const mj::Env &env) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&](const std::string &s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '\n';
    h *= 1099511628211ull;
  };
  for (const auto &[k, v] : env) {
    feed(k);
    if (v.is_int_array())
      for (auto x : v.int_array())
        feed(std::to_string(x));
    else if (v.is_str_array())
      for (const auto &x : v.str_array())
        feed(x);
    else
      feed(runtime::scalar_text(v.to_scalar()));
  }
  return h;
}

// Runtime outputs against the interpreter's final values.
inline bool outputs_agree(const runtime::Job &job,
                          const runtime::OutputEnv &out,
                          const mj::InterpOutcome &seq) {
  if (seq.trap)
    return false;
  for (const auto &o : job.outputs) {
    auto it = seq.env.find(o.name);
    if (it == seq.env.end() || !(it->second == out.at(o.id)))
      return false;
  }
  return true;
}

inline std::vector<mj::Scalar> scalar_inputs(const synth::Summary &s,
                                             const mj::Env &args) {
  std::vector<mj::Scalar> out;
  for (const auto &in : s.tmpl.inputs) {
    if (in.element)
      throw Error("element inputs are not bound from arguments");
    out.push_back(args.at(in.name).to_scalar());
  }
  return out;
}

struct WorkerTiming {
  int workers = 1;
  double seconds = 0;
  bool equivalent = false;
};

struct BenchRow {
  std::string name;
  std::size_t size = 0;
  std::uint64_t data_hash = 0;
  bool lifted = false;
  std::string error;
  double lift_seconds = 0;
  int iteration = 0;
  std::size_t candidates = 0;
  double sequential_seconds = 0;
  std::vector<WorkerTiming> jobs;
};

struct BenchConfig {
  std::vector<std::string> names;
  std::size_t size = 1000000;
  std::uint64_t seed = 1;
  std::vector<int> workers{1, 4};
  int runs = 3;
  synth::SynthConfig synth;
};

inline double median(std::vector<double> v) {
  if (v.empty())
    return 0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

inline BenchRow bench_one(const std::string &name, const BenchConfig &cfg) {
  BenchRow row;
  row.name = name;
  try {
    auto args = generate({name, cfg.size, cfg.seed});
    row.size = args.at("data").is_int_array() ? args.at("data").int_array().size()
                                              : args.at("data").str_array().size();
    row.data_hash = dataset_hash(args);
    auto t0 = std::chrono::steady_clock::now();
    auto rep = lift_source(benchmark_source(name), cfg.synth);
    row.lift_seconds = seconds_since(t0);
    auto lifted = rep.lifted();
    if (lifted.size() != 1) {
      row.error = "lift failed";
      for (const auto &f : rep.fragments)
        if (const auto *g = std::get_if<synth::GiveUp>(&f.result))
          row.error += ": " + g->reason;
      return row;
    }
    const auto &s = lifted[0].second;
    row.lifted = true;
    row.iteration = s.stats.iteration;
    row.candidates = s.stats.candidates;
    std::vector<double> seq;
    mj::InterpOutcome ref;
    for (int r = 0; r < cfg.runs; ++r) {
      auto env = copy_env(args);
      auto t1 = std::chrono::steady_clock::now();
      ref = mj::interpret(rep.program, env);
      seq.push_back(seconds_since(t1));
    }
    row.sequential_seconds = median(seq);
    auto job = codegen::bind_job(s);
    auto inputs = scalar_inputs(s, args);
    for (int w : cfg.workers) {
      runtime::RuntimeConfig rc;
      rc.workers = w;
      std::vector<double> times;
      bool ok = true;
      for (int r = 0; r < cfg.runs; ++r) {
        auto t1 = std::chrono::steady_clock::now();
        auto out = runtime::execute(job, args.at("data"), inputs, rc);
        times.push_back(seconds_since(t1));
        ok = ok && outputs_agree(job, out, ref);
      }
      row.jobs.push_back({w, median(times), ok});
    }
  } catch (const std::exception &e) {
    row.error = e.what();
  }
  return row;
}

inline std::string format_report(const std::vector<BenchRow> &rows,
                                 bool tsv) {
  std::ostringstream os;
  char buf[64];
  auto fixed = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  if (tsv)
    os << "benchmark\tsize\tdata_hash\tlift_s\titeration\tcandidates\tseq_s"
          "\tworkers\tjob_s\tequivalent\n";
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(r.data_hash));
    std::string hash = buf;
    if (!r.lifted || !r.error.empty()) {
      if (tsv)
        os << r.name << '\t' << r.size << '\t' << hash << "\t-\t-\t-\t-\t-\t-\t"
           << "error: " << r.error << '\n';
      else
        os << r.name << ": error: " << r.error << '\n';
      continue;
    }
    if (tsv) {
      for (const auto &j : r.jobs)
        os << r.name << '\t' << r.size << '\t' << hash << '\t'
           << fixed(r.lift_seconds) << '\t' << r.iteration << '\t'
           << r.candidates << '\t' << fixed(r.sequential_seconds) << '\t'
           << j.workers << '\t' << fixed(j.seconds) << '\t'
           << (j.equivalent ? "pass" : "FAIL") << '\n';
      continue;
    }
    os << r.name << ": size " << r.size << ", data hash " << hash << '\n';
    os << "  lift " << fixed(r.lift_seconds) << " s, iteration " << r.iteration
       << ", candidates " << r.candidates << '\n';
    os << "  sequential (interpreter) " << fixed(r.sequential_seconds)
       << " s\n";
    for (const auto &j : r.jobs)
      os << "  job workers=" << j.workers << " " << fixed(j.seconds)
         << " s, equivalence " << (j.equivalent ? "pass" : "FAIL") << '\n';
  }
  return os.str();
}

} // namespace liftmr::cli
