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
#include "liftmr/synth/candidate.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace liftmr::runtime {

using mj::Prim;
using spec::OutShape;
using synth::AssocArray;
using synth::Candidate;
using synth::Key;
using synth::Symbols;

class RuntimeError : public Error {
public:
  using Error::Error;
};

class RuntimeTrap : public RuntimeError {
public:
  RuntimeTrap(const std::string &phase, std::int64_t index)
      : RuntimeError("trap in " + phase + " at index " +
                     std::to_string(index)),
        index(index) {}
  std::int64_t index;
};

class ShapeError : public RuntimeError {
public:
  using RuntimeError::RuntimeError;
};

struct OutputShape {
  std::string name;
  int id = 0;
  OutShape shape = OutShape::Scalar;
  Prim value = Prim::Int;
  Prim key = Prim::Int;     // Map
  std::int64_t length = 0;  // Array
};

struct Job {
  Candidate candidate;
  std::vector<OutputShape> outputs;
  Prim data_elem = Prim::Int;
  std::vector<spec::ScalarInput> inputs;
  std::vector<std::string> str_lits; // interned before data
  bool combiner_enabled = false;

  const OutputShape *output(int id) const {
    for (const auto &o : outputs)
      if (o.id == id)
        return &o;
    return nullptr;
  }
};

// Combiner rule: the fold consumes and produces the same value type.
inline bool fold_types_match(const synth::Fold &f) {
  synth::TypeEnv env;
  env.fold = f.type;
  return f.body && f.body->type == f.type && synth::well_typed(f.body, env);
}

struct RuntimeConfig {
  int workers = 1;
  std::size_t partition_size = 0; // 0: ceil(len / workers)
};

struct KVPair {
  Key key;
  std::int64_t value = 0;
  Prim type = Prim::Int;

  bool operator==(const KVPair &) const = default;
};

using Partitioned = std::vector<std::vector<KVPair>>;

struct Group {
  Key key;
  Prim type = Prim::Int;
  std::vector<std::int64_t> values; // by (partition, emission order)
};

using GroupedData = std::vector<Group>; // sorted by key

using OutputEnv = std::map<int, mj::Value>;

struct ExecStats {
  std::size_t map_calls = 0;
  std::size_t partitions = 0;
  std::size_t pairs = 0;
};

// Job inputs encoded against the job's symbol table.
struct Encoded {
  Symbols syms;
  std::vector<std::int64_t> data;
  std::vector<std::int64_t> inputs;
  synth::CompiledCandidate cc;
  std::vector<Prim> value_types; // per emit
};

inline Encoded encode(const Job &job, const mj::Value &data,
                      const std::vector<mj::Scalar> &inputs) {
  Encoded e;
  for (const auto &s : job.str_lits)
    e.syms.intern(s);
  if (job.data_elem == Prim::Int) {
    if (!data.is_int_array())
      throw RuntimeError("data is not an int array");
    e.data = data.int_array();
  } else {
    if (data.is_int_array())
      throw RuntimeError("data is not a string array");
    for (const auto &s : data.str_array())
      e.data.push_back(e.syms.intern(s));
  }
  if (inputs.size() != job.inputs.size())
    throw RuntimeError("expected " + std::to_string(job.inputs.size()) +
                       " scalar inputs");
  for (const auto &s : inputs)
    e.inputs.push_back(e.syms.encode(s));
  e.cc = synth::CompiledCandidate(job.candidate, e.syms);
  for (const auto &em : job.candidate.emits)
    e.value_types.push_back(em.value->type);
  return e;
}

namespace detail {

inline std::size_t partition_size(std::size_t len, const RuntimeConfig &cfg) {
  if (cfg.partition_size)
    return cfg.partition_size;
  auto w = static_cast<std::size_t>(std::max(1, cfg.workers));
  return std::max<std::size_t>(1, (len + w - 1) / w);
}

// Runs task(k) for k in [0, n) on up to `workers` threads.
template <class F> void parallel_for(std::size_t n, int workers, F &&task) {
  auto w = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)),
                                 n);
  if (w <= 1) {
    for (std::size_t k = 0; k < n; ++k)
      task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t k = next.fetch_add(1);
        if (k >= n)
          return;
        try {
          task(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err)
            err = std::current_exception();
        }
      }
    });
  for (auto &t : pool)
    t.join();
  if (err)
    std::rethrow_exception(err);
}

struct TrapIndex {
  std::mutex mu;
  std::optional<std::int64_t> first;
  void note(std::int64_t i) {
    std::lock_guard<std::mutex> lock(mu);
    if (!first || i < *first)
      first = i;
  }
};

inline bool fold_value(const Encoded &e, const Key &k, std::int64_t acc,
                       std::int64_t v, std::int64_t &out) {
  if (!e.cc.has_fold(k.id()))
    return false;
  return e.cc.fold(k.id(), acc, v, out);
}

// Applies f_m over one partition; with combine, folds per key in the
// mapper, keeping first-occurrence order.
inline bool map_partition(const Encoded &e, std::size_t lo, std::size_t hi,
                          bool combine, std::vector<KVPair> &out,
                          std::int64_t &fail) {
  synth::EvalCtx ctx;
  ctx.data = e.data.data();
  ctx.len = static_cast<std::int64_t>(e.data.size());
  ctx.inputs = e.inputs.data();
  std::unordered_map<Key, std::size_t, synth::KeyHash> slot;
  bool ok = true;
  for (std::size_t i = lo; i < hi && ok; ++i) {
    ctx.i = static_cast<std::int64_t>(i);
    bool mapped = e.cc.map_at(ctx, [&](const Key &k, std::int64_t v,
                                       std::size_t n) {
      Prim t = e.value_types[n];
      if (!ok)
        return;
      if (!combine) {
        out.push_back({k, v, t});
        return;
      }
      auto it = slot.find(k);
      if (it == slot.end()) {
        std::int64_t r;
        if (!e.cc.has_fold(k.id()) ||
            !fold_value(e, k, e.cc.init(k.id()), v, r)) {
          ok = false;
          return;
        }
        slot.emplace(k, out.size());
        out.push_back({k, r, t});
        return;
      }
      auto &kv = out[it->second];
      if (!fold_value(e, k, kv.value, v, kv.value))
        ok = false;
    });
    if (!mapped || !ok) {
      fail = ctx.i;
      return false;
    }
  }
  return true;
}

} // namespace detail

// Emitted pairs per partition, in global index order within each partition.
inline Partitioned run_map(const Job &, const Encoded &e,
                           const RuntimeConfig &cfg, ExecStats *stats = nullptr) {
  const std::size_t len = e.data.size();
  const std::size_t ps = detail::partition_size(len, cfg);
  const std::size_t n = (len + ps - 1) / ps;
  Partitioned parts(n);
  detail::TrapIndex trap;
  detail::parallel_for(n, cfg.workers, [&](std::size_t p) {
    std::int64_t fail = 0;
    if (!detail::map_partition(e, p * ps, std::min(len, (p + 1) * ps), false,
                               parts[p], fail))
      trap.note(fail);
  });
  if (trap.first)
    throw RuntimeTrap("map", *trap.first);
  if (stats) {
    stats->map_calls += len;
    stats->partitions += n;
    for (const auto &p : parts)
      stats->pairs += p.size();
  }
  return parts;
}

// Per partition and key, folds the values from init; one pair per key in
// first-occurrence order.
inline Partitioned combine(const Job &job, const Encoded &e,
                           const Partitioned &parts) {
  if (!job.combiner_enabled)
    return parts;
  Partitioned out(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p) {
    std::unordered_map<Key, std::size_t, synth::KeyHash> slot;
    for (const auto &kv : parts[p]) {
      auto it = slot.find(kv.key);
      if (it == slot.end()) {
        std::int64_t r;
        if (!detail::fold_value(e, kv.key, e.cc.init(kv.key.id()), kv.value,
                                r))
          throw RuntimeError("trap in combiner");
        slot.emplace(kv.key, out[p].size());
        out[p].push_back({kv.key, r, kv.type});
        continue;
      }
      auto &acc = out[p][it->second];
      if (!detail::fold_value(e, kv.key, acc.value, kv.value, acc.value))
        throw RuntimeError("trap in combiner");
    }
  }
  return out;
}

inline GroupedData shuffle(const Partitioned &parts) {
  std::map<Key, Group> groups;
  for (const auto &part : parts)
    for (const auto &kv : part) {
      auto [it, fresh] = groups.try_emplace(kv.key);
      Group &g = it->second;
      if (fresh) {
        g.key = kv.key;
        g.type = kv.type;
      } else if (g.type != kv.type) {
        throw RuntimeError("heterogeneous value types under one key");
      }
      g.values.push_back(kv.value);
    }
  GroupedData out;
  out.reserve(groups.size());
  for (auto &[k, g] : groups)
    out.push_back(std::move(g));
  return out;
}

inline AssocArray run_reduce(const Job &, const Encoded &e,
                             const GroupedData &grouped,
                             const RuntimeConfig &cfg) {
  std::vector<std::int64_t> results(grouped.size());
  std::vector<char> ok(grouped.size(), 1);
  const std::size_t chunk = 64;
  const std::size_t n = (grouped.size() + chunk - 1) / chunk;
  detail::parallel_for(n, cfg.workers, [&](std::size_t c) {
    for (std::size_t k = c * chunk; k < std::min(grouped.size(), (c + 1) * chunk);
         ++k) {
      const Group &g = grouped[k];
      if (!e.cc.has_fold(g.key.id())) {
        ok[k] = 0;
        continue;
      }
      std::int64_t acc = e.cc.init(g.key.id());
      for (auto v : g.values)
        if (!detail::fold_value(e, g.key, acc, v, acc)) {
          ok[k] = 0;
          break;
        }
      results[k] = acc;
    }
  });
  AssocArray out;
  for (std::size_t k = 0; k < grouped.size(); ++k) {
    if (!ok[k])
      throw RuntimeError("trap in reduce");
    out.emplace_hint(out.end(), grouped[k].key, results[k]);
  }
  return out;
}

// Output values from the reduce result: scalars directly, arrays by
// scattering (id, j) with the fold init for absent cells, maps by collecting
// (id, k).
inline OutputEnv reconstruct(const Job &job, const Encoded &e,
                             const AssocArray &assoc) {
  OutputEnv env;
  for (const auto &o : job.outputs) {
    if (!e.cc.has_fold(o.id))
      throw ShapeError("no fold for output " + std::to_string(o.id));
    std::int64_t init = e.cc.init(o.id);
    switch (o.shape) {
    case OutShape::Scalar:
      env[o.id] = mj::Value::from_scalar(e.syms.decode(init, o.value));
      break;
    case OutShape::Array:
      env[o.id] = mj::Value(
          mj::IntArray(static_cast<std::size_t>(o.length), init));
      break;
    case OutShape::Map:
      env[o.id] = mj::Value(mj::MapData{});
      break;
    }
  }
  for (const auto &[k, v] : assoc) {
    const OutputShape *o = job.output(static_cast<int>(k.id()));
    if (!o)
      throw ShapeError("reduce output has unknown id " +
                       std::to_string(k.id()));
    auto &val = env[o->id];
    switch (o->shape) {
    case OutShape::Scalar:
      if (k.arity != 1)
        throw ShapeError("scalar output keyed by a tuple");
      val = mj::Value::from_scalar(e.syms.decode(v, o->value));
      break;
    case OutShape::Array:
      if (k.arity != 2 || k.c[1] < 0 || k.c[1] >= o->length)
        throw ShapeError("array key outside " + o->name);
      val.int_array()[static_cast<std::size_t>(k.c[1])] = v;
      break;
    case OutShape::Map:
      if (k.arity != 2)
        throw ShapeError("map output needs a (id, key) pair");
      val.map()[e.syms.decode(k.c[1], o->key)] = e.syms.decode(v, o->value);
      break;
    }
  }
  return env;
}

// map -> combine (in the mapper, when enabled) -> shuffle -> reduce ->
// reconstruct.
inline OutputEnv execute(const Job &job, const mj::Value &data,
                         const std::vector<mj::Scalar> &inputs,
                         const RuntimeConfig &cfg, ExecStats *stats = nullptr) {
  Encoded e = encode(job, data, inputs);
  const std::size_t len = e.data.size();
  const std::size_t ps = detail::partition_size(len, cfg);
  const std::size_t n = (len + ps - 1) / ps;
  Partitioned parts(n);
  detail::TrapIndex trap;
  detail::parallel_for(n, cfg.workers, [&](std::size_t p) {
    std::int64_t fail = 0;
    if (!detail::map_partition(e, p * ps, std::min(len, (p + 1) * ps),
                               job.combiner_enabled, parts[p], fail))
      trap.note(fail);
  });
  if (trap.first)
    throw RuntimeTrap("map", *trap.first);
  if (stats) {
    stats->map_calls += len;
    stats->partitions += n;
    for (const auto &p : parts)
      stats->pairs += p.size();
  }
  return reconstruct(job, e, run_reduce(job, e, shuffle(parts), cfg));
}

inline mj::Env to_env(const Job &job, const OutputEnv &out) {
  mj::Env env;
  for (const auto &o : job.outputs)
    env[o.name] = out.at(o.id);
  return env;
}

inline std::string scalar_text(const mj::Scalar &s) {
  if (auto *i = std::get_if<std::int64_t>(&s))
    return std::to_string(*i);
  if (auto *b = std::get_if<bool>(&s))
    return *b ? "true" : "false";
  return std::get<std::string>(s);
}

// Canonical `id<TAB>index-or-key<TAB>value` lines, sorted by id then index
// or key.
inline std::string format_tsv(const OutputEnv &out) {
  std::ostringstream os;
  for (const auto &[id, v] : out) {
    if (v.is_int_array()) {
      const auto &a = v.int_array();
      for (std::size_t j = 0; j < a.size(); ++j)
        os << id << '\t' << j << '\t' << a[j] << '\n';
    } else if (v.is_map()) {
      for (const auto &[k, x] : v.map())
        os << id << '\t' << scalar_text(k) << '\t' << scalar_text(x) << '\n';
    } else {
      os << id << "\t-\t" << scalar_text(v.to_scalar()) << '\n';
    }
  }
  return os.str();
}

// One element per line: decimal ints or raw tokens.
inline mj::Value parse_data(std::istream &in, Prim elem) {
  std::string line;
  if (elem == Prim::Int) {
    mj::IntArray a;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (line.empty())
        continue;
      std::size_t used = 0;
      std::int64_t v = 0;
      try {
        v = std::stoll(line, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used != line.size() || used == 0)
        throw RuntimeError("line " + std::to_string(n) +
                           ": not an integer: " + line);
      a.push_back(v);
    }
    return mj::Value(std::move(a));
  }
  mj::StrArray a;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!line.empty())
      a.push_back(line);
  }
  return mj::Value(std::move(a));
}

inline mj::Value load_data(const std::string &path, Prim elem) {
  std::ifstream in(path);
  if (!in)
    throw RuntimeError("cannot open " + path);
  return parse_data(in, elem);
}

} // namespace liftmr::runtime
