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

#include "liftmr/frontend/interpreter.hpp"
#include "liftmr/specgen/specgen.hpp"
#include "liftmr/synth/candidate.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace liftmr::synth {

using spec::OutShape;
using spec::OutputSlot;
using spec::SummaryTemplate;

struct DomainConfig {
  int max_len = 4; // iterations; data lengths run to max_len * stride
  std::int64_t lo = -2;
  std::int64_t hi = 2;
  int alphabet = 3;
  std::size_t exhaustive_limit = 100000;
  std::size_t samples_per_length = 2000;
  std::uint64_t fuel = 1u << 20;

  std::string str() const {
    return "max-len=" + std::to_string(max_len) + " int-range=" +
           std::to_string(lo) + ":" + std::to_string(hi) +
           " alphabet=" + std::to_string(alphabet);
  }
};

// Output value at an iteration boundary, as sorted (subkey, value) cells.
// Scalars use subkey 0; arrays list cells that differ from the fill value;
// maps list every present entry.
using OutState = std::vector<std::pair<std::int64_t, std::int64_t>>;

struct Dataset {
  std::vector<std::int64_t> data;
  std::vector<std::int64_t> inputs;
  std::vector<std::int64_t> points; // counter at each boundary; last exits
  std::vector<std::vector<OutState>> expected; // [point][output]

  std::int64_t len() const { return static_cast<std::int64_t>(data.size()); }
};

namespace detail {

inline std::uint64_t fixed_sample_seed() { return 0x6c6966746d72ULL; }

} // namespace detail

// Finite input domain of a fragment with the sequential trajectory of every
// dataset. Datasets on which the loop traps are excluded.
class Domain {
public:
  Domain(const mj::Program &prog, const analysis::LoopFragment &f,
         const SummaryTemplate &t, const std::vector<std::string> &str_lits,
         const DomainConfig &cfg)
      : cfg_(cfg), tmpl_(t), frag_(f) {
    for (int k = 0; k < cfg.alphabet; ++k)
      syms_.intern("t" + std::to_string(k));
    for (const auto &s : str_lits)
      syms_.intern(s);
    scope_names_.clear();
    for (const auto &[n, ty] : f.scope)
      scope_names_.push_back(n);
    stepper_ = std::make_shared<mj::LoopStepper>(prog, *f.loop, scope_names_);
    build();
  }

  const std::vector<Dataset> &datasets() const { return sets_; }
  const Symbols &symbols() const { return syms_; }
  const DomainConfig &config() const { return cfg_; }
  const SummaryTemplate &tmpl() const { return tmpl_; }
  const analysis::LoopFragment &fragment() const { return frag_; }
  const mj::LoopStepper &stepper() const { return *stepper_; }
  std::size_t raw_count() const { return raw_; }

  const std::vector<std::int64_t> &values(Prim p) const {
    return p == Prim::Int ? ints_ : p == Prim::Bool ? bools_ : strs_;
  }

  // Initial loop frame for a dataset, with outputs at their preconditions.
  std::vector<mj::Value> initial_frame(const Dataset &d) const {
    auto fr = stepper_->make_frame();
    set(fr, frag_.data_var, data_value(d));
    for (std::size_t k = 0; k < tmpl_.inputs.size(); ++k) {
      const auto &in = tmpl_.inputs[k];
      mj::Value v = mj::Value::from_scalar(syms_.decode(d.inputs[k], in.type));
      if (in.element) {
        int s = stepper_->slot(in.element->array);
        auto &slot = fr[static_cast<std::size_t>(s)];
        if (slot.is_unset())
          slot = element_array(in.element->array, d);
        if (slot.is_int_array())
          slot.int_array()[static_cast<std::size_t>(in.element->index)] =
              v.as_int();
        else
          slot.str_array()[static_cast<std::size_t>(in.element->index)] =
              v.as_str();
      } else {
        set(fr, in.name, v);
      }
    }
    for (const auto &o : tmpl_.outputs)
      set(fr, o.name, init_value(o));
    const auto *ci = tmpl_.pre.find(tmpl_.counter);
    set(fr, tmpl_.counter, mj::Value::from_scalar(ci->lit));
    return fr;
  }

  mj::Value data_value(const Dataset &d) const {
    if (tmpl_.data_elem == Prim::Int)
      return mj::Value(mj::IntArray(d.data));
    mj::StrArray a;
    for (auto c : d.data)
      a.push_back(syms_.name(c));
    return mj::Value(a);
  }

  // Data and scalar inputs of a dataset, named as in the program.
  mj::Env env_of(const Dataset &d) const {
    mj::Env env;
    env[frag_.data_var] = data_value(d);
    for (std::size_t k = 0; k < tmpl_.inputs.size(); ++k)
      env[tmpl_.inputs[k].name] = mj::Value::from_scalar(
          syms_.decode(d.inputs[k], tmpl_.inputs[k].type));
    return env;
  }

  static mj::Value init_value(const OutputSlot &o) {
    switch (o.init.kind) {
    case spec::InitKind::Literal:
      return mj::Value::from_scalar(o.init.lit);
    case spec::InitKind::Array:
      return mj::Value(mj::IntArray(static_cast<std::size_t>(*o.init.length),
                                    0));
    case spec::InitKind::EmptyMap:
      return mj::Value(mj::MapData{});
    case spec::InitKind::Fresh:
      break;
    }
    throw Error("output '" + o.name + "' has no known initial value");
  }

  int slot(const std::string &name) const { return stepper_->slot(name); }

  // Encodes an output variable's value as an OutState.
  OutState encode(const OutputSlot &o, const mj::Value &v) {
    OutState s;
    switch (o.shape) {
    case OutShape::Scalar:
      s.emplace_back(0, syms_.encode(v.to_scalar()));
      break;
    case OutShape::Array: {
      const auto &a = v.int_array();
      for (std::size_t j = 0; j < a.size(); ++j)
        if (a[j] != 0)
          s.emplace_back(static_cast<std::int64_t>(j), a[j]);
      break;
    }
    case OutShape::Map:
      for (const auto &[k, x] : v.map())
        s.emplace_back(syms_.encode(k), syms_.encode(x));
      std::sort(s.begin(), s.end());
      break;
    }
    return s;
  }

private:
  DomainConfig cfg_;
  SummaryTemplate tmpl_;
  analysis::LoopFragment frag_;
  Symbols syms_;
  std::vector<std::string> scope_names_;
  std::shared_ptr<mj::LoopStepper> stepper_;
  std::vector<Dataset> sets_;
  std::vector<std::int64_t> ints_, bools_{0, 1}, strs_;
  std::size_t raw_ = 0;

  void set(std::vector<mj::Value> &fr, const std::string &name,
           mj::Value v) const {
    int s = stepper_->slot(name);
    if (s < 0)
      throw Error("variable '" + name + "' is not in the loop scope");
    fr[static_cast<std::size_t>(s)] = std::move(v);
  }

  mj::Value element_array(const std::string &array, const Dataset &) const {
    std::int64_t n = 0;
    Prim elem = Prim::Int;
    for (const auto &in : tmpl_.inputs)
      if (in.element && in.element->array == array) {
        n = std::max(n, in.element->index + 1);
        elem = in.type;
      }
    if (elem == Prim::Int)
      return mj::Value(mj::IntArray(static_cast<std::size_t>(n), 0));
    return mj::Value(mj::StrArray(static_cast<std::size_t>(n)));
  }

  void build() {
    for (auto v = cfg_.lo; v <= cfg_.hi; ++v)
      ints_.push_back(v);
    for (std::size_t k = 0; k < syms_.size(); ++k)
      strs_.push_back(static_cast<std::int64_t>(k));
    const auto &dvals = values(tmpl_.data_elem);
    std::vector<const std::vector<std::int64_t> *> in_vals;
    for (const auto &in : tmpl_.inputs)
      in_vals.push_back(&values(in.type));
    const std::int64_t max_len = cfg_.max_len * tmpl_.stride;

    double cumulative = 0;
    bool sampling = false;
    std::mt19937_64 rng(detail::fixed_sample_seed());
    for (std::int64_t len = 0; len <= max_len; ++len) {
      const std::size_t slots =
          static_cast<std::size_t>(len) + in_vals.size();
      std::vector<const std::vector<std::int64_t> *> axes;
      for (std::int64_t k = 0; k < len; ++k)
        axes.push_back(&dvals);
      for (auto *iv : in_vals)
        axes.push_back(iv);
      double count = 1;
      for (auto *a : axes)
        count *= static_cast<double>(a->size());
      if (!sampling && cumulative + count > static_cast<double>(cfg_.exhaustive_limit))
        sampling = true;
      std::vector<std::int64_t> tuple(slots);
      auto emit = [&]() {
        Dataset d;
        d.data.assign(tuple.begin(), tuple.begin() + len);
        d.inputs.assign(tuple.begin() + len, tuple.end());
        ++raw_;
        if (trajectory(d))
          sets_.push_back(std::move(d));
      };
      if (!sampling) {
        cumulative += count;
        std::vector<std::size_t> pos(slots, 0);
        for (;;) {
          for (std::size_t k = 0; k < slots; ++k)
            tuple[k] = (*axes[k])[pos[k]];
          emit();
          std::size_t k = slots;
          while (k > 0 && ++pos[k - 1] == axes[k - 1]->size()) {
            pos[k - 1] = 0;
            --k;
          }
          if (k == 0)
            break;
        }
      } else {
        std::set<std::vector<std::int64_t>> seen;
        for (std::size_t s = 0; s < cfg_.samples_per_length; ++s) {
          for (std::size_t k = 0; k < slots; ++k) {
            std::uniform_int_distribution<std::size_t> pick(
                0, axes[k]->size() - 1);
            tuple[k] = (*axes[k])[pick(rng)];
          }
          if (seen.insert(tuple).second)
            emit();
        }
      }
    }
  }

  bool trajectory(Dataset &d) {
    auto fr = initial_frame(d);
    int cs = stepper_->slot(tmpl_.counter);
    std::vector<int> out_slots;
    for (const auto &o : tmpl_.outputs)
      out_slots.push_back(stepper_->slot(o.name));
    std::uint64_t fuel = cfg_.fuel;
    try {
      for (;;) {
        d.points.push_back(fr[static_cast<std::size_t>(cs)].as_int());
        std::vector<OutState> st;
        for (std::size_t k = 0; k < tmpl_.outputs.size(); ++k)
          st.push_back(encode(tmpl_.outputs[k],
                              fr[static_cast<std::size_t>(out_slots[k])]));
        d.expected.push_back(std::move(st));
        if (!stepper_->step(fr, fuel))
          break;
      }
    } catch (const mj::TrapError &) {
      return false;
    }
    return true;
  }
};

} // namespace liftmr::synth
