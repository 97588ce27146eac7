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

#include "liftmr/synth/domain.hpp"

#include <optional>
#include <string>
#include <vector>

namespace liftmr::synth {

struct Counterexample {
  std::size_t dataset = 0;
  mj::Env data;
  std::int64_t i = 0;
  int statement = 1;

  std::string str() const {
    return "statement " + std::to_string(statement) + " fails at " +
           mj::env_str(data) + " with counter " + std::to_string(i);
  }
};

struct Verdict {
  std::optional<Counterexample> cex;
  bool verified() const { return !cex; }
};

// Output values the invariant pins for a prefix, or nullopt when the reduce
// output does not describe a state (trap, stray key, wrong arity).
inline std::optional<std::vector<mj::Value>>
pinned_outputs(const CompiledCandidate &cc, const SummaryTemplate &t,
               const Symbols &syms, const Dataset &d, std::int64_t prefix) {
  prefix = std::clamp<std::int64_t>(prefix, 0, d.len());
  auto assoc = eval_compiled(cc, d.data.data(), d.len(), prefix,
                             d.inputs.data());
  if (!assoc)
    return std::nullopt;
  std::vector<mj::Value> out;
  std::vector<const OutputSlot *> by_id;
  for (const auto &o : t.outputs) {
    if (by_id.size() <= static_cast<std::size_t>(o.id))
      by_id.resize(static_cast<std::size_t>(o.id) + 1, nullptr);
    by_id[static_cast<std::size_t>(o.id)] = &o;
    if (!cc.has_fold(o.id))
      return std::nullopt;
    std::int64_t init = cc.init(o.id);
    switch (o.shape) {
    case OutShape::Scalar:
      out.push_back(mj::Value::from_scalar(syms.decode(init, o.value)));
      break;
    case OutShape::Array:
      if (!o.length)
        return std::nullopt;
      out.push_back(mj::Value(
          mj::IntArray(static_cast<std::size_t>(*o.length), init)));
      break;
    case OutShape::Map:
      out.push_back(mj::Value(mj::MapData{}));
      break;
    }
  }
  for (const auto &[k, v] : *assoc) {
    auto id = static_cast<std::size_t>(k.id());
    if (k.id() < 0 || id >= by_id.size() || !by_id[id])
      return std::nullopt;
    const OutputSlot &o = *by_id[id];
    std::size_t pos = static_cast<std::size_t>(&o - t.outputs.data());
    switch (o.shape) {
    case OutShape::Scalar:
      if (k.arity != 1)
        return std::nullopt;
      out[pos] = mj::Value::from_scalar(syms.decode(v, o.value));
      break;
    case OutShape::Array:
      if (k.arity != 2 || k.c[1] < 0 || k.c[1] >= *o.length)
        return std::nullopt;
      out[pos].int_array()[static_cast<std::size_t>(k.c[1])] = v;
      break;
    case OutShape::Map:
      if (k.arity != 2)
        return std::nullopt;
      out[pos].map()[syms.decode(k.c[1], o.key)] = syms.decode(v, o.value);
      break;
    }
  }
  return out;
}

// Checks the three Hoare statements at every dataset of the domain. States
// for the inductive step are pinned by the invariant at each reachable
// counter value.
inline Verdict check_bounded(const Candidate &c, const Domain &dom,
                             const std::vector<std::size_t> *order = nullptr) {
  const SummaryTemplate &t = dom.tmpl();
  Symbols syms = dom.symbols();
  CompiledCandidate cc(c, syms);
  const auto &sets = dom.datasets();
  int cs = dom.slot(t.counter);
  std::vector<int> out_slots;
  for (const auto &o : t.outputs)
    out_slots.push_back(dom.slot(o.name));

  auto outputs_match = [&](const std::vector<mj::Value> &fr,
                           const std::vector<mj::Value> &pinned) {
    for (std::size_t k = 0; k < out_slots.size(); ++k)
      if (!(fr[static_cast<std::size_t>(out_slots[k])] == pinned[k]))
        return false;
    return true;
  };
  auto counter_of = [&](const std::vector<mj::Value> &fr) {
    return fr[static_cast<std::size_t>(cs)].as_int();
  };

  const std::size_t n = sets.size();
  for (std::size_t w = 0; w < n; ++w) {
    std::size_t di = order ? (*order)[w] : w;
    const Dataset &d = sets[di];
    auto fail = [&](std::int64_t i, int st) {
      return Verdict{Counterexample{di, dom.env_of(d), i, st}};
    };
    const std::int64_t len = d.len();

    // Statement 1: precondition implies the invariant.
    auto fr0 = dom.initial_frame(d);
    std::int64_t i0 = counter_of(fr0);
    auto pin0 = pinned_outputs(cc, t, syms, d, i0);
    if (!c.lce.holds(i0, len) || !pin0 || !outputs_match(fr0, *pin0))
      return fail(i0, 1);

    for (std::int64_t i : d.points) {
      auto fr = dom.initial_frame(d);
      fr[static_cast<std::size_t>(cs)] = mj::Value(i);
      auto pin = pinned_outputs(cc, t, syms, d, i);
      if (!pin || !c.lce.holds(i, len))
        continue;
      for (std::size_t k = 0; k < out_slots.size(); ++k)
        fr[static_cast<std::size_t>(out_slots[k])] = (*pin)[k];
      if (i < len) {
        // Statement 2: the invariant is preserved by one iteration.
        std::uint64_t fuel = dom.config().fuel;
        bool cont;
        try {
          cont = dom.stepper().step(fr, fuel);
        } catch (const mj::TrapError &) {
          return fail(i, 2);
        }
        if (!cont)
          return fail(i, 2);
        std::int64_t i2 = counter_of(fr);
        auto pin2 = pinned_outputs(cc, t, syms, d, i2);
        if (!c.lce.holds(i2, len) || !pin2 || !outputs_match(fr, *pin2))
          return fail(i, 2);
      } else {
        // Statement 3: on exit the invariant implies the postcondition.
        auto post = pinned_outputs(cc, t, syms, d, len);
        if (!post || !outputs_match(fr, *post))
          return fail(i, 3);
      }
    }
  }
  return {};
}

} // namespace liftmr::synth
