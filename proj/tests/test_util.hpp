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

#include "liftmr/frontend/frontend.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testutil {

using namespace liftmr::mj;

inline std::string read_file(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string &name) {
  return std::string(LIFTMR_SOURCE_DIR) + "/corpus/" + name + ".mj";
}

inline std::string corpus_file(const std::string &name) {
  return read_file(corpus_path(name));
}

// Random arguments for main. Values are drawn from [lo, hi] and tokens from
// an alphabet of `alpha` words.
inline Env random_env(const Function &main, std::mt19937_64 &rng,
                      int max_len = 20, std::int64_t lo = -5,
                      std::int64_t hi = 5, int alpha = 3) {
  Env env;
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::int64_t> val(lo, hi);
  std::uniform_int_distribution<int> tok(0, alpha - 1);
  for (const auto &p : main.params) {
    switch (p.type.kind) {
    case Type::Kind::Int:
      env[p.name] = Value(val(rng));
      break;
    case Type::Kind::Bool:
      env[p.name] = Value(tok(rng) % 2 == 0);
      break;
    case Type::Kind::Str:
      env[p.name] = Value("w" + std::to_string(tok(rng)));
      break;
    case Type::Kind::Array: {
      int n = len(rng);
      if (p.type.elem == Prim::Str) {
        StrArray a;
        for (int i = 0; i < n; ++i)
          a.push_back("w" + std::to_string(tok(rng)));
        env[p.name] = Value(a);
      } else {
        IntArray a;
        for (int i = 0; i < n; ++i)
          a.push_back(val(rng));
        env[p.name] = Value(a);
      }
      break;
    }
    default:
      env[p.name] = Value(MapData{});
      break;
    }
  }
  return env;
}

inline bool same_outcome(const InterpOutcome &a, const InterpOutcome &b) {
  if (a.trap.has_value() != b.trap.has_value())
    return false;
  if (a.trap)
    return a.trap->kind == b.trap->kind;
  if (a.ret.has_value() != b.ret.has_value())
    return false;
  if (a.ret && !(*a.ret == *b.ret))
    return false;
  return a.env == b.env;
}

} // namespace testutil
