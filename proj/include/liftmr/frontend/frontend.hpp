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

#include "liftmr/frontend/ast.hpp"
#include "liftmr/frontend/interpreter.hpp"
#include "liftmr/frontend/normalize.hpp"
#include "liftmr/frontend/parser.hpp"
#include "liftmr/frontend/printer.hpp"
#include "liftmr/frontend/typecheck.hpp"
#include "liftmr/frontend/types.hpp"

#include <string_view>

namespace liftmr::mj {

// parse, typecheck, normalize.
inline Program compile(std::string_view source) {
  return normalize(typecheck(parse(source)));
}

} // namespace liftmr::mj
