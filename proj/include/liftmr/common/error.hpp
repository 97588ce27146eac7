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

#include <stdexcept>
#include <string>

namespace liftmr {

struct SrcPos {
  int line = 0;
  int col = 0;

  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col);
  }
  bool operator==(const SrcPos &) const = default;
};

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Errors carrying a source position (syntax and type errors).
class SourceError : public Error {
public:
  SourceError(const char *what, SrcPos pos, const std::string &msg)
      : Error(std::string(what) + " at " + pos.str() + ": " + msg), pos(pos),
        detail(msg) {}
  SrcPos pos;
  std::string detail;
};

class SyntaxError : public SourceError {
public:
  SyntaxError(SrcPos pos, const std::string &msg)
      : SourceError("syntax error", pos, msg) {}
};

class TypeError : public SourceError {
public:
  TypeError(SrcPos pos, const std::string &msg)
      : SourceError("type error", pos, msg) {}
};

} // namespace liftmr
