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

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace liftmr::mj {

enum class Prim : std::uint8_t { Int, Bool, Str };

inline const char *prim_name(Prim p) {
  switch (p) {
  case Prim::Int:
    return "int";
  case Prim::Bool:
    return "bool";
  case Prim::Str:
    return "string";
  }
  return "?";
}

struct Type {
  enum class Kind : std::uint8_t { Void, Int, Bool, Str, Array, Map };

  Kind kind = Kind::Void;
  Prim elem = Prim::Int; // Array
  Prim key = Prim::Int;  // Map
  Prim val = Prim::Int;  // Map
  // Set by the parser for shapes the language does not admit, e.g. int[][]
  // or map<int[],int>; the typechecker reports them.
  bool malformed = false;

  static Type void_() { return {}; }
  static Type int_() { return of(Kind::Int); }
  static Type bool_() { return of(Kind::Bool); }
  static Type string() { return of(Kind::Str); }
  static Type prim(Prim p) {
    switch (p) {
    case Prim::Int:
      return int_();
    case Prim::Bool:
      return bool_();
    case Prim::Str:
      return string();
    }
    return {};
  }
  static Type array(Prim e) {
    Type t = of(Kind::Array);
    t.elem = e;
    return t;
  }
  static Type map(Prim k, Prim v) {
    Type t = of(Kind::Map);
    t.key = k;
    t.val = v;
    return t;
  }

  bool is_void() const { return kind == Kind::Void; }
  bool is_scalar() const {
    return kind == Kind::Int || kind == Kind::Bool || kind == Kind::Str;
  }
  bool is_collection() const {
    return kind == Kind::Array || kind == Kind::Map;
  }
  Prim as_prim() const {
    return kind == Kind::Bool ? Prim::Bool
                              : (kind == Kind::Str ? Prim::Str : Prim::Int);
  }

  bool operator==(const Type &o) const {
    if (kind != o.kind || malformed != o.malformed)
      return false;
    if (kind == Kind::Array)
      return elem == o.elem;
    if (kind == Kind::Map)
      return key == o.key && val == o.val;
    return true;
  }

  std::string name() const {
    switch (kind) {
    case Kind::Void:
      return "void";
    case Kind::Int:
      return "int";
    case Kind::Bool:
      return "bool";
    case Kind::Str:
      return "string";
    case Kind::Array:
      return std::string(prim_name(elem)) + "[]";
    case Kind::Map:
      return std::string("map<") + prim_name(key) + "," + prim_name(val) + ">";
    }
    return "?";
  }

private:
  static Type of(Kind k) {
    Type t;
    t.kind = k;
    return t;
  }
};

using Scalar = std::variant<std::int64_t, bool, std::string>;
using IntArray = std::vector<std::int64_t>;
using StrArray = std::vector<std::string>;
using MapData = std::map<Scalar, Scalar>;

inline Scalar default_scalar(Prim p) {
  switch (p) {
  case Prim::Int:
    return std::int64_t{0};
  case Prim::Bool:
    return false;
  case Prim::Str:
    return std::string();
  }
  return std::int64_t{0};
}

inline std::string scalar_str(const Scalar &s) {
  if (auto *i = std::get_if<std::int64_t>(&s))
    return std::to_string(*i);
  if (auto *b = std::get_if<bool>(&s))
    return *b ? "true" : "false";
  return std::get<std::string>(s);
}

// Runtime value of an MJ variable. Arrays and maps have reference semantics
// inside the interpreter; equality is structural.
struct Value {
  using Rep = std::variant<std::monostate, std::int64_t, bool, std::string,
                           std::shared_ptr<IntArray>, std::shared_ptr<StrArray>,
                           std::shared_ptr<MapData>>;
  Rep rep;

  Value() = default;
  Value(std::int64_t v) : rep(v) {}
  Value(int v) : rep(std::int64_t{v}) {}
  Value(bool v) : rep(v) {}
  Value(std::string v) : rep(std::move(v)) {}
  Value(const char *v) : rep(std::string(v)) {}
  Value(IntArray a) : rep(std::make_shared<IntArray>(std::move(a))) {}
  Value(StrArray a) : rep(std::make_shared<StrArray>(std::move(a))) {}
  Value(MapData m) : rep(std::make_shared<MapData>(std::move(m))) {}
  static Value from_scalar(const Scalar &s) {
    return std::visit([](const auto &x) { return Value(x); }, s);
  }

  bool is_unset() const { return rep.index() == 0; }
  bool is_int() const { return rep.index() == 1; }
  bool is_bool() const { return rep.index() == 2; }
  bool is_str() const { return rep.index() == 3; }
  bool is_int_array() const { return rep.index() == 4; }
  bool is_str_array() const { return rep.index() == 5; }
  bool is_map() const { return rep.index() == 6; }

  std::int64_t as_int() const { return std::get<std::int64_t>(rep); }
  bool as_bool() const { return std::get<bool>(rep); }
  const std::string &as_str() const { return std::get<std::string>(rep); }
  IntArray &int_array() const { return *std::get<4>(rep); }
  StrArray &str_array() const { return *std::get<5>(rep); }
  MapData &map() const { return *std::get<6>(rep); }

  Scalar to_scalar() const {
    if (is_int())
      return as_int();
    if (is_bool())
      return as_bool();
    return as_str();
  }

  // Copy that shares nothing with the original.
  Value deep_copy() const {
    if (is_int_array())
      return Value(int_array());
    if (is_str_array())
      return Value(str_array());
    if (is_map())
      return Value(map());
    return *this;
  }

  bool operator==(const Value &o) const {
    if (rep.index() != o.rep.index())
      return false;
    switch (rep.index()) {
    case 0:
      return true;
    case 1:
      return as_int() == o.as_int();
    case 2:
      return as_bool() == o.as_bool();
    case 3:
      return as_str() == o.as_str();
    case 4:
      return int_array() == o.int_array();
    case 5:
      return str_array() == o.str_array();
    default:
      return map() == o.map();
    }
  }

  std::string str() const {
    std::ostringstream os;
    switch (rep.index()) {
    case 0:
      return "<unset>";
    case 1:
      return std::to_string(as_int());
    case 2:
      return as_bool() ? "true" : "false";
    case 3:
      return "\"" + as_str() + "\"";
    case 4: {
      os << "[";
      const auto &a = int_array();
      for (std::size_t i = 0; i < a.size(); ++i)
        os << (i ? "," : "") << a[i];
      os << "]";
      return os.str();
    }
    case 5: {
      os << "[";
      const auto &a = str_array();
      for (std::size_t i = 0; i < a.size(); ++i)
        os << (i ? "," : "") << '"' << a[i] << '"';
      os << "]";
      return os.str();
    }
    default: {
      os << "{";
      bool first = true;
      for (const auto &[k, v] : map()) {
        os << (first ? "" : ",") << scalar_str(k) << ":" << scalar_str(v);
        first = false;
      }
      os << "}";
      return os.str();
    }
    }
  }
};

inline std::ostream &operator<<(std::ostream &os, const Value &v) {
  return os << v.str();
}

using Env = std::map<std::string, Value>;

inline Env deep_copy(const Env &env) {
  Env out;
  for (const auto &[k, v] : env)
    out.emplace(k, v.deep_copy());
  return out;
}

inline std::string env_str(const Env &env) {
  std::string s;
  for (const auto &[k, v] : env)
    s += k + "=" + v.str() + "\n";
  return s;
}

} // namespace liftmr::mj
