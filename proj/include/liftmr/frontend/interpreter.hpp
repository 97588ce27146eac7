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

#include "liftmr/common/error.hpp"
#include "liftmr/frontend/ast.hpp"

#include <climits>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liftmr::mj {

struct Trap {
  enum class Kind {
    OutOfBounds,
    DivByZero,
    Overflow,
    FuelExhausted,
    Uninitialized,
    NegativeLength,
    MissingReturn,
    Job
  };
  Kind kind = Kind::OutOfBounds;
  SrcPos pos;
  std::string message;

  static const char *kind_name(Kind k) {
    switch (k) {
    case Kind::OutOfBounds:
      return "out-of-bounds";
    case Kind::DivByZero:
      return "division-by-zero";
    case Kind::Overflow:
      return "overflow";
    case Kind::FuelExhausted:
      return "fuel-exhausted";
    case Kind::Uninitialized:
      return "uninitialized";
    case Kind::NegativeLength:
      return "negative-length";
    case Kind::MissingReturn:
      return "missing-return";
    case Kind::Job:
      return "job";
    }
    return "?";
  }
  std::string str() const {
    return std::string(kind_name(kind)) + " at " + pos.str() +
           (message.empty() ? "" : ": " + message);
  }
};

class TrapError : public Error {
public:
  explicit TrapError(Trap t) : Error("trap: " + t.str()), trap(std::move(t)) {}
  Trap trap;
};

// Receives mr_run calls from rewritten programs and returns the job's
// outputs keyed by output id.
class JobHost {
public:
  virtual ~JobHost() = default;
  virtual std::map<int, Value> run_job(const std::string &name,
                                       const std::vector<Value> &args) = 0;
};

inline constexpr std::uint64_t kDefaultFuel = 1ull << 34;

struct InterpOutcome {
  Env env;
  std::optional<Value> ret;
  std::optional<Trap> trap;
  bool ok() const { return !trap.has_value(); }
};

namespace detail {

enum class Bi : std::uint8_t {
  User,
  Length,
  Get,
  Put,
  MrRun,
  MrInt,
  MrBool,
  MrCell,
  MrCollect
};

struct CExpr {
  ExprKind kind = ExprKind::IntLit;
  BinOp bin = BinOp::Add;
  UnOp un = UnOp::Neg;
  Bi bi = Bi::User;
  int slot = -1;
  int func = -1;
  Value lit;
  Type type;
  SrcPos pos;
  std::vector<CExpr> args;
};

struct CStmt {
  StmtKind kind = StmtKind::Block;
  SrcPos pos;
  int slot = -1;
  Type decl_type;
  bool has_value = false, has_index = false, has_cond = false;
  CExpr value, index, cond;
  std::vector<CStmt> body, orelse, init, step;
};

struct CFunc {
  std::string name;
  Type ret;
  int nslots = 0;
  std::vector<std::pair<std::string, int>> params;
  std::vector<std::pair<std::string, int>> top_level;
  std::vector<CStmt> body;
};

class Compiler {
public:
  Compiler(const Program &p, std::vector<CFunc> &funcs) : prog_(p), funcs_(funcs) {
    for (std::size_t i = 0; i < p.functions.size(); ++i)
      index_[p.functions[i].name] = static_cast<int>(i);
  }

  void compile_all() {
    funcs_.resize(prog_.functions.size());
    for (std::size_t i = 0; i < prog_.functions.size(); ++i)
      compile_function(prog_.functions[i], funcs_[i]);
  }

  // Compiles a statement list against caller-provided slots 0..n-1.
  std::vector<CStmt> compile_region(const StmtList &body,
                                    const std::vector<std::string> &scope,
                                    int &nslots) {
    scopes_.clear();
    scopes_.emplace_back();
    next_slot_ = 0;
    for (const auto &n : scope)
      scopes_.back()[n] = next_slot_++;
    scopes_.emplace_back();
    std::vector<CStmt> out = stmts(body);
    nslots = next_slot_;
    return out;
  }

private:
  const Program &prog_;
  std::vector<CFunc> &funcs_;
  std::map<std::string, int> index_;
  std::vector<std::map<std::string, int>> scopes_;
  int next_slot_ = 0;
  std::vector<std::pair<std::string, int>> *top_ = nullptr;

  void compile_function(const Function &f, CFunc &out) {
    out.name = f.name;
    out.ret = f.ret;
    scopes_.clear();
    scopes_.emplace_back();
    next_slot_ = 0;
    for (const auto &p : f.params) {
      int s = next_slot_++;
      scopes_.back()[p.name] = s;
      out.params.emplace_back(p.name, s);
    }
    top_ = &out.top_level;
    std::vector<CStmt> body;
    for (const auto &s : f.body)
      body.push_back(stmt(*s, true));
    top_ = nullptr;
    out.body = std::move(body);
    out.nslots = next_slot_;
  }

  int resolve(const std::string &name, SrcPos pos) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end())
        return f->second;
    }
    throw TypeError(pos, "unresolved variable '" + name + "'");
  }

  std::vector<CStmt> stmts(const StmtList &in) {
    scopes_.emplace_back();
    std::vector<CStmt> out;
    for (const auto &s : in)
      out.push_back(stmt(*s, false));
    scopes_.pop_back();
    return out;
  }

  CStmt stmt(const Stmt &s, bool top) {
    CStmt c;
    c.kind = s.kind;
    c.pos = s.pos;
    switch (s.kind) {
    case StmtKind::Decl:
      if (s.value) {
        c.has_value = true;
        c.value = expr(*s.value);
      }
      c.decl_type = s.decl_type;
      c.slot = next_slot_++;
      scopes_.back()[s.name] = c.slot;
      if (top && top_)
        top_->emplace_back(s.name, c.slot);
      break;
    case StmtKind::Assign:
      c.slot = resolve(s.name, s.pos);
      c.has_value = true;
      c.value = expr(*s.value);
      break;
    case StmtKind::Store:
      c.slot = resolve(s.name, s.pos);
      c.has_index = c.has_value = true;
      c.index = expr(*s.index);
      c.value = expr(*s.value);
      break;
    case StmtKind::Eval:
      c.has_value = true;
      c.value = expr(*s.value);
      break;
    case StmtKind::Return:
      if (s.value) {
        c.has_value = true;
        c.value = expr(*s.value);
      }
      break;
    case StmtKind::If:
      c.has_cond = true;
      c.cond = expr(*s.cond);
      c.body = stmts(s.body);
      c.orelse = stmts(s.orelse);
      break;
    case StmtKind::While:
      c.has_cond = true;
      c.cond = expr(*s.cond);
      c.body = stmts(s.body);
      break;
    case StmtKind::For:
      scopes_.emplace_back();
      if (s.init)
        c.init.push_back(stmt(*s.init, false));
      if (s.cond) {
        c.has_cond = true;
        c.cond = expr(*s.cond);
      }
      if (s.step)
        c.step.push_back(stmt(*s.step, false));
      c.body = stmts(s.body);
      scopes_.pop_back();
      break;
    case StmtKind::Block:
      c.body = stmts(s.body);
      break;
    case StmtKind::Break:
      break;
    }
    return c;
  }

  CExpr expr(const Expr &e) {
    CExpr c;
    c.kind = e.kind;
    c.bin = e.bin;
    c.un = e.un;
    c.type = e.type;
    c.pos = e.pos;
    switch (e.kind) {
    case ExprKind::IntLit:
      c.lit = Value(e.int_val);
      break;
    case ExprKind::BoolLit:
      c.lit = Value(e.bool_val);
      break;
    case ExprKind::StrLit:
      c.lit = Value(e.name);
      break;
    case ExprKind::Var:
      c.slot = resolve(e.name, e.pos);
      break;
    case ExprKind::NewMap:
    case ExprKind::NewArray:
      c.type = e.alloc;
      break;
    case ExprKind::Call: {
      static const std::map<std::string, Bi> bis = {
          {"length", Bi::Length}, {"get", Bi::Get},
          {"put", Bi::Put},       {"mr_run", Bi::MrRun},
          {"mr_int", Bi::MrInt},  {"mr_bool", Bi::MrBool},
          {"mr_cell", Bi::MrCell}, {"mr_collect", Bi::MrCollect}};
      auto it = bis.find(e.name);
      if (it != bis.end()) {
        c.bi = it->second;
      } else {
        auto f = index_.find(e.name);
        if (f == index_.end())
          throw TypeError(e.pos, "unknown function '" + e.name + "'");
        c.func = f->second;
      }
      break;
    }
    default:
      break;
    }
    for (const auto &a : e.args)
      c.args.push_back(expr(*a));
    return c;
  }
};

enum class Flow { Next, Break, Return };

class Machine {
public:
  explicit Machine(const std::vector<CFunc> &funcs) : funcs_(funcs) {}

  std::uint64_t fuel = kDefaultFuel;
  JobHost *host = nullptr;
  std::map<std::string, std::map<int, Value>> jobs;
  Value ret;

  [[noreturn]] static void trap(Trap::Kind k, SrcPos pos,
                                std::string msg = {}) {
    throw TrapError(Trap{k, pos, std::move(msg)});
  }

  void burn(SrcPos pos) {
    if (fuel == 0)
      trap(Trap::Kind::FuelExhausted, pos);
    --fuel;
  }

  Value call(int fi, std::vector<Value> args, SrcPos pos) {
    const CFunc &f = funcs_[static_cast<std::size_t>(fi)];
    std::vector<Value> frame(static_cast<std::size_t>(f.nslots));
    for (std::size_t i = 0; i < args.size(); ++i)
      frame[static_cast<std::size_t>(f.params[i].second)] = std::move(args[i]);
    Flow fl = exec_list(f.body, frame);
    if (fl == Flow::Return) {
      Value r = std::move(ret);
      ret = Value();
      return r;
    }
    if (!f.ret.is_void())
      trap(Trap::Kind::MissingReturn, pos, f.name);
    return Value();
  }

  Flow exec_list(const std::vector<CStmt> &list, std::vector<Value> &fr) {
    for (const auto &s : list) {
      Flow f = exec(s, fr);
      if (f != Flow::Next)
        return f;
    }
    return Flow::Next;
  }

  static Value default_value(const Type &t) {
    switch (t.kind) {
    case Type::Kind::Int:
      return Value(std::int64_t{0});
    case Type::Kind::Bool:
      return Value(false);
    case Type::Kind::Str:
      return Value(std::string());
    default:
      return Value();
    }
  }

  Flow exec(const CStmt &s, std::vector<Value> &fr) {
    burn(s.pos);
    switch (s.kind) {
    case StmtKind::Decl:
      fr[static_cast<std::size_t>(s.slot)] =
          s.has_value ? eval(s.value, fr) : default_value(s.decl_type);
      return Flow::Next;
    case StmtKind::Assign:
      fr[static_cast<std::size_t>(s.slot)] = eval(s.value, fr);
      return Flow::Next;
    case StmtKind::Store: {
      std::int64_t idx = eval(s.index, fr).as_int();
      Value v = eval(s.value, fr);
      Value &base = fr[static_cast<std::size_t>(s.slot)];
      if (base.is_unset())
        trap(Trap::Kind::Uninitialized, s.pos, "array is not allocated");
      if (base.is_int_array()) {
        auto &a = base.int_array();
        check_index(idx, a.size(), s.pos);
        a[static_cast<std::size_t>(idx)] = v.as_int();
      } else {
        auto &a = base.str_array();
        check_index(idx, a.size(), s.pos);
        a[static_cast<std::size_t>(idx)] = v.as_str();
      }
      return Flow::Next;
    }
    case StmtKind::Eval:
      eval(s.value, fr);
      return Flow::Next;
    case StmtKind::Return:
      ret = s.has_value ? eval(s.value, fr) : Value();
      return Flow::Return;
    case StmtKind::Break:
      return Flow::Break;
    case StmtKind::Block:
      return exec_list(s.body, fr);
    case StmtKind::If:
      if (eval(s.cond, fr).as_bool())
        return exec_list(s.body, fr);
      return exec_list(s.orelse, fr);
    case StmtKind::While:
      for (;;) {
        burn(s.pos);
        if (!eval(s.cond, fr).as_bool())
          return Flow::Next;
        Flow f = exec_list(s.body, fr);
        if (f == Flow::Break)
          return Flow::Next;
        if (f == Flow::Return)
          return f;
      }
    case StmtKind::For: {
      Flow f0 = exec_list(s.init, fr);
      if (f0 != Flow::Next)
        return f0;
      for (;;) {
        burn(s.pos);
        if (s.has_cond && !eval(s.cond, fr).as_bool())
          return Flow::Next;
        Flow f = exec_list(s.body, fr);
        if (f == Flow::Break)
          return Flow::Next;
        if (f == Flow::Return)
          return f;
        exec_list(s.step, fr);
      }
    }
    }
    return Flow::Next;
  }

  static void check_index(std::int64_t idx, std::size_t n, SrcPos pos) {
    if (idx < 0 || static_cast<std::uint64_t>(idx) >= n)
      trap(Trap::Kind::OutOfBounds, pos,
           "index " + std::to_string(idx) + " of length " + std::to_string(n));
  }

  static std::int64_t arith(BinOp op, std::int64_t a, std::int64_t b,
                            SrcPos pos) {
    std::int64_t r = 0;
    switch (op) {
    case BinOp::Add:
      if (__builtin_add_overflow(a, b, &r))
        trap(Trap::Kind::Overflow, pos);
      return r;
    case BinOp::Sub:
      if (__builtin_sub_overflow(a, b, &r))
        trap(Trap::Kind::Overflow, pos);
      return r;
    case BinOp::Mul:
      if (__builtin_mul_overflow(a, b, &r))
        trap(Trap::Kind::Overflow, pos);
      return r;
    case BinOp::Div:
    case BinOp::Mod:
      if (b == 0)
        trap(Trap::Kind::DivByZero, pos);
      if (a == INT64_MIN && b == -1)
        trap(Trap::Kind::Overflow, pos);
      return op == BinOp::Div ? a / b : a % b;
    default:
      return 0;
    }
  }

  const Value &slot_ref(const CExpr &e, std::vector<Value> &fr) {
    const Value &v = fr[static_cast<std::size_t>(e.slot)];
    if (v.is_unset())
      trap(Trap::Kind::Uninitialized, e.pos, "value is not allocated");
    return v;
  }

  Value eval(const CExpr &e, std::vector<Value> &fr) {
    switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit:
      return e.lit;
    case ExprKind::Var:
      return fr[static_cast<std::size_t>(e.slot)];
    case ExprKind::Index: {
      std::int64_t idx = eval(e.args[1], fr).as_int();
      if (e.args[0].kind == ExprKind::Var)
        return index_value(slot_ref(e.args[0], fr), idx, e.pos);
      Value base = eval(e.args[0], fr);
      if (base.is_unset())
        trap(Trap::Kind::Uninitialized, e.pos, "array is not allocated");
      return index_value(base, idx, e.pos);
    }
    case ExprKind::Unary: {
      Value x = eval(e.args[0], fr);
      if (e.un == UnOp::Not)
        return Value(!x.as_bool());
      if (x.as_int() == INT64_MIN)
        trap(Trap::Kind::Overflow, e.pos);
      return Value(-x.as_int());
    }
    case ExprKind::Binary: {
      if (e.bin == BinOp::And) {
        if (!eval(e.args[0], fr).as_bool())
          return Value(false);
        return Value(eval(e.args[1], fr).as_bool());
      }
      if (e.bin == BinOp::Or) {
        if (eval(e.args[0], fr).as_bool())
          return Value(true);
        return Value(eval(e.args[1], fr).as_bool());
      }
      Value a = eval(e.args[0], fr);
      Value b = eval(e.args[1], fr);
      if (is_arith(e.bin))
        return Value(arith(e.bin, a.as_int(), b.as_int(), e.pos));
      switch (e.bin) {
      case BinOp::Lt:
        return Value(a.as_int() < b.as_int());
      case BinOp::Le:
        return Value(a.as_int() <= b.as_int());
      case BinOp::Gt:
        return Value(a.as_int() > b.as_int());
      case BinOp::Ge:
        return Value(a.as_int() >= b.as_int());
      case BinOp::Eq:
        return Value(a == b);
      case BinOp::Ne:
        return Value(!(a == b));
      default:
        return Value();
      }
    }
    case ExprKind::Call:
      return call_expr(e, fr);
    case ExprKind::NewArray: {
      std::int64_t n = eval(e.args[0], fr).as_int();
      if (n < 0)
        trap(Trap::Kind::NegativeLength, e.pos);
      if (e.type.elem == Prim::Str)
        return Value(StrArray(static_cast<std::size_t>(n)));
      return Value(IntArray(static_cast<std::size_t>(n), 0));
    }
    case ExprKind::NewMap:
      return Value(MapData{});
    }
    return Value();
  }

  static Value index_value(const Value &base, std::int64_t idx, SrcPos pos) {
    if (base.is_int_array()) {
      const auto &a = base.int_array();
      check_index(idx, a.size(), pos);
      return Value(a[static_cast<std::size_t>(idx)]);
    }
    const auto &a = base.str_array();
    check_index(idx, a.size(), pos);
    return Value(a[static_cast<std::size_t>(idx)]);
  }

  const std::map<int, Value> &job(const std::string &name, SrcPos pos) {
    auto it = jobs.find(name);
    if (it == jobs.end())
      trap(Trap::Kind::Job, pos, "job '" + name + "' has not run");
    return it->second;
  }

  const Value &job_output(const std::string &name, std::int64_t id,
                          SrcPos pos) {
    const auto &j = job(name, pos);
    auto it = j.find(static_cast<int>(id));
    if (it == j.end())
      trap(Trap::Kind::Job, pos, "job '" + name + "' has no output " +
                                     std::to_string(id));
    return it->second;
  }

  Value call_expr(const CExpr &e, std::vector<Value> &fr) {
    switch (e.bi) {
    case Bi::Length: {
      const Value &v = e.args[0].kind == ExprKind::Var
                           ? slot_ref(e.args[0], fr)
                           : eval(e.args[0], fr);
      if (v.is_unset())
        trap(Trap::Kind::Uninitialized, e.pos);
      if (v.is_int_array())
        return Value(static_cast<std::int64_t>(v.int_array().size()));
      if (v.is_str_array())
        return Value(static_cast<std::int64_t>(v.str_array().size()));
      return Value(static_cast<std::int64_t>(v.map().size()));
    }
    case Bi::Get: {
      const Value &m = slot_or_eval(e.args[0], fr);
      Value k = eval(e.args[1], fr);
      auto it = m.map().find(k.to_scalar());
      if (it == m.map().end())
        return Value::from_scalar(default_scalar(e.type.as_prim()));
      return Value::from_scalar(it->second);
    }
    case Bi::Put: {
      const Value &m = slot_or_eval(e.args[0], fr);
      Value k = eval(e.args[1], fr);
      Value v = eval(e.args[2], fr);
      m.map()[k.to_scalar()] = v.to_scalar();
      return Value();
    }
    case Bi::MrRun: {
      if (!host)
        trap(Trap::Kind::Job, e.pos, "no job host");
      std::vector<Value> args;
      for (std::size_t i = 1; i < e.args.size(); ++i)
        args.push_back(eval(e.args[i], fr));
      const std::string &name = e.args[0].lit.as_str();
      try {
        jobs[name] = host->run_job(name, args);
      } catch (const TrapError &) {
        throw;
      } catch (const std::exception &ex) {
        trap(Trap::Kind::Job, e.pos, ex.what());
      }
      return Value();
    }
    case Bi::MrInt:
    case Bi::MrBool: {
      std::int64_t id = eval(e.args[1], fr).as_int();
      return job_output(e.args[0].lit.as_str(), id, e.pos);
    }
    case Bi::MrCell: {
      std::int64_t id = eval(e.args[1], fr).as_int();
      std::int64_t j = eval(e.args[2], fr).as_int();
      const Value &arr = job_output(e.args[0].lit.as_str(), id, e.pos);
      return index_value(arr, j, e.pos);
    }
    case Bi::MrCollect: {
      std::int64_t id = eval(e.args[1], fr).as_int();
      const Value &m = slot_or_eval(e.args[2], fr);
      const Value &src = job_output(e.args[0].lit.as_str(), id, e.pos);
      m.map() = src.map();
      return Value();
    }
    case Bi::User: {
      std::vector<Value> args;
      for (const auto &a : e.args)
        args.push_back(eval(a, fr));
      return call(e.func, std::move(args), e.pos);
    }
    }
    return Value();
  }

  const Value &slot_or_eval(const CExpr &e, std::vector<Value> &fr) {
    if (e.kind == ExprKind::Var)
      return slot_ref(e, fr);
    scratch_ = eval(e, fr);
    if (scratch_.is_unset())
      trap(Trap::Kind::Uninitialized, e.pos);
    return scratch_;
  }

private:
  const std::vector<CFunc> &funcs_;
  Value scratch_;
};

inline bool value_matches(const Value &v, const Type &t) {
  switch (t.kind) {
  case Type::Kind::Int:
    return v.is_int();
  case Type::Kind::Bool:
    return v.is_bool();
  case Type::Kind::Str:
    return v.is_str();
  case Type::Kind::Array:
    return t.elem == Prim::Str ? v.is_str_array() : v.is_int_array();
  case Type::Kind::Map:
    return v.is_map();
  default:
    return false;
  }
}

} // namespace detail

// Sequential reference interpreter. The output Env holds main's parameters
// and main's top-level variables at exit; names starting with '_' are
// compiler temporaries and are left out.
class Interpreter {
public:
  explicit Interpreter(const Program &p) : prog_(p) {
    detail::Compiler(prog_, funcs_).compile_all();
    for (std::size_t i = 0; i < prog_.functions.size(); ++i)
      if (prog_.functions[i].name == "main")
        main_ = static_cast<int>(i);
    if (main_ < 0)
      throw Error("program has no main function");
  }

  InterpOutcome run(const Env &input, std::uint64_t fuel = kDefaultFuel,
                    JobHost *host = nullptr) const {
    const detail::CFunc &f = funcs_[static_cast<std::size_t>(main_)];
    const Function &src = prog_.functions[static_cast<std::size_t>(main_)];
    std::vector<Value> frame(static_cast<std::size_t>(f.nslots));
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      auto it = input.find(f.params[i].first);
      if (it == input.end())
        throw Error("missing input for parameter '" + f.params[i].first + "'");
      if (!detail::value_matches(it->second, src.params[i].type))
        throw Error("input '" + f.params[i].first + "' does not have type " +
                    src.params[i].type.name());
      frame[static_cast<std::size_t>(f.params[i].second)] =
          it->second.deep_copy();
    }
    detail::Machine m(funcs_);
    m.fuel = fuel;
    m.host = host;
    InterpOutcome out;
    try {
      detail::Flow fl = m.exec_list(f.body, frame);
      if (fl == detail::Flow::Return && !m.ret.is_unset())
        out.ret = m.ret;
    } catch (const TrapError &t) {
      out.trap = t.trap;
    }
    auto keep = [&](const std::string &name, int slot) {
      if (name.empty() || name[0] == '_')
        return;
      const Value &v = frame[static_cast<std::size_t>(slot)];
      if (!v.is_unset())
        out.env[name] = v;
    };
    for (const auto &[name, slot] : f.params)
      keep(name, slot);
    for (const auto &[name, slot] : f.top_level)
      keep(name, slot);
    return out;
  }

  const Program &program() const { return prog_; }

private:
  Program prog_;
  std::vector<detail::CFunc> funcs_;
  int main_ = -1;
};

inline InterpOutcome interpret(const Program &p, const Env &input,
                               std::uint64_t fuel = kDefaultFuel,
                               JobHost *host = nullptr) {
  return Interpreter(p).run(input, fuel, host);
}

// Executes one iteration of a canonical while(true) loop at a time over a
// frame whose first slots hold the variables named in `scope`.
class LoopStepper {
public:
  LoopStepper(const Program &p, const Stmt &loop,
              const std::vector<std::string> &scope)
      : prog_(p), scope_(scope) {
    detail::Compiler c(prog_, funcs_);
    c.compile_all();
    body_ = c.compile_region(loop.body, scope_, nslots_);
    for (std::size_t i = 0; i < scope_.size(); ++i)
      index_[scope_[i]] = static_cast<int>(i);
  }

  int slot(const std::string &name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }
  std::vector<Value> make_frame() const {
    return std::vector<Value>(static_cast<std::size_t>(nslots_));
  }

  // Runs the loop body once. Returns false when the loop exits.
  // Throws TrapError on a trap, including fuel exhaustion.
  bool step(std::vector<Value> &frame, std::uint64_t &fuel) const {
    detail::Machine m(funcs_);
    m.fuel = fuel;
    detail::Flow f = m.exec_list(body_, frame);
    fuel = m.fuel;
    if (f == detail::Flow::Return)
      throw Error("return inside a lifted loop");
    return f != detail::Flow::Break;
  }

private:
  Program prog_;
  std::vector<std::string> scope_;
  std::vector<detail::CFunc> funcs_;
  std::vector<detail::CStmt> body_;
  std::map<std::string, int> index_;
  int nslots_ = 0;
};

} // namespace liftmr::mj
