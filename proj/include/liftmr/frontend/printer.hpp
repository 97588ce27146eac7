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

#include <sstream>
#include <string>

namespace liftmr::mj {

namespace detail {

inline int expr_prec(const Expr &e) {
  switch (e.kind) {
  case ExprKind::Binary:
    return binop_prec(e.bin);
  case ExprKind::Unary:
    return 7;
  case ExprKind::IntLit:
    return e.int_val < 0 ? 7 : 8;
  default:
    return 8;
  }
}

inline void print_expr(std::ostream &os, const Expr &e, int ctx);

inline void print_sub(std::ostream &os, const Expr &e, int ctx) {
  if (expr_prec(e) < ctx) {
    os << "(";
    print_expr(os, e, 0);
    os << ")";
  } else {
    print_expr(os, e, ctx);
  }
}

inline void print_expr(std::ostream &os, const Expr &e, int ctx) {
  (void)ctx;
  switch (e.kind) {
  case ExprKind::IntLit:
    os << e.int_val;
    return;
  case ExprKind::BoolLit:
    os << (e.bool_val ? "true" : "false");
    return;
  case ExprKind::StrLit:
    os << '"' << e.name << '"';
    return;
  case ExprKind::Var:
    os << e.name;
    return;
  case ExprKind::Index:
    print_sub(os, *e.args[0], 8);
    os << "[";
    print_expr(os, *e.args[1], 0);
    os << "]";
    return;
  case ExprKind::Unary: {
    os << (e.un == UnOp::Neg ? "-" : "!");
    const Expr &x = *e.args[0];
    // Nested prefix operators are parenthesized so "--" never forms a token.
    if (x.kind == ExprKind::Unary || (x.kind == ExprKind::IntLit && x.int_val < 0))
      print_sub(os, x, 8);
    else
      print_sub(os, x, 7);
    return;
  }
  case ExprKind::Binary: {
    int p = binop_prec(e.bin);
    print_sub(os, *e.args[0], p);
    os << " " << binop_text(e.bin) << " ";
    print_sub(os, *e.args[1], p + 1);
    return;
  }
  case ExprKind::Call: {
    os << e.name << "(";
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      if (i)
        os << ", ";
      print_expr(os, *e.args[i], 0);
    }
    os << ")";
    return;
  }
  case ExprKind::NewArray:
    os << "new " << prim_name(e.alloc.elem) << "[";
    print_expr(os, *e.args[0], 0);
    os << "]";
    return;
  case ExprKind::NewMap:
    os << "new " << e.alloc.name() << "()";
    return;
  }
}

class StmtPrinter {
public:
  explicit StmtPrinter(std::ostream &os) : os_(os) {}

  void list(const StmtList &ss, int depth) {
    for (const auto &s : ss)
      stmt(*s, depth);
  }

  void simple(const Stmt &s) {
    switch (s.kind) {
    case StmtKind::Decl:
      os_ << s.decl_type.name() << " " << s.name;
      if (s.value) {
        os_ << " = ";
        print_expr(os_, *s.value, 0);
      }
      return;
    case StmtKind::Assign:
      os_ << s.name << " = ";
      print_expr(os_, *s.value, 0);
      return;
    case StmtKind::Store:
      os_ << s.name << "[";
      print_expr(os_, *s.index, 0);
      os_ << "] = ";
      print_expr(os_, *s.value, 0);
      return;
    case StmtKind::Eval:
      print_expr(os_, *s.value, 0);
      return;
    default:
      return;
    }
  }

  void stmt(const Stmt &s, int depth) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    switch (s.kind) {
    case StmtKind::Decl:
    case StmtKind::Assign:
    case StmtKind::Store:
    case StmtKind::Eval:
      os_ << pad;
      simple(s);
      os_ << ";\n";
      return;
    case StmtKind::Break:
      os_ << pad << "break;\n";
      return;
    case StmtKind::Return:
      os_ << pad << "return";
      if (s.value) {
        os_ << " ";
        print_expr(os_, *s.value, 0);
      }
      os_ << ";\n";
      return;
    case StmtKind::Block:
      os_ << pad << "{\n";
      list(s.body, depth + 1);
      os_ << pad << "}\n";
      return;
    case StmtKind::If:
      os_ << pad << "if (";
      print_expr(os_, *s.cond, 0);
      os_ << ") {\n";
      list(s.body, depth + 1);
      if (s.has_else) {
        os_ << pad << "} else {\n";
        list(s.orelse, depth + 1);
      }
      os_ << pad << "}\n";
      return;
    case StmtKind::While:
      os_ << pad << "while (";
      print_expr(os_, *s.cond, 0);
      os_ << ") {\n";
      list(s.body, depth + 1);
      os_ << pad << "}\n";
      return;
    case StmtKind::For:
      os_ << pad << "for (";
      if (s.init)
        simple(*s.init);
      os_ << "; ";
      if (s.cond)
        print_expr(os_, *s.cond, 0);
      os_ << "; ";
      if (s.step)
        simple(*s.step);
      os_ << ") {\n";
      list(s.body, depth + 1);
      os_ << pad << "}\n";
      return;
    }
  }

private:
  std::ostream &os_;
};

} // namespace detail

inline std::string to_source(const Expr &e) {
  std::ostringstream os;
  detail::print_expr(os, e, 0);
  return os.str();
}

inline std::string to_source(const StmtList &ss, int depth = 0) {
  std::ostringstream os;
  detail::StmtPrinter(os).list(ss, depth);
  return os.str();
}

inline std::string to_source(const Program &p) {
  std::ostringstream os;
  detail::StmtPrinter sp(os);
  for (std::size_t i = 0; i < p.functions.size(); ++i) {
    const Function &f = p.functions[i];
    if (i)
      os << "\n";
    os << f.ret.name() << " " << f.name << "(";
    for (std::size_t k = 0; k < f.params.size(); ++k) {
      if (k)
        os << ", ";
      os << f.params[k].type.name() << " " << f.params[k].name;
    }
    os << ") {\n";
    sp.list(f.body, 1);
    os << "}\n";
  }
  return os.str();
}

} // namespace liftmr::mj
