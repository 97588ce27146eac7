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

#include "liftmr/bench/corpus.hpp"
#include "liftmr/frontend/frontend.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace liftmr;
using namespace liftmr::mj;
using testutil::corpus_file;

namespace {

const char *kNames[] = {"summation", "wordcount", "stringmatch", "histogram3d",
                        "linregress"};

int count_loops(const StmtList &body) {
  int n = 0;
  walk_stmts(body, [&](const Stmt &s) {
    if (s.kind == StmtKind::For || s.kind == StmtKind::While)
      ++n;
  });
  return n;
}

const Type &decl_type_of(const Program &p, const std::string &name) {
  static Type none;
  const Type *out = &none;
  walk_stmts(p.find("main")->body, [&](const Stmt &s) {
    if (s.kind == StmtKind::Decl && s.name == name)
      out = &s.decl_type;
  });
  return *out;
}

} // namespace

TEST(Parse, SummationHasOneLoop) {
  Program p = parse(corpus_file("summation"));
  ASSERT_EQ(p.functions.size(), 1u);
  EXPECT_EQ(count_loops(p.functions[0].body), 1);
}

TEST(Parse, HistogramHasOneLoopAndThreeArrays) {
  Program p = parse(corpus_file("histogram3d"));
  const Function *main = p.find("main");
  ASSERT_NE(main, nullptr);
  EXPECT_EQ(count_loops(main->body), 1);
  int arrays = 0;
  for (const auto &s : main->body)
    if (s->kind == StmtKind::Decl && s->decl_type.kind == Type::Kind::Array)
      ++arrays;
  EXPECT_EQ(arrays, 3);
}

TEST(Parse, MissingExpressionReportsSemicolon) {
  try {
    parse("int main() { int x = ; }");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError &e) {
    EXPECT_EQ(e.pos.line, 1);
    EXPECT_EQ(e.pos.col, 22);
    EXPECT_NE(std::string(e.what()).find("expected expression"),
              std::string::npos);
  }
}

TEST(Parse, UnknownType) {
  EXPECT_THROW(parse("int main() { float x = 1; return 0; }"), SyntaxError);
  EXPECT_THROW(parse("int main(float x) { return 0; }"), SyntaxError);
}

TEST(Parse, CompoundAssignmentDesugars) {
  Program p = parse("void main(int[] a) { int x = 1; x += 2; a[0]++; }");
  const auto &body = p.functions[0].body;
  ASSERT_EQ(body.size(), 3u);
  EXPECT_EQ(to_source({body[1]}), "x = x + 2;\n");
  EXPECT_EQ(to_source({body[2]}), "a[0] = a[0] + 1;\n");
}

TEST(Parse, RoundTripIsFixpoint) {
  for (const char *n : kNames) {
    std::string once = to_source(parse(corpus_file(n)));
    std::string twice = to_source(parse(once));
    EXPECT_EQ(once, twice) << n;
    std::string norm = to_source(compile(corpus_file(n)));
    EXPECT_EQ(norm, to_source(parse(norm))) << n;
  }
  std::string tricky = "int main(int a) {\n  int b = -(-a) - -3 * (a + 1) % 2;\n"
                       "  bool c = !(a < b) || a == b && !true;\n  return b;\n}\n";
  std::string once = to_source(parse(tricky));
  EXPECT_EQ(once, to_source(parse(once)));
}

TEST(Typecheck, SummationSumIsInt) {
  Program p = typecheck(parse(corpus_file("summation")));
  EXPECT_TRUE(p.typed);
  EXPECT_EQ(decl_type_of(p, "sum"), Type::int_());
}

TEST(Typecheck, HistogramArrays) {
  Program p = typecheck(parse(corpus_file("histogram3d")));
  for (const char *n : {"hR", "hG", "hB"})
    EXPECT_EQ(decl_type_of(p, n), Type::array(Prim::Int)) << n;
}

TEST(Typecheck, Mismatch) {
  EXPECT_THROW(typecheck(parse("void main(int[] data) { bool b = data[0]; }")),
               TypeError);
}

TEST(Typecheck, Errors) {
  EXPECT_THROW(typecheck(parse("void main() { x = 1; }")), TypeError);
  EXPECT_THROW(typecheck(parse("void main() { int x = 1; int x = 2; }")),
               TypeError);
  EXPECT_THROW(typecheck(parse("void main() { int[][] x; }")), TypeError);
  EXPECT_THROW(typecheck(parse("void main() { map<int,int[]> m; }")), TypeError);
  EXPECT_THROW(typecheck(parse("void main() { break; }")), TypeError);
  EXPECT_THROW(typecheck(parse("int f(int a) { return f(a); }\n"
                               "void main() { int x = f(1); }")),
               TypeError);
  EXPECT_THROW(typecheck(parse("void g() { }")), TypeError);
  EXPECT_THROW(typecheck(parse("void main(map<int,int> m) { int x = m[0]; }")),
               TypeError);
  EXPECT_THROW(typecheck(parse("void main(map<int,int> m) { int x = put(m, 1, 2); }")),
               TypeError);
}

TEST(Typecheck, AnnotatesEveryExpression) {
  for (const char *n : kNames) {
    Program p = typecheck(parse(corpus_file(n)));
    walk_stmts(p.find("main")->body, [&](const Stmt &s) {
      for (const auto &e : stmt_exprs(s))
        walk_expr(e, [&](const Expr &x) {
          bool void_ok = x.kind == ExprKind::Call && x.name == "put";
          EXPECT_TRUE(!x.type.is_void() || void_ok) << n;
        });
    });
  }
}

TEST(Normalize, ForBecomesCanonicalWhile) {
  Program p = compile("void main(int[] data, int n) {\n"
                      "  int s = 0;\n"
                      "  for (int i = 0; i < n; i += 3) { s = s + 1; }\n"
                      "}\n");
  std::string expect = "void main(int[] data, int n) {\n"
                       "  int s = 0;\n"
                       "  {\n"
                       "    int i = 0;\n"
                       "    while (true) {\n"
                       "      if (!(i < n)) {\n"
                       "        break;\n"
                       "      }\n"
                       "      s = s + 1;\n"
                       "      i = i + 3;\n"
                       "    }\n"
                       "  }\n"
                       "}\n";
  EXPECT_EQ(to_source(p), expect);
}

TEST(Normalize, LowersChains) {
  Program p = compile("void main(int a, int b, int c) { int x = 0; x = a + b + c; }");
  EXPECT_EQ(to_source(p.functions[0].body),
            "int x = 0;\nint _t1 = a + b;\nx = _t1 + c;\n");
}

TEST(Normalize, NoLoopsKeepsStructure) {
  Program src = typecheck(parse("int helper(int a) { return a * 2; }\n"
                                "int main(int a) { int y = helper(a) + 1; return y; }"));
  Program p = normalize(src);
  ASSERT_EQ(p.functions.size(), 2u);
  EXPECT_EQ(p.functions[0].name, "helper");
  EXPECT_EQ(p.functions[1].name, "main");
  EXPECT_EQ(to_source(p.functions[1].body),
            "int _t1 = helper(a);\nint y = _t1 + 1;\nreturn y;\n");
}

TEST(Normalize, ExpressionsAreAtMostBinary) {
  for (const char *n : kNames) {
    Program p = compile(corpus_file(n));
    walk_stmts(p.find("main")->body, [&](const Stmt &s) {
      EXPECT_NE(s.kind, StmtKind::For);
      if (s.kind == StmtKind::While) {
        EXPECT_EQ(s.cond->kind, ExprKind::BoolLit);
      }
      for (const auto &e : stmt_exprs(s)) {
        if (s.kind == StmtKind::If && e->kind == ExprKind::Unary &&
            s.body.size() == 1 && s.body[0]->kind == StmtKind::Break)
          continue; // canonical exit test
        for (const auto &a : e->args)
          EXPECT_TRUE(is_atom(*a)) << n << ": " << to_source(*e);
      }
    });
  }
}

TEST(Normalize, ShortCircuitPreservesTraps) {
  Program p = compile("int main(int[] a) {\n"
                      "  int n = 0;\n"
                      "  if (length(a) > 0 && a[0] > 1 || length(a) > 5) { n = 1; }\n"
                      "  return n;\n}\n");
  Program src = typecheck(parse(to_source(p)));
  for (std::size_t len : {0u, 1u, 6u}) {
    Env env{{"a", Value(IntArray(len, 2))}};
    EXPECT_TRUE(testutil::same_outcome(interpret(p, env), interpret(src, env)));
    EXPECT_TRUE(interpret(p, env).ok());
  }
}

TEST(Normalize, PreservesSemanticsOnCorpus) {
  std::mt19937_64 rng(7);
  for (const char *n : kNames) {
    Program typed = typecheck(parse(corpus_file(n)));
    Program norm = normalize(typed);
    Interpreter a(typed), b(norm);
    const Function &main = *typed.find("main");
    for (int k = 0; k < 150; ++k) {
      std::int64_t lo = std::string(n) == "histogram3d" ? 0 : -5;
      Env env = testutil::random_env(main, rng, 20, lo, 5, 3);
      auto ra = a.run(env), rb = b.run(env);
      ASSERT_TRUE(testutil::same_outcome(ra, rb)) << n << " trial " << k;
    }
  }
}

// Direct C++ loops computing the corpus results, independent of MJ.
TEST(Interpret, HistogramSmall) {
  Program p = compile(corpus_file("histogram3d"));
  IntArray data = {1, 0, 2};
  auto out = interpret(p, {{"data", Value(data)}});
  ASSERT_TRUE(out.ok());
  IntArray hr(256, 0), hg(256, 0), hb(256, 0);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    hr[static_cast<std::size_t>(data[i])]++;
    hg[static_cast<std::size_t>(data[i + 1])]++;
    hb[static_cast<std::size_t>(data[i + 2])]++;
  }
  EXPECT_EQ(out.env.at("hR"), Value(hr));
  EXPECT_EQ(out.env.at("hG"), Value(hg));
  EXPECT_EQ(out.env.at("hB"), Value(hb));
  EXPECT_EQ(out.env.at("hR").int_array()[1], 1);
  EXPECT_EQ(out.env.at("hG").int_array()[0], 1);
  EXPECT_EQ(out.env.at("hB").int_array()[2], 1);
}

TEST(Interpret, SummationEmpty) {
  Program p = compile(corpus_file("summation"));
  auto out = interpret(p, {{"data", Value(IntArray{})}});
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out.env.at("sum"), Value(std::int64_t{0}));
  EXPECT_EQ(*out.ret, Value(std::int64_t{0}));
}

TEST(Interpret, WordCount) {
  Program p = compile(corpus_file("wordcount"));
  StrArray data = {"a", "b", "a"};
  auto out = interpret(p, {{"data", Value(data)}});
  ASSERT_TRUE(out.ok());
  MapData expect;
  for (const auto &w : data) {
    auto it = expect.find(Scalar(w));
    std::int64_t c = it == expect.end() ? 0 : std::get<std::int64_t>(it->second);
    expect[Scalar(w)] = c + 1;
  }
  EXPECT_EQ(out.env.at("counts"), Value(expect));
  EXPECT_EQ(out.env.at("counts").str(), "{a:2,b:1}");
}

TEST(Interpret, Traps) {
  auto run = [](const char *src, Env env) {
    return interpret(compile(src), env);
  };
  auto oob = run("void main(int[] a) { int x = a[3]; }", {{"a", Value(IntArray{1})}});
  ASSERT_FALSE(oob.ok());
  EXPECT_EQ(oob.trap->kind, Trap::Kind::OutOfBounds);
  auto div = run("int main(int a) { return 1 / a; }", {{"a", Value(0)}});
  ASSERT_FALSE(div.ok());
  EXPECT_EQ(div.trap->kind, Trap::Kind::DivByZero);
  auto ovf = run("int main(int a) { return a * a; }",
                 {{"a", Value(std::int64_t{1} << 40)}});
  ASSERT_FALSE(ovf.ok());
  EXPECT_EQ(ovf.trap->kind, Trap::Kind::Overflow);
  auto minus = run("int main(int a) { return a / -1; }", {{"a", Value(INT64_MIN)}});
  ASSERT_FALSE(minus.ok());
  EXPECT_EQ(minus.trap->kind, Trap::Kind::Overflow);
  auto fuel = interpret(compile("void main() { while (true) { } }"), {}, 1000);
  ASSERT_FALSE(fuel.ok());
  EXPECT_EQ(fuel.trap->kind, Trap::Kind::FuelExhausted);
}

TEST(Interpret, InputsAreCopied) {
  Program p = compile("void main(int[] a) { a[0] = 9; }");
  Value arr(IntArray{1, 2});
  auto out = interpret(p, {{"a", arr}});
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(arr.int_array()[0], 1);
  EXPECT_EQ(out.env.at("a").int_array()[0], 9);
}

TEST(Interpret, UserFunctionsAndReferences) {
  Program p = compile("void fill(int[] a, int v) { for (int i = 0; i < length(a); i++) { a[i] = v; } }\n"
                      "int main(int n) { int[] b = new int[n]; fill(b, 4); return b[n - 1]; }");
  auto out = interpret(p, {{"n", Value(3)}});
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(*out.ret, Value(4));
  EXPECT_EQ(out.env.at("b"), Value(IntArray{4, 4, 4}));
}

TEST(Interpret, Deterministic) {
  std::mt19937_64 rng(3);
  for (const char *n : kNames) {
    Program p = compile(corpus_file(n));
    Interpreter in(p);
    for (int k = 0; k < 20; ++k) {
      Env env = testutil::random_env(*p.find("main"), rng, 30, 0, 9, 4);
      EXPECT_TRUE(testutil::same_outcome(in.run(env), in.run(env)));
    }
  }
}

TEST(Corpus, EmbeddedMatchesFiles) {
  for (const auto &e : bench::corpus())
    EXPECT_EQ(std::string(e.source), corpus_file(std::string(e.name))) << e.name;
}
