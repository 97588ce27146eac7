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

#include "liftmr/analyzer/analyzer.hpp"
#include "liftmr/frontend/frontend.hpp"
#include "liftmr/runtime/runtime.hpp"
#include "liftmr/synth/search.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace liftmr::codegen {

using synth::Candidate;
using synth::SExprPtr;
using synth::Summary;

class CodegenError : public Error {
public:
  using Error::Error;
};

class DocError : public Error {
public:
  using Error::Error;
};

namespace detail {

inline std::string prim_word(mj::Prim p) { return mj::prim_name(p); }

inline mj::Prim parse_prim(const std::string &w) {
  if (w == "int")
    return mj::Prim::Int;
  if (w == "bool")
    return mj::Prim::Bool;
  if (w == "string")
    return mj::Prim::Str;
  throw DocError("unknown type '" + w + "'");
}

inline std::string scalar_word(const mj::Scalar &s) {
  if (auto *str = std::get_if<std::string>(&s))
    return synth::quote(*str);
  return mj::scalar_str(s);
}

inline std::string init_words(const spec::InitValue &v) {
  switch (v.kind) {
  case spec::InitKind::Literal:
    return "literal " + scalar_word(v.lit);
  case spec::InitKind::Array:
    return "array " + prim_word(v.elem) + " " + std::to_string(*v.length);
  case spec::InitKind::EmptyMap:
    return "map";
  case spec::InitKind::Fresh:
    return "fresh " + v.fresh;
  }
  return "?";
}

inline std::string term_word(const synth::LoopTerm &t) {
  return t.length ? "length" : std::to_string(t.lit);
}

// Tokens of one document line: atoms, parentheses and quoted strings.
struct Tok {
  std::string text;
  bool quoted = false;
};

inline std::vector<Tok> tokenize(const std::string &line) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      out.push_back({std::string(1, c), false});
      ++i;
    } else if (c == '"') {
      std::string s;
      ++i;
      for (;;) {
        if (i >= line.size())
          throw DocError("unterminated string");
        if (line[i] == '\\' && i + 1 < line.size()) {
          s += line[i + 1];
          i += 2;
        } else if (line[i] == '"') {
          ++i;
          break;
        } else {
          s += line[i++];
        }
      }
      out.push_back({s, true});
    } else {
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
             line[j] != '(' && line[j] != ')')
        ++j;
      out.push_back({line.substr(i, j - i), false});
      i = j;
    }
  }
  return out;
}

inline bool is_int_word(const std::string &w) {
  std::size_t k = w.size() > 1 && w[0] == '-' ? 1 : 0;
  if (k >= w.size())
    return false;
  for (; k < w.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(w[k])))
      return false;
  return true;
}

inline std::int64_t to_int(const std::string &w) {
  if (!is_int_word(w))
    throw DocError("expected an integer, got '" + w + "'");
  try {
    return std::stoll(w);
  } catch (const std::exception &) {
    throw DocError("integer out of range: " + w);
  }
}

struct ExprScope {
  std::string counter;
  mj::Prim data = mj::Prim::Int;
  std::vector<spec::ScalarInput> inputs;
  bool fold = false;
  mj::Prim fold_type = mj::Prim::Int;
};

class ExprReader {
public:
  ExprReader(const std::vector<Tok> &toks, std::size_t pos,
             const ExprScope &scope)
      : toks_(toks), pos_(pos), scope_(scope) {}

  SExprPtr read() {
    const Tok &t = take();
    if (t.quoted)
      return synth::s_str(t.text);
    if (t.text == "(")
      return list();
    if (t.text == ")")
      throw DocError("unexpected ')'");
    if (is_int_word(t.text))
      return synth::s_int(to_int(t.text));
    if (t.text == "true" || t.text == "false")
      return synth::s_bool(t.text == "true");
    if (scope_.fold) {
      if (t.text == "value")
        return synth::s_acc(scope_.fold_type);
      if (t.text == "v")
        return synth::s_elem(scope_.fold_type);
      throw DocError("unknown fold term '" + t.text + "'");
    }
    if (t.text == scope_.counter)
      return synth::s_counter(t.text);
    for (std::size_t k = 0; k < scope_.inputs.size(); ++k)
      if (scope_.inputs[k].name == t.text)
        return synth::s_input(static_cast<int>(k), t.text,
                              scope_.inputs[k].type);
    throw DocError("unknown term '" + t.text + "'");
  }

  std::size_t pos() const { return pos_; }

private:
  const std::vector<Tok> &toks_;
  std::size_t pos_;
  const ExprScope &scope_;

  const Tok &take() {
    if (pos_ >= toks_.size())
      throw DocError("unexpected end of expression");
    return toks_[pos_++];
  }

  void close() {
    const Tok &t = take();
    if (t.quoted || t.text != ")")
      throw DocError("expected ')'");
  }

  SExprPtr list() {
    const Tok &head = take();
    if (head.quoted)
      throw DocError("operator expected");
    SExprPtr out;
    if (head.text == "data") {
      if (scope_.fold)
        throw DocError("data inside a fold");
      out = synth::s_data(read(), scope_.data);
    } else if (head.text == "!") {
      out = synth::s_not(read());
    } else {
      static const std::map<std::string, mj::BinOp> ops = [] {
        std::map<std::string, mj::BinOp> m;
        for (int k = 0; k <= static_cast<int>(mj::BinOp::Or); ++k) {
          auto op = static_cast<mj::BinOp>(k);
          m[mj::binop_text(op)] = op;
        }
        return m;
      }();
      auto it = ops.find(head.text);
      if (it == ops.end())
        throw DocError("unknown operator '" + head.text + "'");
      SExprPtr a = read();
      SExprPtr b = read();
      out = synth::s_bin(it->second, a, b);
    }
    close();
    return out;
  }
};

inline std::string class_name(const std::string &fragment) {
  std::string out;
  bool up = true;
  for (char c : fragment) {
    if (!std::isalnum(static_cast<unsigned char>(c))) {
      up = true;
      continue;
    }
    out += up ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
              : c;
    up = false;
  }
  return out;
}

} // namespace detail

// Canonical SummaryDoc text. Wall time is left out so that the text is a
// function of the summary.
inline std::string emit_summary(const Summary &s) {
  const auto &t = s.tmpl;
  const auto &c = s.candidate;
  std::ostringstream os;
  os << "liftmr-summary v1\n";
  os << "fragment " << s.fragment << "\n";
  os << "data " << t.data_var << " " << detail::prim_word(t.data_elem) << "\n";
  os << "counter " << t.counter << " stride " << t.stride << "\n";
  for (const auto &in : t.inputs) {
    os << "input " << in.name << " " << detail::prim_word(in.type);
    if (in.element)
      os << " element " << in.element->array << " " << in.element->index;
    os << "\n";
  }
  for (const auto &[n, v] : t.pre.bindings)
    os << "pre " << n << " " << detail::init_words(v) << "\n";
  for (const auto &o : t.outputs) {
    os << "output " << o.id << " " << o.name << " " << spec::shape_name(o.shape)
       << " " << detail::prim_word(o.value);
    if (o.shape == spec::OutShape::Map)
      os << " key " << detail::prim_word(o.key);
    if (o.length)
      os << " length " << *o.length;
    os << "\n";
  }
  for (const auto &e : c.emits) {
    os << "emit " << e.output << " guard "
       << (e.guard ? synth::to_prefix(e.guard) : "-") << " key";
    if (e.rest.empty())
      os << " -";
    for (const auto &r : e.rest)
      os << " " << synth::to_prefix(r);
    os << " value " << synth::to_prefix(e.value) << "\n";
  }
  for (const auto &f : c.folds)
    os << "fold " << f.output << " " << detail::prim_word(f.type) << " init "
       << f.init << " body " << synth::to_prefix(f.body) << "\n";
  os << "lce " << detail::term_word(c.lce.lo) << " "
     << detail::term_word(c.lce.hi) << "\n";
  os << "domain max-len " << s.domain.max_len << " int-range " << s.domain.lo
     << ":" << s.domain.hi << " alphabet " << s.domain.alphabet << "\n";
  os << "iteration " << s.stats.iteration << "\n";
  os << "candidates " << s.stats.candidates << "\n";
  os << "counterexamples " << s.stats.counterexamples << "\n";
  os << "end\n";
  return os.str();
}

inline Summary parse_summary(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  Summary s;
  auto &t = s.tmpl;
  bool header = false, ended = false;
  auto fail = [&](const std::string &msg) -> DocError {
    return DocError("summary line " + std::to_string(n) + ": " + msg);
  };
  auto scope = [&](bool fold, mj::Prim ft) {
    detail::ExprScope sc;
    sc.counter = t.counter;
    sc.data = t.data_elem;
    sc.inputs = t.inputs;
    sc.fold = fold;
    sc.fold_type = ft;
    return sc;
  };
  auto term = [&](const std::string &w) {
    synth::LoopTerm lt;
    if (w == "length")
      lt.length = true;
    else
      lt.lit = detail::to_int(w);
    return lt;
  };
  while (std::getline(in, line)) {
    ++n;
    if (line.empty())
      continue;
    try {
      auto toks = detail::tokenize(line);
      const std::string &kw = toks[0].text;
      auto word = [&](std::size_t k) -> const std::string & {
        if (k >= toks.size())
          throw fail("missing field");
        return toks[k].text;
      };
      if (!header) {
        if (line != "liftmr-summary v1")
          throw fail("expected 'liftmr-summary v1'");
        header = true;
      } else if (ended) {
        throw fail("text after 'end'");
      } else if (kw == "fragment") {
        s.fragment = word(1);
        t.fragment = s.fragment;
      } else if (kw == "data") {
        t.data_var = word(1);
        t.data_elem = detail::parse_prim(word(2));
      } else if (kw == "counter") {
        t.counter = word(1);
        if (word(2) != "stride")
          throw fail("expected stride");
        t.stride = detail::to_int(word(3));
      } else if (kw == "input") {
        spec::ScalarInput si{word(1), detail::parse_prim(word(2)),
                             std::nullopt};
        if (toks.size() > 3) {
          if (word(3) != "element")
            throw fail("expected element");
          si.element = analysis::SyntheticInput{word(4),
                                                detail::to_int(word(5))};
        }
        t.inputs.push_back(std::move(si));
      } else if (kw == "pre") {
        spec::InitValue v;
        const std::string &k = word(2);
        if (k == "literal") {
          const auto &tk = toks.at(3);
          if (tk.quoted)
            v = spec::InitValue::literal(tk.text);
          else if (tk.text == "true" || tk.text == "false")
            v = spec::InitValue::literal(tk.text == "true");
          else
            v = spec::InitValue::literal(detail::to_int(tk.text));
        } else if (k == "array") {
          v = spec::InitValue::zero_array(detail::to_int(word(4)),
                                          detail::parse_prim(word(3)));
        } else if (k == "map") {
          v = spec::InitValue::empty_map();
        } else if (k == "fresh") {
          v = spec::InitValue::fresh_symbol(word(3));
        } else {
          throw fail("unknown precondition kind '" + k + "'");
        }
        t.pre.bindings.emplace_back(word(1), v);
      } else if (kw == "output") {
        spec::OutputSlot o;
        o.id = static_cast<int>(detail::to_int(word(1)));
        o.name = word(2);
        const std::string &shape = word(3);
        o.shape = shape == "scalar"  ? spec::OutShape::Scalar
                  : shape == "array" ? spec::OutShape::Array
                  : shape == "map"   ? spec::OutShape::Map
                                     : throw fail("unknown shape " + shape);
        o.value = detail::parse_prim(word(4));
        for (std::size_t k = 5; k + 1 < toks.size(); k += 2) {
          if (word(k) == "key")
            o.key = detail::parse_prim(word(k + 1));
          else if (word(k) == "length")
            o.length = detail::to_int(word(k + 1));
          else
            throw fail("unknown output field " + word(k));
        }
        if (const auto *iv = t.pre.find(o.name))
          o.init = *iv;
        t.outputs.push_back(std::move(o));
      } else if (kw == "emit") {
        synth::Emit e;
        e.output = static_cast<int>(detail::to_int(word(1)));
        if (word(2) != "guard")
          throw fail("expected guard");
        auto sc = scope(false, mj::Prim::Int);
        std::size_t pos = 3;
        if (toks.at(pos).text == "-" && !toks[pos].quoted) {
          ++pos;
        } else {
          detail::ExprReader r(toks, pos, sc);
          e.guard = r.read();
          pos = r.pos();
        }
        if (word(pos) != "key")
          throw fail("expected key");
        ++pos;
        if (toks.at(pos).text == "-" && !toks[pos].quoted) {
          ++pos;
        } else {
          while (pos < toks.size() &&
                 !(toks[pos].text == "value" && !toks[pos].quoted)) {
            detail::ExprReader r(toks, pos, sc);
            e.rest.push_back(r.read());
            pos = r.pos();
          }
        }
        if (word(pos) != "value")
          throw fail("expected value");
        detail::ExprReader r(toks, pos + 1, sc);
        e.value = r.read();
        if (r.pos() != toks.size())
          throw fail("trailing tokens");
        s.candidate.emits.push_back(std::move(e));
      } else if (kw == "fold") {
        synth::Fold f;
        f.output = static_cast<int>(detail::to_int(word(1)));
        f.type = detail::parse_prim(word(2));
        if (word(3) != "init" || word(5) != "body")
          throw fail("expected init and body");
        f.init = detail::to_int(word(4));
        auto sc = scope(true, f.type);
        detail::ExprReader r(toks, 6, sc);
        f.body = r.read();
        if (r.pos() != toks.size())
          throw fail("trailing tokens");
        s.candidate.folds.push_back(std::move(f));
      } else if (kw == "lce") {
        s.candidate.lce = {term(word(1)), term(word(2))};
      } else if (kw == "domain") {
        s.domain.max_len = static_cast<int>(detail::to_int(word(2)));
        auto range = word(4);
        auto colon = range.find(':', 1);
        if (colon == std::string::npos)
          throw fail("expected LO:HI");
        s.domain.lo = detail::to_int(range.substr(0, colon));
        s.domain.hi = detail::to_int(range.substr(colon + 1));
        s.domain.alphabet = static_cast<int>(detail::to_int(word(6)));
      } else if (kw == "iteration") {
        s.stats.iteration = static_cast<int>(detail::to_int(word(1)));
      } else if (kw == "candidates") {
        s.stats.candidates = static_cast<std::size_t>(detail::to_int(word(1)));
      } else if (kw == "counterexamples") {
        s.stats.counterexamples =
            static_cast<std::size_t>(detail::to_int(word(1)));
      } else if (kw == "end") {
        ended = true;
      } else {
        throw fail("unknown keyword '" + kw + "'");
      }
    } catch (const DocError &e) {
      if (std::string(e.what()).rfind("summary line", 0) == 0)
        throw;
      throw fail(e.what());
    } catch (const std::out_of_range &) {
      throw fail("missing field");
    }
  }
  if (!header)
    throw DocError("empty summary document");
  if (!ended)
    throw DocError("summary document is truncated");
  if (s.candidate.folds.empty() || t.outputs.empty())
    throw DocError("summary has no outputs");
  return s;
}

inline bool same_candidate(const Candidate &a, const Candidate &b) {
  if (a.emits.size() != b.emits.size() || a.folds.size() != b.folds.size() ||
      !(a.lce == b.lce))
    return false;
  for (std::size_t k = 0; k < a.emits.size(); ++k) {
    const auto &x = a.emits[k], &y = b.emits[k];
    if (x.output != y.output || !synth::equal(x.guard, y.guard) ||
        !synth::equal(x.value, y.value) || x.rest.size() != y.rest.size())
      return false;
    for (std::size_t r = 0; r < x.rest.size(); ++r)
      if (!synth::equal(x.rest[r], y.rest[r]))
        return false;
  }
  for (std::size_t k = 0; k < a.folds.size(); ++k) {
    const auto &x = a.folds[k], &y = b.folds[k];
    if (x.output != y.output || x.type != y.type || x.init != y.init ||
        !synth::equal(x.body, y.body))
      return false;
  }
  return true;
}

// Equality over everything a SummaryDoc records.
inline bool same_summary(const Summary &a, const Summary &b) {
  return a.fragment == b.fragment && same_candidate(a.candidate, b.candidate) &&
         a.tmpl.str() == b.tmpl.str() && a.domain.str() == b.domain.str() &&
         a.stats.iteration == b.stats.iteration &&
         a.stats.candidates == b.stats.candidates &&
         a.stats.counterexamples == b.stats.counterexamples;
}

inline runtime::Job bind_job(const Summary &s) {
  runtime::Job job;
  job.candidate = s.candidate;
  job.data_elem = s.tmpl.data_elem;
  job.inputs = s.tmpl.inputs;
  job.combiner_enabled = !s.candidate.folds.empty();
  synth::Symbols syms;
  for (const auto &o : s.tmpl.outputs) {
    runtime::OutputShape sh{o.name, o.id, o.shape, o.value, o.key, 0};
    if (o.shape == spec::OutShape::Array) {
      if (!o.length)
        throw CodegenError("shape underdetermined: length of '" + o.name +
                           "' is not known statically");
      sh.length = *o.length;
    }
    const synth::Fold *f = s.candidate.fold_for(o.id);
    if (!f)
      throw CodegenError("no fold for output '" + o.name + "'");
    if (f->type != o.value)
      throw CodegenError("fold type does not match output '" + o.name + "'");
    if (auto fixed = o.fixed_init())
      if (syms.encode(*fixed) != f->init)
        throw CodegenError("fold init of '" + o.name +
                           "' differs from its initial value");
    if (!runtime::fold_types_match(*f))
      job.combiner_enabled = false;
    job.outputs.push_back(sh);
  }
  for (const auto &e : s.candidate.emits)
    if (!job.output(e.output))
      throw CodegenError("emit for unknown output " +
                         std::to_string(e.output));
  return job;
}

// Runs the jobs invoked by rewritten programs.
class RuntimeHost : public mj::JobHost {
public:
  explicit RuntimeHost(runtime::RuntimeConfig cfg = {}) : cfg_(cfg) {}

  void add(const std::string &name, runtime::Job job) {
    jobs_[name] = std::move(job);
  }

  std::map<int, mj::Value> run_job(const std::string &name,
                                   const std::vector<mj::Value> &args) override {
    auto it = jobs_.find(name);
    if (it == jobs_.end())
      throw runtime::RuntimeError("unknown job '" + name + "'");
    if (args.empty())
      throw runtime::RuntimeError("job '" + name + "' needs its data");
    std::vector<mj::Scalar> inputs;
    for (std::size_t k = 1; k < args.size(); ++k)
      inputs.push_back(args[k].to_scalar());
    return runtime::execute(it->second, args[0], inputs, cfg_);
  }

private:
  runtime::RuntimeConfig cfg_;
  std::map<std::string, runtime::Job> jobs_;
};

namespace detail {

inline mj::StmtList replace_at(const mj::StmtList &list,
                           const std::vector<analysis::PathStep> &path,
                           std::size_t depth, const mj::StmtList &with) {
  auto idx = static_cast<std::size_t>(path[depth].index);
  if (idx >= list.size())
    throw CodegenError("fragment location does not resolve");
  mj::StmtList out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (k != idx) {
      out.push_back(list[k]);
      continue;
    }
    if (depth + 1 == path.size()) {
      out.insert(out.end(), with.begin(), with.end());
      continue;
    }
    auto copy = std::make_shared<mj::Stmt>(*list[k]);
    if (path[depth].branch == 0)
      copy->body = replace_at(copy->body, path, depth + 1, with);
    else
      copy->orelse = replace_at(copy->orelse, path, depth + 1, with);
    out.push_back(copy);
  }
  return out;
}

inline std::string fresh_name(const mj::Function &f, const std::string &base) {
  std::set<std::string> used;
  for (const auto &p : f.params)
    used.insert(p.name);
  mj::walk_stmts(f.body, [&](const mj::Stmt &s) {
    if (s.kind == mj::StmtKind::Decl)
      used.insert(s.name);
  });
  std::string n = base;
  for (int k = 1; used.count(n); ++k)
    n = base + std::to_string(k);
  return n;
}

} // namespace detail

namespace detail {

inline void splice(mj::Program &out, const analysis::LoopFragment &f,
                   const Summary &s) {
  using namespace mj;
  const auto &t = s.tmpl;
  if (s.fragment != f.id)
    throw CodegenError("summary is for " + s.fragment + ", not " + f.id);
  Function *fn = nullptr;
  for (auto &g : out.functions)
    if (g.name == f.loc.function)
      fn = &g;
  if (!fn)
    throw CodegenError("no function '" + f.loc.function + "'");
  const StmtPtr *at = analysis::resolve_path(fn->body, f.loc.path);
  if (!at || *at != f.loop)
    throw CodegenError("fragment location does not resolve to its loop");

  auto name = str_lit(s.fragment);
  auto data = var_ref(t.data_var);
  StmtList with;
  std::vector<ExprPtr> args{name, data};
  for (const auto &in : t.inputs) {
    if (in.element)
      args.push_back(index_expr(var_ref(in.element->array),
                                int_lit(in.element->index)));
    else
      args.push_back(var_ref(in.name));
  }
  with.push_back(eval_stmt(call("mr_run", args)));
  std::string j = detail::fresh_name(*fn, "mr_j");
  bool declared = false;
  for (const auto &o : t.outputs) {
    auto id = int_lit(o.id);
    switch (o.shape) {
    case spec::OutShape::Scalar:
      with.push_back(assign_stmt(
          o.name, call(o.value == Prim::Bool ? "mr_bool" : "mr_int",
                       {name, id})));
      break;
    case spec::OutShape::Array: {
      if (!declared) {
        with.push_back(decl_stmt(Type::int_(), j, int_lit(0)));
        declared = true;
      } else {
        with.push_back(assign_stmt(j, int_lit(0)));
      }
      auto jv = var_ref(j);
      StmtList body{
          store_stmt(o.name, jv, call("mr_cell", {name, id, jv})),
          assign_stmt(j, binary(BinOp::Add, jv, int_lit(1)))};
      with.push_back(while_stmt(
          binary(BinOp::Lt, jv, call("length", {var_ref(o.name)})), body));
      break;
    }
    case spec::OutShape::Map:
      with.push_back(eval_stmt(call("mr_collect", {name, id, var_ref(o.name)})));
      break;
    }
  }
  // i = i + ceil((length(data) - i) / stride) * stride when i < length(data)
  auto i = var_ref(t.counter);
  auto len = call("length", {data});
  auto st = int_lit(t.stride);
  auto steps = binary(
      BinOp::Div,
      binary(BinOp::Add, binary(BinOp::Sub, len, i),
             int_lit(t.stride - 1)),
      st);
  with.push_back(if_stmt(
      binary(BinOp::Lt, i, len),
      {assign_stmt(t.counter,
                   binary(BinOp::Add, i, binary(BinOp::Mul, steps, st)))}));
  fn->body = replace_at(fn->body, f.loc.path, 0, with);
}

} // namespace detail

using Lifted = std::pair<analysis::LoopFragment, Summary>;

// Replaces each fragment's loop by a job invocation, the reconstruction of
// every output from the job result, and the counter's exit value.
inline mj::Program rewrite_program(const mj::Program &p,
                                   std::vector<Lifted> lifted) {
  std::sort(lifted.begin(), lifted.end(), [](const Lifted &a, const Lifted &b) {
    if (a.first.loc.function != b.first.loc.function)
      return a.first.loc.function < b.first.loc.function;
    const auto &x = a.first.loc.path, &y = b.first.loc.path;
    return std::lexicographical_compare(
        y.begin(), y.end(), x.begin(), x.end(),
        [](const analysis::PathStep &l, const analysis::PathStep &r) {
          return std::pair(l.index, l.branch) < std::pair(r.index, r.branch);
        });
  });
  mj::Program out = p;
  for (const auto &[f, s] : lifted)
    detail::splice(out, f, s);
  return mj::typecheck(out);
}

inline mj::Program rewrite_program(const mj::Program &p,
                                   const analysis::LoopFragment &f,
                                   const Summary &s) {
  return rewrite_program(p, {{f, s}});
}

// Mapper / reducer / driver skeleton in a Hadoop-like Java dialect. Not
// meant to compile.
inline std::string render_target_source(const Summary &s,
                                        const std::string &dialect) {
  if (dialect != "hadoop-java-sketch")
    throw CodegenError("unknown dialect '" + dialect + "'");
  const auto &t = s.tmpl;
  const std::string cls = detail::class_name(s.fragment);
  auto java_type = [](mj::Prim p) {
    return p == mj::Prim::Int    ? std::string("int")
           : p == mj::Prim::Bool ? std::string("boolean")
                                 : std::string("String");
  };
  auto boxed = [](mj::Prim p) {
    return p == mj::Prim::Int    ? std::string("Integer")
           : p == mj::Prim::Bool ? std::string("Boolean")
                                 : std::string("String");
  };
  synth::InfixNames names;
  names.data = t.data_var;
  synth::InfixNames fold_names;
  fold_names.elem = "val";
  synth::Symbols syms;
  std::ostringstream os;
  os << "// " << s.fragment << ": generated MapReduce sketch\n";
  os << "class " << cls << "Mapper extends Mapper {\n";
  os << "  void map(int " << t.counter << ", " << java_type(t.data_elem) << "[] "
     << t.data_var;
  for (const auto &in : t.inputs)
    os << ", " << java_type(in.type) << " " << in.name;
  os << ") {\n";
  for (const auto &e : s.candidate.emits) {
    std::string key = std::to_string(e.output);
    if (!e.rest.empty()) {
      key = "new Key(" + key;
      for (const auto &r : e.rest)
        key += ", " + synth::to_infix(r, names);
      key += ")";
    }
    std::string line = "emit(" + key + ", " + synth::to_infix(e.value, names) +
                       ");";
    if (e.guard)
      os << "    if (" << synth::to_infix(e.guard, names) << ") {\n      "
         << line << "\n    }\n";
    else
      os << "    " << line << "\n";
  }
  os << "  }\n}\n\n";
  os << "class " << cls << "Reducer extends Reducer {\n";
  os << "  void reduce(Key key, Iterable values) {\n";
  os << "    switch (key.id) {\n";
  for (const auto &f : s.candidate.folds) {
    mj::Scalar init = syms.decode(f.init, f.type);
    std::string init_text = mj::scalar_str(init);
    os << "    case " << f.output << ": {\n";
    os << "      " << java_type(f.type) << " value = " << init_text << ";\n";
    os << "      for (" << boxed(f.type) << " val : values) {\n";
    os << "        value = " << synth::to_infix(f.body, fold_names) << ";\n";
    os << "      }\n";
    os << "      emit(key, value);\n";
    os << "      break;\n";
    os << "    }\n";
  }
  os << "    }\n  }\n}\n\n";
  bool combiner = true;
  for (const auto &f : s.candidate.folds)
    combiner = combiner && runtime::fold_types_match(f);
  os << "class " << cls << "Hadoop {\n";
  os << "  static Map execute(" << java_type(t.data_elem) << "[] "
     << t.data_var << ") {\n";
  os << "    Job job = new Job();\n";
  os << "    job.setMapper(" << cls << "Mapper.class);\n";
  if (combiner)
    os << "    job.setCombiner(" << cls << "Reducer.class);\n";
  os << "    job.setReducer(" << cls << "Reducer.class);\n";
  os << "    return job.run(" << t.data_var << ");\n";
  os << "  }\n}\n";
  return os.str();
}

} // namespace liftmr::codegen
