// SPDX-License-Identifier: Apache-2.0
#include "entropik/bindings.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

namespace entropik {

namespace {

const std::set<std::string>& transcendental_names() {
  static const std::set<std::string> names = {"log", "ln", "exp", "sqrt", "sin", "cos", "tan", "sinh", "cosh",
                                              "tanh", "asin", "acos", "atan", "pow", "abs"};
  return names;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_identifier(const std::string& s) {
  static const std::regex re("[A-Za-z][A-Za-z0-9_]*");
  return std::regex_match(s, re);
}

// "7/5", "-2", "1.4", "2e-3" are accepted.
std::optional<mpq_class> parse_rational(const std::string& text) {
  static const std::regex frac(R"(\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*)");
  static const std::regex dec(R"(\s*([+-]?)(\d*)\.?(\d*)(?:[eE]([+-]?\d+))?\s*)");
  std::smatch mt;
  if (std::regex_match(text, mt, frac)) {
    mpq_class q(mpz_class(mt[1].str()), mt[2].matched ? mpz_class(mt[2].str()) : mpz_class(1));
    if (q.get_den() == 0) return std::nullopt;
    q.canonicalize();
    return q;
  }
  if (std::regex_match(text, mt, dec) && (mt[2].length() + mt[3].length()) > 0) {
    std::string digits = mt[2].str() + mt[3].str();
    mpz_class num(digits.empty() ? "0" : digits);
    long exp10 = -static_cast<long>(mt[3].length());
    if (mt[4].matched) exp10 += std::stol(mt[4].str());
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    mpq_class q = exp10 >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
    q.canonicalize();
    if (mt[1].str() == "-") q = -q;
    return q;
  }
  return std::nullopt;
}

bool contains_atom(const std::vector<Atom>& xs, const Atom& a) {
  return std::find(xs.begin(), xs.end(), a) != xs.end();
}

bool subset(const std::vector<Atom>& xs, const std::vector<Atom>& of) {
  return std::all_of(xs.begin(), xs.end(), [&](const Atom& a) { return contains_atom(of, a); });
}

class BindingsParser {
 public:
  BindingsParser(const ModelDef& m, std::string file) : m_(m) { b_.file = std::move(file); }

  BindingsResult run(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    std::vector<std::pair<int, std::string>> binds;
    while (std::getline(in, raw)) {
      ++no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      std::string line = raw.substr(0, raw.find('#'));
      std::string body = trim(line);
      if (body.empty()) continue;
      int col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
      std::string word = body.substr(0, body.find_first_of(" \t("));
      std::string rest = trim(body.substr(word.size()));
      int rest_col = col + static_cast<int>(body.size() - rest.size());
      if (word == "parameter") {
        parameter(no, rest_col, rest);
      } else if (word == "function") {
        function(no, rest_col, rest);
      } else if (word == "free") {
        free(no, rest_col, rest);
      } else if (word == "bind") {
        binds.emplace_back(no, line);  // after every declaration
      } else {
        error(no, col, col + static_cast<int>(word.size()), "unknown statement '" + word + "'",
              "expected parameter, function, free or bind");
      }
    }
    for (const auto& [line_no, line] : binds) bind(line_no, line);
    BindingsResult out;
    bool failed = std::any_of(diags_.begin(), diags_.end(), [](const ParseDiagnostic& d) {
      return d.severity == ParseDiagnostic::Severity::error;
    });
    if (!failed) out.bindings = std::move(b_);
    out.diagnostics = std::move(diags_);
    return out;
  }

 private:
  void error(int line, int c0, int c1, std::string msg, std::string hint = {}, std::string code = {}) {
    ParseDiagnostic d;
    d.message = std::move(msg);
    d.hint = std::move(hint);
    d.code = std::move(code);
    d.span = {b_.file, line, c0, std::max(c0, c1)};
    diags_.push_back(std::move(d));
  }

  bool name_taken(const std::string& name) const {
    return m_.find_constit(name) != nullptr || m_.is_field(name) ||
           std::find(m_.indep.begin(), m_.indep.end(), name) != m_.indep.end() ||
           std::find(b_.parameters.begin(), b_.parameters.end(), name) != b_.parameters.end() ||
           b_.functions.count(name) != 0;
  }

  ExpressionScope scope() const {
    ExpressionScope s;
    s.extra_functions = b_.functions;
    for (const auto& p : b_.parameters) s.extra_functions[p] = {};
    return s;
  }

  std::optional<Expr> expression(int line, int col, const std::string& text) {
    static const std::regex fractional_power(R"(\^\s*\(?\s*[+-]?\s*(\d*\.\d|\d+\s*/))");
    static const std::regex call(R"(([A-Za-z][A-Za-z0-9_]*)\s*\()");
    std::smatch mt;
    if (std::regex_search(text, mt, fractional_power)) {
      int c = col + static_cast<int>(mt.position(0));
      error(line, c, c + static_cast<int>(mt.length(0)), "fractional powers are not rational",
            "bind the needed partial derivatives instead", "NonRationalBinding");
      return std::nullopt;
    }
    for (auto it = std::sregex_iterator(text.begin(), text.end(), call); it != std::sregex_iterator(); ++it) {
      std::string name = (*it)[1].str();
      if (transcendental_names().count(name) != 0 && !name_taken(name)) {
        int c = col + static_cast<int>(it->position(1));
        error(line, c, c + static_cast<int>(name.size()), "'" + name + "' is not a rational operation",
              "bind the needed partial derivatives instead", "NonRationalBinding");
        return std::nullopt;
      }
    }
    SourceSpan origin{b_.file, line, col, col};
    ExpressionResult r = parse_expression(text, m_, scope(), origin);
    if (!r.node) {
      for (ParseDiagnostic d : r.diagnostics) {
        if (d.message.rfind("unknown identifier", 0) == 0) {
          d.code = "UnboundSymbol";
          d.hint = "declare it with 'parameter' or 'function'";
        }
        diags_.push_back(std::move(d));
      }
      return std::nullopt;
    }
    return ast::evaluate(*r.node, b_.context(m_));
  }

  void parameter(int line, int col, const std::string& rest) {
    auto eq = rest.find('=');
    std::string name = trim(rest.substr(0, eq));
    if (!is_identifier(name) || name_taken(name)) {
      error(line, col, col + static_cast<int>(name.size()),
            name_taken(name) ? "'" + name + "' is already declared" : "expected a parameter name");
      return;
    }
    b_.parameters.push_back(name);
    if (eq == std::string::npos) return;
    std::string value = rest.substr(eq + 1);
    auto q = parse_rational(value);
    if (!q) {
      int c = col + static_cast<int>(eq) + 1;
      error(line, c, c + static_cast<int>(value.size()), "parameter value must be a rational number",
            "write 7/5 or 1.4", "NonRationalBinding");
      return;
    }
    b_.values[name] = *q;
  }

  void function(int line, int col, const std::string& rest) {
    static const std::regex decl(R"(([A-Za-z][A-Za-z0-9_]*)\s*\(([^()]*)\)\s*)");
    std::smatch mt;
    if (!std::regex_match(rest, mt, decl)) {
      error(line, col, col + static_cast<int>(rest.size()), "expected 'function F(arg, ...)'");
      return;
    }
    std::string name = mt[1].str();
    if (name_taken(name)) {
      error(line, col, col + static_cast<int>(name.size()), "'" + name + "' is already declared");
      return;
    }
    std::vector<Atom> args;
    std::istringstream in(mt[2].str());
    std::string part;
    JetContext ctx = m_.context();
    while (std::getline(in, part, ',')) {
      std::string arg = trim(part);
      ExpressionResult r = parse_expression(arg, m_, {}, {b_.file, line, col, col});
      std::optional<Atom> atom;
      if (r.node) {
        auto atoms = ast::evaluate(*r.node, ctx).atoms();
        if (atoms.size() == 1 && !atoms.begin()->is_function() && ast::evaluate(*r.node, ctx) == Expr(*atoms.begin())) {
          atom = *atoms.begin();
        }
      }
      if (!atom || contains_atom(args, *atom)) {
        error(line, col, col + static_cast<int>(rest.size()),
              "argument '" + arg + "' of '" + name + "' must be a distinct field or jet variable");
        return;
      }
      args.push_back(*atom);
    }
    if (args.empty()) {
      error(line, col, col + static_cast<int>(rest.size()), "function '" + name + "' needs arguments",
            "use 'parameter' for constants");
      return;
    }
    b_.functions[name] = args;
  }

  void free(int line, int col, const std::string& rest) {
    std::istringstream in(rest);
    std::string part;
    while (std::getline(in, part, ',')) {
      for (std::istringstream words(part); words >> part;) {
        if (m_.find_constit(part) == nullptr) {
          error(line, col, col + static_cast<int>(rest.size()), "'" + part + "' is not a constitutive symbol",
                {}, "UnboundSymbol");
          continue;
        }
        b_.free.insert(part);
      }
    }
  }

  // Arguments of the symbol behind a model or auxiliary atom.
  const std::vector<Atom>* args_of(const std::string& name) const {
    if (const ConstitDecl* d = m_.find_constit(name)) return &d->args;
    auto it = b_.functions.find(name);
    return it == b_.functions.end() ? nullptr : &it->second;
  }

  void bind(int line, const std::string& text) {
    std::size_t start = text.find("bind") + 4;
    std::size_t eq = text.find('=', start);
    int col = static_cast<int>(start) + 1;
    if (eq == std::string::npos) {
      error(line, col, static_cast<int>(text.size()), "expected 'bind <symbol> = <expression>'");
      return;
    }
    std::string lhs_text = text.substr(start, eq - start);
    std::string lhs = trim(lhs_text);
    int lhs_col = col + static_cast<int>(lhs_text.find_first_not_of(" \t"));
    std::optional<Expr> target = expression(line, lhs_col, lhs);
    if (!target) return;
    auto atoms = target->atoms();
    if (atoms.size() != 1 || *target != Expr(*atoms.begin()) || !atoms.begin()->is_function() ||
        m_.find_constit(atoms.begin()->name()) == nullptr) {
      error(line, lhs_col, lhs_col + static_cast<int>(lhs.size()),
            "'" + lhs + "' is not a constitutive symbol or partial of the model");
      return;
    }
    Atom a = *atoms.begin();
    const ConstitDecl& decl = *m_.find_constit(a.name());
    if (b_.free.count(a.name()) != 0) {
      error(line, lhs_col, lhs_col + static_cast<int>(lhs.size()), "'" + a.name() + "' is declared free");
      return;
    }
    for (const Binding& other : b_.bindings) {
      if (other.target.name() != a.name()) continue;
      if (other.target == a || other.target.kind() == AtomKind::constit || a.kind() == AtomKind::constit) {
        error(line, lhs_col, lhs_col + static_cast<int>(lhs.size()),
              "'" + a.str() + "' conflicts with the binding on line " + std::to_string(other.line),
              "bind either the function or some of its partials");
        return;
      }
    }
    std::string rhs_text = text.substr(eq + 1);
    int rhs_col = static_cast<int>(eq) + 2 + static_cast<int>(rhs_text.find_first_not_of(" \t"));
    std::optional<Expr> value = expression(line, rhs_col, trim(rhs_text));
    if (!value) return;
    for (const Atom& v : value->atoms()) {
      bool ok = false;
      if (v.is_function()) {
        const std::vector<Atom>* args = args_of(v.name());
        ok = args == nullptr || subset(*args, decl.args);  // parameters have no arguments
      } else {
        ok = contains_atom(decl.args, v);
      }
      if (!ok) {
        error(line, rhs_col, rhs_col + static_cast<int>(trim(rhs_text).size()),
              "the value of '" + a.str() + "' depends on '" + v.str() + "', which is outside the arguments of '" +
                  decl.name + "'");
        return;
      }
    }
    b_.bindings.push_back({a, *value, line});
  }

  const ModelDef& m_;
  Bindings b_;
  std::vector<ParseDiagnostic> diags_;
};

// Resolves atoms against the bindings, memoized per run.
class Binder {
 public:
  Binder(const ModelDef& m, const Bindings& b) : m_(m), b_(b), ctx_(b.context(m)) {}

  Expr apply(const Expr& e) {
    SubstitutionMap sm;
    for (const Atom& a : e.atoms()) {
      if (a.is_function()) sm.set(a, value(a));
    }
    return sm.pairs.empty() ? e : substitute(e, sm);
  }

 private:
  Expr value(const Atom& a) {
    if (auto it = b_.values.find(a.name()); it != b_.values.end()) return Expr(it->second);
    if (m_.find_constit(a.name()) == nullptr || b_.free.count(a.name()) != 0) return Expr(a);
    if (auto it = memo_.find(a); it != memo_.end()) return it->second;
    const Binding* exact = nullptr;
    const Binding* base = nullptr;
    for (const Binding& bd : b_.bindings) {
      if (bd.target.name() != a.name()) continue;
      if (bd.target == a) exact = &bd;
      if (dominates_strictly(slots(a), slots(bd.target)) && (base == nullptr || bd.target.order() > base->target.order())) {
        base = &bd;
      }
    }
    if (exact == nullptr && base == nullptr) {
      throw UnboundSymbol("no binding determines " + a.str() + " (bind it, one of its antiderivatives, or declare '" +
                          a.name() + "' free)");
    }
    if (!active_.insert(a).second) throw UnboundSymbol("bindings refer to each other through " + a.str());
    Expr v;
    if (exact != nullptr) {
      v = apply(exact->value);
    } else {
      v = apply(base->value);
      MultiIndex from = slots(base->target);
      MultiIndex to = slots(a);
      const ConstitSignature& sig = ctx_.signature(a.name());
      for (std::size_t j = 0; j < sig.args.size(); ++j) {
        for (int n = from[j]; n < to[j]; ++n) v = chain_partial(v, sig.args[j], ctx_);
      }
      v = apply(v);  // derivatives of symbols bound in turn
    }
    active_.erase(a);
    memo_.emplace(a, v);
    return v;
  }

  MultiIndex slots(const Atom& a) const {
    if (a.kind() == AtomKind::partial) return a.index();
    return MultiIndex(ctx_.signature(a.name()).args.size(), 0);
  }

  const ModelDef& m_;
  const Bindings& b_;
  JetContext ctx_;
  std::map<Atom, Expr> memo_;
  std::set<Atom> active_;
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  mpq_class draw() {
    std::uniform_int_distribution<int> num(-12, 12);
    std::uniform_int_distribution<int> den(1, 7);
    mpq_class q(num(rng_), den(rng_));
    q.canonicalize();
    return q;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

JetContext Bindings::context(const ModelDef& m) const {
  JetContext ctx = m.context();
  for (const auto& [name, args] : functions) {
    std::vector<std::string> labels;
    for (const auto& a : args) labels.push_back(a.str());
    ctx.constit[name] = ConstitSignature{args, labels};
  }
  for (const auto& p : parameters) ctx.constit[p] = ConstitSignature{};
  return ctx;
}

BindingsResult parse_bindings(const std::string& text, const ModelDef& m, const std::string& file) {
  try {
    return BindingsParser(m, file).run(text);
  } catch (const std::exception& e) {
    BindingsResult r;
    ParseDiagnostic d;
    d.message = std::string("internal bindings parser failure: ") + e.what();
    d.span.file = file;
    r.diagnostics.push_back(d);
    return r;
  }
}

BindingsResult parse_bindings_file(const std::string& path, const ModelDef& m) {
  std::ifstream in(path);
  if (!in) {
    BindingsResult r;
    ParseDiagnostic d;
    d.message = "cannot open bindings file";
    d.span.file = path;
    r.diagnostics.push_back(d);
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bindings(ss.str(), m, path);
}

Expr apply_bindings(const Expr& e, const ModelDef& m, const Bindings& b) { return Binder(m, b).apply(e); }

bool CheckResult::ok() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass; });
}

CheckResult check_candidate(const ModelDef& m, const ConstraintSystem& cs, const Bindings& b) {
  Binder binder(m, b);
  CheckResult out;
  for (std::size_t i = 0; i < cs.constraints.size(); ++i) {
    const Constraint& c = cs.constraints[i];
    CheckItem item;
    item.what = c.symmetry.empty() ? "constraint " + std::to_string(i + 1) : "symmetry " + c.symmetry;
    item.constraint = c.expr;
    try {
      item.value = binder.apply(c.expr);
      item.pass = item.value.is_zero();
    } catch (const DivisionByZeroExpr& e) {
      item.note = std::string("a denominator vanishes: ") + e.what();
    }
    out.items.push_back(std::move(item));
  }
  out.residual = binder.apply(cs.residual);
  return out;
}

ProductionSample sample_production(const ModelDef& m, const ConstraintSystem& cs, const Bindings& b, int trials,
                                   std::uint64_t seed) {
  ProductionSample out;
  out.trials = trials;
  out.production = apply_bindings(cs.entropy, m, b);
  Sampler rng(seed);
  const auto atoms = out.production.atoms();
  for (int trial = 0; trial < trials; ++trial) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      Assignment point;
      for (const Atom& a : atoms) point[a] = rng.draw();
      mpq_class v;
      try {
        v = eval_numeric(out.production, point);
      } catch (const DenominatorVanishes&) {
        ++out.rejected;
        continue;
      }
      if (v == 0) {
        ++out.zero;
      } else if (out.witnesses.size() < 5) {
        std::string w = "production " + v.get_str() + " at";
        for (const Atom& a : atoms) w += " " + a.str() + "=" + point[a].get_str();
        out.witnesses.push_back(w);
      }
      break;
    }
  }
  return out;
}

}  // namespace entropik
