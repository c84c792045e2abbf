// SPDX-License-Identifier: Apache-2.0
#include "entropik/expr.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace entropik {

// ---------------------------------------------------------------------------
// Normalization and arithmetic

Expr Expr::fraction(Poly num, Poly den) {
  if (den.is_zero()) throw DivisionByZeroExpr("denominator normalizes to the zero polynomial");
  if (num.is_zero()) return Expr(Poly(), Poly(1), true);
  Monomial g = mono_gcd(num.monomial_content(), den.monomial_content());
  if (!g.empty()) {
    num = num.div_monomial(g);
    den = den.div_monomial(g);
  }
  if (den.is_constant()) {
    mpq_class c = den.constant_term();
    if (c != 1) num = num.scaled(1 / c);
    return Expr(std::move(num), Poly(1), true);
  }
  if (den.size() > 1) {
    if (auto q = divide_exact(num, den)) return Expr(std::move(*q), Poly(1), true);
    if (num.size() > 1 && num.size() <= den.size()) {
      if (auto q = divide_exact(den, num)) return fraction(Poly(1), std::move(*q));
    }
  }
  mpq_class lc = den.canonical_leading().coef;
  if (lc != 1) {
    mpq_class inv = 1 / lc;
    num = num.scaled(inv);
    den = den.scaled(inv);
  }
  return Expr(std::move(num), std::move(den), true);
}

mpq_class Expr::constant_value() const {
  if (!is_constant()) throw std::logic_error("constant_value of a non-constant expression");
  return num_.constant_term() / den_.constant_term();
}

std::set<Atom, CanonicalLess> Expr::atoms() const {
  std::set<Atom, CanonicalLess> out;
  for (auto v : num_.vars()) out.insert(Atom::from_id(v));
  for (auto v : den_.vars()) out.insert(Atom::from_id(v));
  return out;
}

bool Expr::contains(const Atom& a) const {
  return num_.contains_var(a.id()) || den_.contains_var(a.id());
}

Expr Expr::operator-() const { return Expr(-num_, den_, true); }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) {
    if (a.den_.is_constant()) return Expr(a.num_ + b.num_, a.den_, true);
    return Expr::fraction(a.num_ + b.num_, a.den_);
  }
  if (b.den_.is_constant()) return Expr::fraction(a.num_ + b.num_ * a.den_, a.den_);
  if (a.den_.is_constant()) return Expr::fraction(a.num_ * b.den_ + b.num_, b.den_);
  if (a.den_.is_monomial() && b.den_.is_monomial()) {
    // Normalized monomial denominators carry coefficient 1.
    const Monomial& ma = a.den_.leading().mono;
    const Monomial& mb = b.den_.leading().mono;
    Monomial l = mono_lcm(ma, mb);
    Poly num = a.num_.times_monomial(mono_div(l, ma)) + b.num_.times_monomial(mono_div(l, mb));
    return Expr::fraction(std::move(num), Poly::monomial(std::move(l), 1));
  }
  if (auto k = divide_exact(b.den_, a.den_)) return Expr::fraction(a.num_ * *k + b.num_, b.den_);
  if (auto k = divide_exact(a.den_, b.den_)) return Expr::fraction(a.num_ + b.num_ * *k, a.den_);
  return Expr::fraction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.den_.is_constant() && b.den_.is_constant()) return Expr(a.num_ * b.num_, Poly(1), true);
  Poly n1 = a.num_;
  Poly d1 = a.den_;
  Poly n2 = b.num_;
  Poly d2 = b.den_;
  if (d2.size() > 1) {
    if (auto q = divide_exact(n1, d2)) {
      n1 = std::move(*q);
      d2 = Poly(1);
    }
  }
  if (d1.size() > 1) {
    if (auto q = divide_exact(n2, d1)) {
      n2 = std::move(*q);
      d1 = Poly(1);
    }
  }
  return Expr::fraction(n1 * n2, d1 * d2);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw DivisionByZeroExpr("division by an expression that normalizes to zero");
  return a * Expr::fraction(b.den_, b.num_);
}

Expr Expr::pow(int n) const {
  if (n < 0) return (Expr(1) / *this).pow(-n);
  if (n == 0) return Expr(1);
  return Expr(num_.pow(static_cast<unsigned>(n)), den_.pow(static_cast<unsigned>(n)), true);
}

Expr Expr::cancel_factor(const Poly& f) const {
  if (f.is_constant() || is_zero()) return *this;
  auto qn = divide_exact(num_, f);
  if (!qn) return *this;
  auto qd = divide_exact(den_, f);
  if (!qd) return *this;
  return fraction(std::move(*qn), std::move(*qd));
}

// ---------------------------------------------------------------------------
// Context

const ConstitSignature& JetContext::signature(const std::string& name) const {
  auto it = constit.find(name);
  if (it == constit.end()) {
    throw UnknownConstitSym("constitutive symbol '" + name + "' has no declaration");
  }
  return it->second;
}

Atom JetContext::partial_atom(const std::string& name, const MultiIndex& slots) const {
  return Atom::partial(name, slots, signature(name).labels);
}

Atom JetContext::jet_atom(const std::string& field, const MultiIndex& index) const {
  return Atom::jet(field, index, indep);
}

int JetContext::indep_index(const std::string& name) const {
  for (std::size_t i = 0; i < indep.size(); ++i) {
    if (indep[i] == name) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

// sum over terms of coef * d(term)/d(var) * rule(var), accumulated by monomial.
template <typename Rule>
Poly chain_apply(const Poly& p, Rule&& rule) {
  std::unordered_map<std::uint32_t, Poly> memo;
  std::unordered_map<Monomial, mpq_class, MonomialHash> acc;
  for (const auto& t : p.terms()) {
    for (const auto& f : t.mono) {
      auto it = memo.find(f.var);
      if (it == memo.end()) it = memo.emplace(f.var, rule(Atom::from_id(f.var))).first;
      const Poly& dv = it->second;
      if (dv.is_zero()) continue;
      Monomial rest = mono_div(t.mono, Monomial{{f.var, 1}});
      mpq_class c = t.coef * f.exp;
      for (const auto& d : dv.terms()) {
        auto [slot, inserted] = acc.try_emplace(mono_mul(rest, d.mono));
        if (inserted) {
          slot->second = c * d.coef;
        } else {
          slot->second += c * d.coef;
        }
      }
    }
  }
  std::vector<Term> terms;
  terms.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (sgn(c) != 0) terms.push_back({m, std::move(c)});
  }
  return Poly::from_terms(std::move(terms));
}

template <typename PolyOp>
Expr quotient_rule(const Expr& e, PolyOp&& op) {
  if (e.den().is_constant()) return Expr(op(e.num())) * Expr(1 / e.den().constant_term());
  Poly dn = op(e.num());
  Poly dd = op(e.den());
  if (dd.is_zero()) return Expr::fraction(std::move(dn), e.den());
  return Expr::fraction(dn * e.den() - e.num() * dd, e.den() * e.den());
}

}  // namespace

Poly partial_diff(const Poly& p, const Atom& a) { return p.partial(a.id()); }

Expr partial_diff(const Expr& e, const Atom& a) {
  return quotient_rule(e, [&](const Poly& p) { return p.partial(a.id()); });
}

Poly total_derivative_atom(const Atom& a, int iv, const JetContext& ctx) {
  switch (a.kind()) {
    case AtomKind::indep:
      return ctx.indep_index(a.name()) == iv ? Poly(1) : Poly();
    case AtomKind::jet: {
      MultiIndex idx = a.index();
      idx.at(static_cast<std::size_t>(iv)) += 1;
      return Poly(a.with_index(std::move(idx)));
    }
    case AtomKind::constit:
    case AtomKind::partial: {
      const ConstitSignature& sig = ctx.signature(a.name());
      MultiIndex base = a.kind() == AtomKind::partial ? a.index() : MultiIndex(sig.args.size(), 0);
      Poly out;
      for (std::size_t j = 0; j < sig.args.size(); ++j) {
        Poly darg = total_derivative_atom(sig.args[j], iv, ctx);
        if (darg.is_zero()) continue;
        MultiIndex slots = base;
        slots[j] += 1;
        out += Poly(Atom::partial(a.name(), std::move(slots), sig.labels)) * darg;
      }
      return out;
    }
  }
  return Poly();
}

Poly total_derivative(const Poly& p, int iv, const JetContext& ctx) {
  return chain_apply(p, [&](const Atom& a) { return total_derivative_atom(a, iv, ctx); });
}

Expr total_derivative(const Expr& e, int iv, const JetContext& ctx) {
  return quotient_rule(e, [&](const Poly& p) { return total_derivative(p, iv, ctx); });
}

Expr chain_partial(const Expr& e, const Atom& arg, const JetContext& ctx) {
  auto rule = [&](const Atom& a) -> Poly {
    if (a == arg) return Poly(1);
    if (!a.is_function()) return Poly();
    const ConstitSignature& sig = ctx.signature(a.name());
    MultiIndex base = a.kind() == AtomKind::partial ? a.index() : MultiIndex(sig.args.size(), 0);
    Poly out;
    for (std::size_t j = 0; j < sig.args.size(); ++j) {
      if (sig.args[j] != arg) continue;
      MultiIndex slots = base;
      slots[j] += 1;
      out += Poly(Atom::partial(a.name(), std::move(slots), sig.labels));
    }
    return out;
  };
  return quotient_rule(e, [&](const Poly& p) { return chain_apply(p, rule); });
}

// ---------------------------------------------------------------------------
// Substitution

const Expr* SubstitutionMap::find(const Atom& a) const {
  auto it = pairs.find(a);
  return it == pairs.end() ? nullptr : &it->second;
}

bool SubstitutionMap::check_triangular() const {
  for (const auto& [k, v] : pairs) {
    for (const auto& [k2, v2] : pairs) {
      (void)v2;
      if (v.contains(k2)) return false;
    }
    (void)k;
  }
  return true;
}

std::vector<Atom> SubstitutionMap::keys_canonical() const {
  std::vector<Atom> keys;
  keys.reserve(pairs.size());
  for (const auto& [k, v] : pairs) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), canonical_less);
  return keys;
}

namespace {

// Running sum of fractions that keeps a common denominator when possible.
class FractionSum {
 public:
  void add(const Poly& num, const Poly& den) {
    if (num.is_zero()) return;
    if (den == den_) {
      num_ += num;
    } else if (den_.is_monomial() && den.is_monomial() &&
               den_.leading().coef == 1 && den.leading().coef == 1) {
      const Monomial& ma = den_.leading().mono;
      const Monomial& mb = den.leading().mono;
      if (mono_divides(mb, ma)) {
        num_ += num.times_monomial(mono_div(ma, mb));
      } else {
        Monomial l = mono_lcm(ma, mb);
        num_ = num_.times_monomial(mono_div(l, ma)) + num.times_monomial(mono_div(l, mb));
        den_ = Poly::monomial(std::move(l), 1);
      }
    } else if (auto k = divide_exact(den_, den)) {
      num_ += num * *k;
    } else {
      num_ = num_ * den + num * den_;
      den_ = den_ * den;
    }
  }
  Expr result() const { return Expr::fraction(num_, den_); }

 private:
  Poly num_;
  Poly den_ = Poly(1);
};

using IdMap = std::unordered_map<std::uint32_t, const Expr*>;

Expr substitute_poly(const Poly& p, const IdMap& m) {
  // Group terms by the part of the monomial that involves keys.
  std::map<Monomial, std::vector<Term>> groups;
  bool any = false;
  for (const auto& t : p.terms()) {
    Monomial key;
    Monomial rest;
    for (const auto& f : t.mono) {
      if (m.count(f.var)) {
        key.push_back(f);
      } else {
        rest.push_back(f);
      }
    }
    if (!key.empty()) any = true;
    groups[std::move(key)].push_back({std::move(rest), t.coef});
  }
  if (!any) return Expr(p);
  std::map<std::pair<std::uint32_t, std::uint32_t>, Expr> powers;
  auto power = [&](std::uint32_t var, std::uint32_t exp) -> const Expr& {
    auto it = powers.find({var, exp});
    if (it == powers.end()) {
      it = powers.emplace(std::make_pair(var, exp), m.at(var)->pow(static_cast<int>(exp))).first;
    }
    return it->second;
  };
  FractionSum sum;
  for (auto& [key, terms] : groups) {
    Poly rest = Poly::from_terms(std::move(terms));
    if (key.empty()) {
      sum.add(rest, Poly(1));
      continue;
    }
    Expr value(1);
    for (const auto& f : key) value = value * power(f.var, f.exp);
    if (value.is_zero()) continue;
    sum.add(value.num() * rest, value.den());
  }
  return sum.result();
}

IdMap to_id_map(const SubstitutionMap& m) {
  IdMap ids;
  for (const auto& [k, v] : m.pairs) ids.emplace(k.id(), &v);
  return ids;
}

Expr substitute_ids(const Expr& e, const IdMap& ids) {
  if (ids.empty()) return e;
  Expr n = substitute_poly(e.num(), ids);
  if (e.den().is_constant()) return n * Expr(1 / e.den().constant_term());
  Expr d = substitute_poly(e.den(), ids);
  return n / d;
}

bool mentions_any(const Expr& e, const IdMap& ids) {
  for (const Poly* p : {&e.num(), &e.den()}) {
    for (const auto& t : p->terms()) {
      for (const auto& f : t.mono) {
        if (ids.count(f.var)) return true;
      }
    }
  }
  return false;
}

}  // namespace

Expr substitute(const Expr& e, const SubstitutionMap& m) { return substitute_ids(e, to_id_map(m)); }

Expr substitute(const Expr& e, const Atom& a, const Expr& value) {
  IdMap ids{{a.id(), &value}};
  return substitute_ids(e, ids);
}

Expr substitute_fixpoint(const Expr& e, const SubstitutionMap& m) {
  IdMap ids = to_id_map(m);
  Expr cur = e;
  for (std::size_t pass = 0; pass <= m.pairs.size() + 1; ++pass) {
    if (!mentions_any(cur, ids)) return cur;
    cur = substitute_ids(cur, ids);
  }
  if (mentions_any(cur, ids)) {
    throw std::runtime_error("substitution map is cyclic; keys remain after repeated passes");
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Coefficient collection and evaluation

std::vector<CollectedTerm> collect_coefficients(const Poly& p, const std::set<Atom>& vars) {
  std::unordered_set<std::uint32_t> ids;
  for (const auto& a : vars) ids.insert(a.id());
  std::map<Monomial, std::vector<Term>> groups;
  for (const auto& t : p.terms()) {
    Monomial key;
    Monomial rest;
    for (const auto& f : t.mono) {
      if (ids.count(f.var)) {
        key.push_back(f);
      } else {
        rest.push_back(f);
      }
    }
    groups[std::move(key)].push_back({std::move(rest), t.coef});
  }
  std::vector<CollectedTerm> out;
  out.reserve(groups.size());
  for (auto& [key, terms] : groups) out.push_back({key, Poly::from_terms(std::move(terms))});
  std::sort(out.begin(), out.end(), [](const CollectedTerm& a, const CollectedTerm& b) {
    return canonical_mono_compare(a.mono, b.mono) < 0;
  });
  return out;
}

std::vector<CollectedTerm> collect_coefficients(const Expr& e, const std::set<Atom>& vars) {
  for (const auto& a : vars) {
    if (e.den().contains_var(a.id())) {
      throw NotPolynomialInVars("denominator contains '" + a.str() + "'");
    }
  }
  return collect_coefficients(e.num(), vars);
}

mpq_class eval_numeric(const Poly& p, const Assignment& values) {
  std::unordered_map<std::uint32_t, const mpq_class*> ids;
  mpq_class total = 0;
  for (const auto& t : p.terms()) {
    mpq_class term = t.coef;
    for (const auto& f : t.mono) {
      auto it = ids.find(f.var);
      if (it == ids.end()) {
        Atom a = Atom::from_id(f.var);
        auto v = values.find(a);
        if (v == values.end()) {
          throw std::invalid_argument("no value assigned to '" + a.str() + "'");
        }
        it = ids.emplace(f.var, &v->second).first;
      }
      for (std::uint32_t k = 0; k < f.exp; ++k) term *= *it->second;
    }
    total += term;
  }
  return total;
}

mpq_class eval_numeric(const Expr& e, const Assignment& values) {
  mpq_class d = eval_numeric(e.den(), values);
  if (sgn(d) == 0) throw DenominatorVanishes("denominator " + to_string(e.den()) + " vanishes");
  return eval_numeric(e.num(), values) / d;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::vector<std::pair<Atom, std::uint32_t>> sorted_factors(const Monomial& m) {
  std::vector<std::pair<Atom, std::uint32_t>> fs;
  for (const auto& f : m) fs.emplace_back(Atom::from_id(f.var), f.exp);
  std::sort(fs.begin(), fs.end(),
            [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  return fs;
}

std::vector<const Term*> sorted_terms(const Poly& p) {
  std::vector<const Term*> ts;
  for (const auto& t : p.terms()) ts.push_back(&t);
  std::stable_sort(ts.begin(), ts.end(), [](const Term* a, const Term* b) {
    return canonical_mono_compare(a->mono, b->mono) > 0;
  });
  return ts;
}

}  // namespace

std::string to_string(const Monomial& m) {
  if (m.empty()) return "1";
  std::string out;
  for (const auto& [a, e] : sorted_factors(m)) {
    if (!out.empty()) out += "*";
    out += a.str();
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out;
}

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Term* t : sorted_terms(p)) {
    mpq_class c = t->coef;
    bool negative = sgn(c) < 0;
    if (negative) c = -c;
    std::string body;
    if (t->mono.empty()) {
      body = c.get_str();
    } else if (c == 1) {
      body = to_string(t->mono);
    } else {
      body = c.get_str() + "*" + to_string(t->mono);
    }
    if (first) {
      out = negative ? "-" + body : body;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
    first = false;
  }
  return out;
}

std::string to_string(const Expr& e) {
  if (e.den().is_constant()) return to_string(e.num());
  std::string n = to_string(e.num());
  if (e.num().size() > 1) n = "(" + n + ")";
  std::string d = to_string(e.den());
  bool bare = e.den().is_monomial() && e.den().leading().coef == 1 &&
              e.den().leading().mono.size() == 1 && e.den().leading().mono[0].exp == 1 &&
              Atom::from_id(e.den().leading().mono[0].var).kind() != AtomKind::partial;
  if (!bare) d = "(" + d + ")";
  return n + "/" + d;
}

namespace {

const std::set<std::string>& greek_names() {
  static const std::set<std::string> names = {
      "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
      "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau", "phi", "chi", "psi", "omega",
      "Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi", "Sigma", "Phi", "Psi", "Omega"};
  return names;
}

// rho -> \rho, Phi1 -> \Phi_{1}, eps -> \varepsilon, T12 -> T_{12}.
std::string latex_name(const std::string& name) {
  std::size_t cut = name.size();
  while (cut > 0 && std::isdigit(static_cast<unsigned char>(name[cut - 1]))) --cut;
  std::string base = name.substr(0, cut);
  std::string digits = name.substr(cut);
  if (base == "eps") {
    base = "\\varepsilon";
  } else if (greek_names().count(base)) {
    base = "\\" + base;
  } else if (base.size() > 1) {
    base = "\\mathrm{" + base + "}";
  }
  if (base.empty()) base = digits, digits.clear();
  return digits.empty() ? base : base + "_{" + digits + "}";
}

// Display labels such as rho_t or Lambda_rho.
std::string latex_label(const std::string& label) {
  auto pos = label.find('_');
  if (pos == std::string::npos) return latex_name(label);
  return "{" + latex_name(label.substr(0, pos)) + "}_{" + label.substr(pos + 1) + "}";
}

}  // namespace

std::string to_latex(const Atom& a) {
  switch (a.kind()) {
    case AtomKind::indep:
    case AtomKind::constit:
      return latex_label(a.name());
    case AtomKind::jet:
      return latex_label(a.str());
    case AtomKind::partial: {
      int order = a.order();
      std::string num = order > 1 ? "\\partial^{" + std::to_string(order) + "} " : "\\partial ";
      num += latex_label(a.name());
      std::string den;
      for (std::size_t j = 0; j < a.index().size(); ++j) {
        int k = a.index()[j];
        if (k == 0) continue;
        if (!den.empty()) den += " ";
        den += "\\partial " + latex_label(a.labels()[j]);
        if (k > 1) den += "^{" + std::to_string(k) + "}";
      }
      return "\\frac{" + num + "}{" + den + "}";
    }
  }
  return a.str();
}

std::string to_latex(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Term* t : sorted_terms(p)) {
    mpq_class c = t->coef;
    bool negative = sgn(c) < 0;
    if (negative) c = -c;
    std::string coef;
    if (c.get_den() == 1) {
      coef = c.get_num().get_str();
    } else {
      coef = "\\frac{" + c.get_num().get_str() + "}{" + c.get_den().get_str() + "}";
    }
    std::string body;
    if (t->mono.empty()) {
      body = coef;
    } else {
      if (c != 1) body = coef + " ";
      bool lead = true;
      for (const auto& [a, e] : sorted_factors(t->mono)) {
        if (!lead) body += " ";
        body += to_latex(a);
        if (e > 1) body += "^{" + std::to_string(e) + "}";
        lead = false;
      }
    }
    if (first) {
      out = negative ? "-" + body : body;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
    first = false;
  }
  return out;
}

std::string to_latex(const Expr& e) {
  if (e.den().is_constant()) return to_latex(e.num());
  return "\\frac{" + to_latex(e.num()) + "}{" + to_latex(e.den()) + "}";
}

}  // namespace entropik
