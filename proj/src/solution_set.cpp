// SPDX-License-Identifier: Apache-2.0
#include "entropik/solution_set.hpp"

#include <algorithm>
#include <functional>

namespace entropik {

namespace {

// Row of the linear system: sum_j a[j] * x_j = b.
struct Row {
  std::vector<Poly> a;
  Poly b;
};

Row linear_row(const Expr& equation, const std::vector<Atom>& unknowns, const std::string& label) {
  std::set<Atom> vars(unknowns.begin(), unknowns.end());
  std::vector<CollectedTerm> terms;
  try {
    terms = collect_coefficients(equation, vars);
  } catch (const NotPolynomialInVars&) {
    throw NonlinearInLeading("equation '" + label + "' has a leading derivative in a denominator");
  }
  Row row;
  row.a.assign(unknowns.size(), Poly());
  for (auto& t : terms) {
    if (t.mono.empty()) {
      row.b = -t.coef;
      continue;
    }
    if (mono_degree(t.mono) != 1) {
      throw NonlinearInLeading("equation '" + label + "' is nonlinear in the leading derivatives (term " +
                               to_string(t.mono) + ")");
    }
    auto it = std::find_if(unknowns.begin(), unknowns.end(),
                           [&](const Atom& u) { return u.id() == t.mono[0].var; });
    row.a[static_cast<std::size_t>(it - unknowns.begin())] = std::move(t.coef);
  }
  return row;
}

Poly exact(const Poly& a, const Poly& b) {
  if (b.is_constant()) return a.scaled(1 / b.constant_term());
  auto q = divide_exact(a, b);
  if (!q) throw std::logic_error("fraction-free elimination: inexact division");
  return *q;
}

struct Solution {
  std::vector<Expr> values;
  Poly determinant;
};

// Bareiss elimination followed by back substitution over the fraction field.
Solution bareiss_solve(std::vector<Row> rows, const std::vector<Atom>& unknowns) {
  const std::size_t n = unknowns.size();
  Poly prev(1);
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t r = k;
    while (r < n && rows[r].a[k].is_zero()) ++r;
    if (r == n) {
      throw SingularSystem("the equations do not determine leading derivative '" + unknowns[k].str() + "'");
    }
    if (r != k) {
      std::swap(rows[r], rows[k]);
      sign = -sign;
    }
    const Poly& pk = rows[k].a[k];
    for (std::size_t i = k + 1; i < n; ++i) {
      Row& ri = rows[i];
      const Poly lead = ri.a[k];
      for (std::size_t j = k + 1; j < n; ++j) {
        ri.a[j] = exact(pk * ri.a[j] - lead * rows[k].a[j], prev);
      }
      ri.b = exact(pk * ri.b - lead * rows[k].b, prev);
      ri.a[k] = Poly();
    }
    prev = pk;
  }
  Solution sol;
  sol.determinant = sign > 0 ? prev : -prev;
  sol.values.assign(n, Expr());
  for (std::size_t k = n; k-- > 0;) {
    Expr acc(rows[k].b);
    for (std::size_t j = k + 1; j < n; ++j) {
      if (!rows[k].a[j].is_zero()) acc -= Expr(rows[k].a[j]) * sol.values[j];
    }
    sol.values[k] = acc / Expr(rows[k].a[k]);
  }
  return sol;
}

void add_pivots(std::vector<Expr>& pivots, const Poly& p) {
  for (Poly& f : split_factors(p)) {
    Expr e(std::move(f));
    if (std::find(pivots.begin(), pivots.end(), e) == pivots.end()) pivots.push_back(std::move(e));
  }
}

MultiIndex difference(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// Earliest (lowest order, then canonical) leading-class atom that is not a key.
std::optional<Atom> first_open(const ModelDef& m, const SolvedSystem& s, const std::set<Atom, CanonicalLess>& atoms) {
  std::optional<Atom> best;
  for (const Atom& a : atoms) {
    if (a.kind() != AtomKind::jet || s.is_key(a) || !m.is_leading_class(a)) continue;
    if (!best || a.order() < best->order()) best = a;
  }
  return best;
}

class Closure {
 public:
  Closure(const ModelDef& m, SolvedSystem& s) : m_(m), s_(s), ctx_(m.context()) {}

  // Make sure `key` has a solved form; returns after s_ has been extended.
  void ensure(const Atom& key) {
    if (s_.is_key(key)) return;
    if (key.order() > m_.max_order) {
      throw OrderCapExceeded("closure needs '" + key.str() + "' of order " + std::to_string(key.order()) +
                             ", above max_order " + std::to_string(m_.max_order));
    }
    if (std::find(active_.begin(), active_.end(), key) != active_.end()) {
      throw SingularConsequence("the consequence '" + key.str() + "' depends on itself through other consequences");
    }
    auto base = m_.consequence_base(key);
    if (!base) throw SingularConsequence("'" + key.str() + "' is not a consequence of a leading derivative");
    const Atom& lead = m_.leading[*base];
    // Peel one direction off, preferring the first independent variable.
    MultiIndex rest = difference(key.index(), lead.index());
    int var = -1;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] > 0) {
        var = static_cast<int>(i);
        break;
      }
    }
    MultiIndex parent_idx = key.index();
    parent_idx[static_cast<std::size_t>(var)] -= 1;
    Atom parent = key.with_index(parent_idx);
    active_.push_back(key);
    ensure(parent);
    Expr value = total_derivative(s_.value(parent), var, ctx_);
    value = resolve(value, key);
    active_.pop_back();

    // Keep the map triangular: earlier right-hand sides may mention the key.
    for (auto& [k, v] : s_.substitution.pairs) {
      if (v.contains(key)) v = substitute(v, key, value);
    }
    s_.substitution.set(key, value);
    s_.keys.push_back(key);
    s_.consequences.push_back(ConsequenceRecord{key, *base, parent, var, difference(key.index(), lead.index())});
  }

  // Substitute keys into e, creating every consequence it needs; a remaining
  // self-reference to `self` is solved for linearly.
  Expr resolve(Expr e, const Atom& self) {
    while (true) {
      e = substitute(e, s_.substitution);
      std::set<Atom, CanonicalLess> atoms = e.atoms();
      atoms.erase(self);
      auto open = first_open(m_, s_, atoms);
      if (!open) break;
      ensure(*open);
    }
    if (!e.contains(self)) return e;
    // e = c * self + d  =>  self = d / (1 - c)
    std::vector<CollectedTerm> parts;
    try {
      parts = collect_coefficients(e, std::set<Atom>{self});
    } catch (const NotPolynomialInVars&) {
      throw SingularConsequence("'" + self.str() + "' occurs in a denominator of its own prolongation");
    }
    Expr c, d;
    for (const auto& t : parts) {
      if (t.mono.empty()) {
        d = Expr::fraction(t.coef, e.den());
      } else if (mono_degree(t.mono) == 1) {
        c = Expr::fraction(t.coef, e.den());
      } else {
        throw SingularConsequence("'" + self.str() + "' occurs nonlinearly in its own prolongation");
      }
    }
    Expr pivot = Expr(1) - c;
    if (pivot.is_zero()) throw SingularConsequence("cannot isolate '" + self.str() + "'");
    add_pivots(s_.pivots, pivot.num());
    return d / pivot;
  }

 private:
  const ModelDef& m_;
  SolvedSystem& s_;
  JetContext ctx_;
  std::vector<Atom> active_;
};

}  // namespace

const Expr& SolvedSystem::value(const Atom& key) const {
  const Expr* v = substitution.find(key);
  if (v == nullptr) throw std::out_of_range("no solved form for '" + key.str() + "'");
  return *v;
}

std::vector<Poly> split_factors(const Poly& p) {
  std::vector<Poly> out;
  if (p.is_zero() || p.is_constant()) return out;
  Monomial content = p.monomial_content();
  std::vector<Atom> atoms;
  for (const VarPow& vp : content) atoms.push_back(Atom::from_id(vp.var));
  std::sort(atoms.begin(), atoms.end(), CanonicalLess{});
  for (const Atom& a : atoms) out.emplace_back(a);
  Poly rest = make_monic(p.div_monomial(content));
  if (!rest.is_constant()) out.push_back(std::move(rest));
  return out;
}

SolvedSystem solve_leading(const ModelDef& m, const ExpandedModel& ex) {
  if (ex.equations.size() != m.leading.size()) {
    throw SingularSystem("the number of equations differs from the number of leading derivatives");
  }
  std::vector<Row> rows;
  rows.reserve(ex.equations.size());
  for (std::size_t i = 0; i < ex.equations.size(); ++i) {
    rows.push_back(linear_row(ex.equations[i], m.leading, m.equations[i].label));
  }
  Solution sol = bareiss_solve(std::move(rows), m.leading);
  SolvedSystem s;
  for (std::size_t k = 0; k < m.leading.size(); ++k) {
    s.substitution.set(m.leading[k], sol.values[k]);
    s.keys.push_back(m.leading[k]);
  }
  add_pivots(s.pivots, sol.determinant);
  // Denominators that the equations themselves carried are divisions too.
  for (const Expr& e : ex.equations) add_pivots(s.pivots, e.den());
  s.substitution.triangular = s.substitution.check_triangular();
  return s;
}

SolvedSystem solve_leading(const ModelDef& m) { return solve_leading(m, expand_model(m)); }

SolvedSystem close_consequences(const ModelDef& m, const ExpandedModel& /*ex*/, SolvedSystem s,
                                const Expr& target) {
  Closure closure(m, s);
  // Right-hand sides first (the solved form itself must be closed), then the target.
  while (true) {
    std::set<Atom, CanonicalLess> atoms;
    for (const auto& [k, v] : s.substitution.pairs) {
      for (const Atom& a : v.atoms()) atoms.insert(a);
    }
    auto open = first_open(m, s, atoms);
    if (!open) break;
    closure.ensure(*open);
    // RHS that mention the new key were updated in place; loop to a fixpoint.
  }
  while (true) {
    Expr t = substitute(target, s.substitution);
    auto open = first_open(m, s, t.atoms());
    if (!open) break;
    closure.ensure(*open);
  }
  s.substitution.triangular = s.substitution.check_triangular();
  return s;
}

Expr prolong(const Expr& equation, const MultiIndex& order, const JetContext& ctx) {
  Expr e = equation;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int k = 0; k < order[i]; ++k) e = total_derivative(e, static_cast<int>(i), ctx);
  }
  return e;
}

bool VerifyReport::ok() const {
  if (!triangular) return false;
  return std::all_of(items.begin(), items.end(), [](const VerifyItem& v) { return v.residue.is_zero(); });
}

VerifyReport verify_solved(const ModelDef& m, const ExpandedModel& ex, const SolvedSystem& s) {
  VerifyReport r;
  for (const auto& [k, v] : s.substitution.pairs) {
    for (const Atom& a : v.atoms()) {
      if (s.is_key(a) || (a.kind() == AtomKind::jet && m.is_leading_class(a))) r.triangular = false;
    }
  }
  for (std::size_t i = 0; i < ex.equations.size(); ++i) {
    r.items.push_back({m.equations[i].label, substitute(ex.equations[i], s.substitution)});
  }
  JetContext ctx = m.context();
  for (const auto& c : s.consequences) {
    std::string what = "D";
    for (std::size_t i = 0; i < c.order.size(); ++i) {
      for (int k = 0; k < c.order[i]; ++k) what += "_" + m.indep[i];
    }
    what += " " + m.equations[c.equation].label;
    Expr prolonged = prolong(ex.equations[c.equation], c.order, ctx);
    r.items.push_back({what, substitute(prolonged, s.substitution)});
  }
  return r;
}

}  // namespace entropik
