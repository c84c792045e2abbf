// SPDX-License-Identifier: Apache-2.0
#include "entropik/mueller_liu.hpp"

#include <algorithm>

namespace entropik {

namespace {

bool contains_expr(const std::vector<Expr>& v, const Expr& e) { return std::find(v.begin(), v.end(), e) != v.end(); }

void add_nonzero(std::vector<Expr>& out, const Poly& p) {
  for (Poly& f : split_factors(p)) {
    Expr e(std::move(f));
    if (!contains_expr(out, e)) out.push_back(std::move(e));
  }
}

// A coefficient we may divide by: every factor is known to be nonzero.
bool invertible(const Poly& p, const std::vector<Expr>& nonzero) {
  if (p.is_zero()) return false;
  for (const Poly& f : split_factors(p)) {
    if (!contains_expr(nonzero, Expr(f))) return false;
  }
  return true;
}

std::set<Atom> atom_set(const std::vector<Atom>& v) { return {v.begin(), v.end()}; }

// Arguments an expression varies with: constitutive symbols contribute their
// declared arguments, multipliers their postulated ones, jets themselves.
std::set<Atom, CanonicalLess> dependency_of(const Expr& e, const ModelDef& m, const std::vector<Multiplier>& mult) {
  std::set<Atom, CanonicalLess> out;
  for (const Atom& a : e.atoms()) {
    if (!a.is_function()) {
      out.insert(a);
      continue;
    }
    if (const ConstitDecl* d = m.find_constit(a.name())) {
      out.insert(d->args.begin(), d->args.end());
      continue;
    }
    for (const Multiplier& mu : mult) {
      if (mu.symbol == a) out.insert(mu.dependency.begin(), mu.dependency.end());
    }
  }
  return out;
}

std::string field_of(const ModelDef& m, std::size_t equation) { return m.leading[equation].name(); }

// Linear elimination rules read off a constraint set.  Each rule removes one
// constitutive symbol whose coefficient is a nonzero constant or a product of
// asserted-nonzero factors; constraints without such a symbol are kept as
// reduced members.
class Reducer {
 public:
  Reducer(const std::vector<Expr>& set, const std::vector<Expr>& nonzero) : nonzero_(nonzero) {
    std::vector<Expr> kept;
    for (const Expr& s : set) {
      Expr r = normal(substitute(s, rules_));
      if (r.is_zero()) continue;
      if (!add_rule(r)) kept.push_back(r);
    }
    for (const Expr& k : kept) {
      Expr r = normal(substitute(k, rules_));
      if (!r.is_zero() && !contains_expr(members_, r)) members_.push_back(r);
    }
  }

  bool implies(const Expr& c) const {
    Expr r = normal(substitute(c, rules_));
    return r.is_zero() || contains_expr(members_, r);
  }

 private:
  Expr normal(const Expr& e) const { return constraint_normal_form(e, nonzero_, nullptr); }

  bool add_rule(const Expr& r) {
    const Poly& p = r.num();
    std::optional<Atom> best;
    int best_class = 3;
    for (const Atom& a : r.atoms()) {
      if (!a.is_function() || p.degree_in(a.id()) != 1) continue;
      Poly coef = p.coefficient(a.id(), 1);
      int cls = coef.is_constant() ? 0 : invertible(coef, nonzero_) ? 1 : 3;
      if (cls <= best_class && cls < 3) {
        best = a;
        best_class = cls;
      }
    }
    if (!best) return false;
    Poly coef = p.coefficient(best->id(), 1);
    Expr value = -Expr(p.coefficient(best->id(), 0)) / Expr(coef);
    for (auto& [k, v] : rules_.pairs) {
      if (v.contains(*best)) v = substitute(v, *best, value);
    }
    rules_.set(*best, value);
    return true;
  }

  const std::vector<Expr>& nonzero_;
  SubstitutionMap rules_;
  std::vector<Expr> members_;
};

}  // namespace

std::vector<Multiplier> make_multipliers(const ModelDef& m, const std::vector<Atom>& dependency) {
  std::vector<Atom> dep = dependency.empty() ? m.dependency_atoms() : dependency;
  std::vector<Multiplier> out;
  for (std::size_t i = 0; i < m.equations.size(); ++i) {
    std::string field = field_of(m, i);
    std::size_t same = 0;
    for (std::size_t j = 0; j < m.leading.size(); ++j) same += field_of(m, j) == field ? 1 : 0;
    std::string name = "Lambda_" + (same == 1 ? field : m.equations[i].label);
    out.push_back(Multiplier{Atom::constit(name), i, dep});
  }
  return out;
}

Expr liu_extended(const ModelDef& /*m*/, const ExpandedModel& ex, const std::vector<Multiplier>& mult) {
  Expr e = ex.entropy;
  for (const Multiplier& mu : mult) e -= Expr(mu.symbol) * ex.equations[mu.equation];
  return e;
}

Expr liu_extended(const ModelDef& m, const std::vector<Atom>& dependency) {
  return liu_extended(m, expand_model(m), make_multipliers(m, dependency));
}

LiuResult liu_split(const Expr& e, const ModelDef& m, const std::vector<Atom>& dependency) {
  LiuResult r;
  r.multipliers = make_multipliers(m, dependency);
  r.extended = e;
  std::set<Atom> dep = atom_set(m.dependency_atoms());
  std::set<Atom, CanonicalLess> split;
  for (const Atom& a : e.atoms()) {
    if (a.kind() == AtomKind::jet && a.order() >= 1 && dep.count(a) == 0) split.insert(a);
  }
  r.split_set.assign(split.begin(), split.end());
  std::vector<CollectedTerm> terms;
  try {
    terms = collect_coefficients(e, std::set<Atom>(split.begin(), split.end()));
  } catch (const NotPolynomialInVars&) {
    throw NonlinearExtendedInequality("a splitting derivative occurs in the denominator " + to_string(e.den()));
  }
  for (const auto& t : terms) {
    if (t.mono.empty()) {
      r.residual = Expr::fraction(t.coef, e.den());
      continue;
    }
    if (mono_degree(t.mono) != 1) {
      throw NonlinearExtendedInequality("the extended entropy inequality is nonlinear in the splitting derivatives (term " +
                                        to_string(t.mono) + ")");
    }
    r.identities.push_back(LiuIdentity{Expr::fraction(t.coef, e.den()), t.mono});
  }
  return r;
}

LiuResult run_mueller_liu(const ModelDef& m, const std::vector<Atom>& dependency) {
  ExpandedModel ex = expand_model(m);
  return liu_split(liu_extended(m, ex, make_multipliers(m, dependency)), m, dependency);
}

const Expr* LiuElimination::value(const Atom& multiplier) const {
  for (const auto& s : solved) {
    if (s.symbol == multiplier) return &s.value;
  }
  return nullptr;
}

LiuElimination eliminate_multipliers(const ModelDef& m, const LiuResult& lr, std::vector<Expr> nonzero) {
  LiuElimination out;
  ExpandedModel ex = expand_model(m);
  SolvedSystem s = solve_leading(m, ex);
  for (const Expr& p : s.pivots) add_nonzero(nonzero, p.num());
  for (const Expr& z : ex.nonzero) add_nonzero(nonzero, z.num());

  std::set<Atom> mult_atoms;
  for (const Multiplier& mu : lr.multipliers) mult_atoms.insert(mu.symbol);
  std::set<Atom> dep = atom_set(m.dependency_atoms());
  auto is_multiplier = [&](const Atom& a) { return mult_atoms.count(a) != 0; };

  // State separation: the multipliers and constitutive functions do not depend
  // on independent variables or underived fields outside the dependency, so
  // each identity splits further as a polynomial in them.
  // Identities at the leading derivatives come first: they are the ones that
  // determine the multipliers (the evolution directions).
  std::vector<const LiuIdentity*> ordered;
  for (const LiuIdentity& id : lr.identities) ordered.push_back(&id);
  std::stable_partition(ordered.begin(), ordered.end(), [&](const LiuIdentity* id) {
    return m.is_leading_class(Atom::from_id(id->atom[0].var));
  });
  std::vector<Expr> pieces;
  for (const LiuIdentity* idp : ordered) {
    const LiuIdentity& id = *idp;
    std::set<Atom> state;
    for (const Atom& a : id.expr.atoms()) {
      if (a.kind() == AtomKind::indep || (a.kind() == AtomKind::jet && a.order() == 0 && dep.count(a) == 0)) {
        state.insert(a);
      }
    }
    if (state.empty() || std::any_of(state.begin(), state.end(),
                                     [&](const Atom& a) { return id.expr.den().contains_var(a.id()); })) {
      pieces.push_back(id.expr);
      continue;
    }
    for (const auto& t : collect_coefficients(id.expr, state)) pieces.push_back(Expr::fraction(t.coef, id.expr.den()));
  }

  // Linear solve for the multipliers, repeated until nothing changes.
  SubstitutionMap values;
  std::vector<bool> consumed(pieces.size(), false);
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (consumed[i]) continue;
      Expr e = substitute(pieces[i], values);
      std::set<Atom> present;
      for (const Atom& a : e.atoms()) {
        if (is_multiplier(a)) present.insert(a);
      }
      if (present.empty()) continue;
      std::vector<CollectedTerm> parts;
      try {
        parts = collect_coefficients(e, present);
      } catch (const NotPolynomialInVars&) {
        continue;
      }
      if (std::any_of(parts.begin(), parts.end(), [](const CollectedTerm& t) { return mono_degree(t.mono) > 1; })) {
        continue;
      }
      for (const Multiplier& mu : lr.multipliers) {
        auto it = std::find_if(parts.begin(), parts.end(), [&](const CollectedTerm& t) {
          return !t.mono.empty() && t.mono[0].var == mu.symbol.id();
        });
        if (it == parts.end() || !invertible(it->coef, nonzero)) continue;
        Poly coef = it->coef;
        Expr rest = Expr::fraction(e.num() - coef * Poly(mu.symbol), e.den());
        Expr value = -rest / Expr::fraction(coef, e.den());
        for (auto& [k, v] : values.pairs) {
          if (v.contains(mu.symbol)) v = substitute(v, mu.symbol, value);
        }
        values.set(mu.symbol, value);
        add_nonzero(nonzero, coef);
        out.solved.push_back(SolvedMultiplier{mu.symbol, value, pieces[i]});
        consumed[i] = true;
        progress = true;
        break;
      }
    }
  }
  for (auto& sm : out.solved) sm.value = *values.find(sm.symbol);
  for (const Multiplier& mu : lr.multipliers) {
    if (!values.contains(mu.symbol)) out.unsolved.push_back(mu.symbol);
  }

  auto add_physical = [&](const Expr& e, const std::string& tag) {
    add_constraint(out.physical, Constraint{e, {}, {}, tag}, nonzero);
  };

  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (consumed[i]) continue;
    const Expr& raw = pieces[i];
    bool separated = false;
    // Generic multiplier: if I = A + Lambda*B with Lambda's solved value
    // varying in an argument d on which neither A nor B depends, then
    // dI/dd = B * dLambda/dd = 0 forces B = 0 and A = 0 on the generic branch.
    for (const Multiplier& mu : lr.multipliers) {
      const Expr* v = values.find(mu.symbol);
      if (v == nullptr || !raw.contains(mu.symbol)) continue;
      SubstitutionMap others = values;
      others.pairs.erase(mu.symbol);
      Expr j = substitute(raw, others);
      if (std::any_of(mult_atoms.begin(), mult_atoms.end(),
                      [&](const Atom& a) { return a != mu.symbol && j.contains(a); })) {
        continue;
      }
      if (j.den().contains_var(mu.symbol.id()) || j.num().degree_in(mu.symbol.id()) != 1) continue;
      Expr a = Expr::fraction(j.num().coefficient(mu.symbol.id(), 0), j.den());
      Expr b = Expr::fraction(j.num().coefficient(mu.symbol.id(), 1), j.den());
      if (a.is_zero() || b.is_zero()) continue;
      auto dv = dependency_of(*v, m, lr.multipliers);
      auto da = dependency_of(a, m, lr.multipliers);
      auto db = dependency_of(b, m, lr.multipliers);
      for (const Atom& d : dv) {
        if (da.count(d) != 0 || db.count(d) != 0) continue;
        std::string note = to_string(raw) + ": " + mu.symbol.str() + " = " + to_string(*v) + " varies with " +
                           d.str() + ", so both parts vanish";
        out.separations.push_back(note);
        add_physical(a, "");
        add_physical(b, "");
        separated = true;
        break;
      }
      if (separated) break;
    }
    if (separated) continue;
    Expr e = substitute(raw, values);
    bool has_mult = std::any_of(mult_atoms.begin(), mult_atoms.end(), [&](const Atom& a) { return e.contains(a); });
    if (has_mult) {
      Expr nf = constraint_normal_form(e, nonzero, nullptr);
      if (!contains_expr(out.unresolved, nf)) out.unresolved.push_back(nf);
    } else {
      add_physical(e, "");
    }
  }

  JetContext ctx = m.context();
  for (const ConstitDecl& d : m.constit) {
    for (const auto& [a, b] : d.symmetric) {
      MultiIndex sa(d.args.size(), 0), sb(d.args.size(), 0);
      sa[static_cast<std::size_t>(a)] = 1;
      sb[static_cast<std::size_t>(b)] = 1;
      Expr sym = Expr(ctx.partial_atom(d.name, sa)) - Expr(ctx.partial_atom(d.name, sb));
      add_physical(sym, d.name + ": " + d.args[static_cast<std::size_t>(a)].str() + " ~ " +
                            d.args[static_cast<std::size_t>(b)].str());
    }
  }
  out.residual = substitute(lr.residual, values);
  out.nonzero = std::move(nonzero);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::identical:
      return "identical";
    case Verdict::liu_over_restricts:
      return "liu-over-restricts";
    case Verdict::incomparable:
      return "incomparable";
  }
  return "incomparable";
}

bool implied_by(const Expr& c, const std::vector<Expr>& set, const std::vector<Expr>& nonzero) {
  return Reducer(set, nonzero).implies(c);
}

Comparison compare(const ModelDef& m, const LiuResult& lr, const ConstraintSystem& cs) {
  Comparison r;
  r.liu = eliminate_multipliers(m, lr, cs.nonzero);
  std::vector<Expr> nonzero = r.liu.nonzero;
  for (const Expr& z : cs.nonzero) {
    if (!contains_expr(nonzero, z)) nonzero.push_back(z);
  }
  if (!r.liu.unresolved.empty()) {
    MultiplierEliminationIncomplete err(std::to_string(r.liu.unresolved.size()) +
                                        " identities still contain multipliers after linear elimination");
    r.errors.push_back(err.code() + ": " + err.what());
  }
  std::vector<Expr> liu;
  for (const Constraint& c : r.liu.physical) liu.push_back(c.expr);
  std::vector<Expr> ss = cs.constraint_exprs();
  Reducer by_ss(ss, nonzero), by_liu(liu, nonzero);
  for (const Expr& l : liu) (by_ss.implies(l) ? r.both : r.only_liu).push_back(l);
  for (const Expr& c : ss) {
    if (!by_liu.implies(c)) r.only_solution_set.push_back(c);
  }
  if (r.only_liu.empty() && r.only_solution_set.empty()) {
    r.verdict = Verdict::identical;
  } else if (r.only_solution_set.empty()) {
    r.verdict = Verdict::liu_over_restricts;
  } else {
    r.verdict = Verdict::incomparable;
  }
  return r;
}

}  // namespace entropik
