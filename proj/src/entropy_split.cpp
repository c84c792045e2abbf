// SPDX-License-Identifier: Apache-2.0
#include "entropik/entropy_split.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace entropik {

namespace {

void add_nonzero(std::vector<Expr>& out, const Poly& p) {
  for (Poly& f : split_factors(p)) {
    Expr e(std::move(f));
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(std::move(e));
  }
}

// Divide every power of f out of p; returns how many times it divided.
int strip_factor(Poly& p, const Poly& f) {
  int count = 0;
  while (!p.is_constant()) {
    if (f.is_monomial() && f.leading().mono.size() == 1) {
      const VarPow& vp = f.leading().mono[0];
      Monomial content = p.monomial_content();
      std::uint32_t e = mono_exponent(content, vp.var);
      if (e == 0) break;
      p = p.div_monomial(Monomial{VarPow{vp.var, e}});
      count += static_cast<int>(e);
      break;
    }
    auto q = divide_exact(p, f);
    if (!q) break;
    p = std::move(*q);
    ++count;
  }
  return count;
}

Atom partial_with_slot(const ConstitDecl& d, const JetContext& ctx, int slot) {
  MultiIndex slots(d.args.size(), 0);
  slots[static_cast<std::size_t>(slot)] = 1;
  return ctx.partial_atom(d.name, slots);
}

std::set<Atom, CanonicalLess> all_atoms(const ConstraintSystem& cs) {
  std::set<Atom, CanonicalLess> atoms = cs.entropy.atoms();
  for (const auto& t : cs.table) {
    for (const auto& a : Expr(t.coef).atoms()) atoms.insert(a);
    for (const auto& vp : t.mono) atoms.insert(Atom::from_id(vp.var));
  }
  for (const auto& c : cs.constraints) {
    for (const auto& a : c.expr.atoms()) atoms.insert(a);
  }
  for (const auto& a : cs.residual.atoms()) atoms.insert(a);
  for (const auto& z : cs.nonzero) {
    for (const auto& a : z.atoms()) atoms.insert(a);
  }
  return atoms;
}

mpq_class eval_monomial(const Monomial& mono, const Assignment& values) {
  mpq_class r = 1;
  for (const VarPow& vp : mono) {
    const mpq_class& v = values.at(Atom::from_id(vp.var));
    for (std::uint32_t k = 0; k < vp.exp; ++k) r *= v;
  }
  return r;
}

class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : rng_(seed) {}
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

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::uint64_t out = 0;
  std::uint32_t parts[2];
  seq.generate(parts, parts + 2);
  out = (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
  return out;
}

std::string describe(const Assignment& values, const std::set<Atom, CanonicalLess>& atoms) {
  std::ostringstream os;
  bool first = true;
  for (const Atom& a : atoms) {
    auto it = values.find(a);
    if (it == values.end()) continue;
    os << (first ? "" : ", ") << a.str() << "=" << it->second.get_str();
    first = false;
  }
  return os.str();
}

// Order the constraints and give each one an unknown-function atom in which
// it is linear and that no earlier constraint mentions, so the constraints
// can be solved one after the other at a sample point.
struct Projection {
  std::vector<std::size_t> order;
  std::vector<Atom> solve_for;
};

std::optional<Projection> plan_projection(const std::vector<Expr>& constraints) {
  Projection plan;
  std::vector<bool> done(constraints.size(), false);
  std::set<Atom, CanonicalLess> fixed;
  for (std::size_t step = 0; step < constraints.size(); ++step) {
    bool progressed = false;
    for (std::size_t k = 0; k < constraints.size() && !progressed; ++k) {
      if (done[k]) continue;
      const Poly& p = constraints[k].num();
      for (const Atom& a : constraints[k].atoms()) {
        if (!a.is_function() || fixed.count(a) || p.degree_in(a.id()) != 1) continue;
        if (constraints[k].den().contains_var(a.id())) continue;
        plan.order.push_back(k);
        plan.solve_for.push_back(a);
        done[k] = true;
        for (const Atom& b : constraints[k].atoms()) fixed.insert(b);
        progressed = true;
        break;
      }
    }
    if (!progressed) return std::nullopt;
  }
  return plan;
}

bool nonzero_holds(const std::vector<Expr>& nonzero, const Assignment& values) {
  for (const Expr& z : nonzero) {
    try {
      if (eval_numeric(z, values) == 0) return false;
    } catch (const DenominatorVanishes&) {
      return false;
    }
  }
  return true;
}

// Solve the planned constraints in order; false if a coefficient vanishes.
bool project(const std::vector<Expr>& constraints, const Projection& plan, Assignment& values) {
  for (std::size_t i = 0; i < plan.order.size(); ++i) {
    const Poly& p = constraints[plan.order[i]].num();
    const Atom& a = plan.solve_for[i];
    values[a] = 0;
    mpq_class beta = eval_numeric(p, values);
    mpq_class alpha = eval_numeric(p.coefficient(a.id(), 1), values);
    if (alpha == 0) return false;
    values[a] = -beta / alpha;
  }
  return true;
}

}  // namespace

std::vector<Expr> ConstraintSystem::constraint_exprs() const {
  std::vector<Expr> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) out.push_back(c.expr);
  return out;
}

Expr entropy_on_solutions(const ModelDef& m, const ExpandedModel& ex, SolvedSystem& s) {
  s = close_consequences(m, ex, std::move(s), ex.entropy);
  return substitute(ex.entropy, s.substitution);
}

std::vector<Atom> free_elements(const ModelDef& m, const ExpandedModel& ex, const SolvedSystem& s,
                                const Expr& entropy) {
  std::vector<Expr> exprs = ex.equations;
  exprs.push_back(ex.entropy);
  exprs.push_back(entropy);
  for (const auto& [k, v] : s.substitution.pairs) {
    exprs.push_back(Expr(k));
    exprs.push_back(v);
  }
  AtomClasses c = classify_atoms(m, exprs);
  return {c.free.begin(), c.free.end()};
}

Expr constraint_normal_form(const Expr& c, const std::vector<Expr>& nonzero, std::vector<Expr>* cancelled) {
  if (c.is_zero()) return c;
  Poly p = c.num();
  if (!c.den().is_constant() && cancelled != nullptr) cancelled->push_back(Expr(c.den()));
  for (const Expr& z : nonzero) {
    for (const Poly& f : split_factors(z.num())) {
      if (strip_factor(p, f) > 0 && cancelled != nullptr) {
        Expr fe(f);
        if (std::find(cancelled->begin(), cancelled->end(), fe) == cancelled->end()) cancelled->push_back(fe);
      }
    }
  }
  return Expr(make_monic(p));
}

void add_constraint(std::vector<Constraint>& out, Constraint c, const std::vector<Expr>& nonzero) {
  std::vector<Expr> cancelled;
  c.expr = constraint_normal_form(c.expr, nonzero, &cancelled);
  if (c.expr.is_zero()) return;
  for (auto& e : cancelled) {
    if (std::find(c.cancelled.begin(), c.cancelled.end(), e) == c.cancelled.end()) c.cancelled.push_back(e);
  }
  for (auto& existing : out) {
    if (existing.expr == c.expr) {
      for (auto& mono : c.monomials) existing.monomials.push_back(std::move(mono));
      for (auto& e : c.cancelled) {
        if (std::find(existing.cancelled.begin(), existing.cancelled.end(), e) == existing.cancelled.end()) {
          existing.cancelled.push_back(e);
        }
      }
      return;
    }
  }
  out.push_back(std::move(c));
}

ConstraintSystem split(const ModelDef& m, const ExpandedModel& ex, const SolvedSystem& s, const Expr& entropy) {
  ConstraintSystem cs;
  cs.entropy = entropy;
  cs.free = free_elements(m, ex, s, entropy);
  std::set<Atom> vars(cs.free.begin(), cs.free.end());
  for (const Atom& a : cs.free) {
    if (entropy.den().contains_var(a.id())) {
      throw NotPolynomialInFreeElements("the entropy on solutions has free element '" + a.str() +
                                        "' in its denominator " + to_string(entropy.den()));
    }
  }
  cs.denominator = entropy.den();
  for (const Expr& p : s.pivots) add_nonzero(cs.nonzero, p.num());
  add_nonzero(cs.nonzero, cs.denominator);
  for (const Expr& z : ex.nonzero) add_nonzero(cs.nonzero, z.num());

  cs.table = collect_coefficients(entropy.num(), vars);
  for (const auto& t : cs.table) {
    if (t.mono.empty()) {
      cs.residual_numerator = t.coef;
      continue;
    }
    add_constraint(cs.constraints, Constraint{Expr(t.coef), {t.mono}, {}, {}}, cs.nonzero);
  }
  JetContext ctx = m.context();
  for (const ConstitDecl& d : m.constit) {
    for (const auto& [a, b] : d.symmetric) {
      Expr sym = Expr(partial_with_slot(d, ctx, a)) - Expr(partial_with_slot(d, ctx, b));
      std::string tag = d.name + ": " + d.args[static_cast<std::size_t>(a)].str() + " ~ " +
                        d.args[static_cast<std::size_t>(b)].str();
      add_constraint(cs.constraints, Constraint{sym, {}, {}, tag}, cs.nonzero);
    }
  }
  cs.residual = Expr::fraction(cs.residual_numerator, cs.denominator);
  return cs;
}

SolutionSetResult run_solution_set(const ModelDef& m) {
  SolutionSetResult r;
  r.expanded = expand_model(m);
  r.solved = solve_leading(m, r.expanded);
  Expr eos = entropy_on_solutions(m, r.expanded, r.solved);
  r.system = split(m, r.expanded, r.solved, eos);
  return r;
}

bool reconstruction_holds(const ConstraintSystem& cs) {
  Poly sum;
  for (const auto& t : cs.table) sum += t.coef.times_monomial(t.mono);
  return sum == cs.entropy.num();
}

OracleReport numeric_oracle(const ModelDef& /*m*/, const ConstraintSystem& cs, int trials, std::uint64_t seed,
                            bool necessity) {
  OracleReport rep;
  rep.trials = trials;
  const std::set<Atom, CanonicalLess> atoms = all_atoms(cs);
  const std::vector<Expr> constraints = cs.constraint_exprs();
  const auto plan = plan_projection(constraints);
  const Poly& numer = cs.entropy.num();

  auto draw = [&](RationalSampler& rs, Assignment& values) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      values.clear();
      for (const Atom& a : atoms) values[a] = rs.draw();
      if (nonzero_holds(cs.nonzero, values)) return true;
      ++rep.rejected;
    }
    return false;
  };

  for (int trial = 0; trial < trials; ++trial) {
    RationalSampler rs(trial_seed(seed, trial));
    Assignment values;
    if (!draw(rs, values)) {
      rep.failures.push_back("trial " + std::to_string(trial) + ": no admissible sample point");
      continue;
    }
    mpq_class lhs = eval_numeric(numer, values);
    mpq_class rhs = 0;
    for (const auto& t : cs.table) rhs += eval_numeric(t.coef, values) * eval_monomial(t.mono, values);
    if (lhs == rhs) {
      ++rep.identity_pass;
    } else {
      rep.failures.push_back("trial " + std::to_string(trial) + ": reconstruction mismatch at " +
                             describe(values, atoms));
    }
    if (!plan) {
      ++rep.variety_skipped;
      continue;
    }
    // Project onto the constraint variety, redrawing when a pivot vanishes.
    bool projected = false;
    for (int attempt = 0; attempt < 100 && !projected; ++attempt) {
      if (attempt > 0 && !draw(rs, values)) break;
      projected = project(constraints, *plan, values) && nonzero_holds(cs.nonzero, values);
    }
    if (!projected) {
      ++rep.variety_skipped;
      continue;
    }
    bool zeros = std::all_of(constraints.begin(), constraints.end(),
                             [&](const Expr& c) { return eval_numeric(c, values) == 0; });
    mpq_class production = eval_numeric(cs.entropy, values);
    mpq_class residual = eval_numeric(cs.residual, values);
    if (zeros && production == residual) {
      ++rep.variety_pass;
    } else {
      rep.failures.push_back("trial " + std::to_string(trial) + ": on-variety entropy " + production.get_str() +
                             " differs from residual " + residual.get_str() + " at " + describe(values, atoms));
    }
  }

  if (necessity && plan) {
    RationalSampler rs(trial_seed(seed, -1));
    rep.necessity.assign(constraints.size(), false);
    for (std::size_t j = 0; j < constraints.size(); ++j) {
      const Constraint& cj = cs.constraints[j];
      if (cj.monomials.empty()) continue;
      // Project every constraint but j, then push the paired free element.
      Projection others;
      for (std::size_t i = 0; i < plan->order.size(); ++i) {
        if (plan->order[i] == j) continue;
        others.order.push_back(plan->order[i]);
        others.solve_for.push_back(plan->solve_for[i]);
      }
      for (int attempt = 0; attempt < 50 && !rep.necessity[j]; ++attempt) {
        Assignment values;
        if (!draw(rs, values) || !project(constraints, others, values)) continue;
        if (!nonzero_holds(cs.nonzero, values) || eval_numeric(constraints[j], values) == 0) continue;
        Atom z = Atom::from_id(cj.monomials.front().front().var);
        for (int scale : {1, -1, 10, -10, 1000, -1000, 100000, -100000}) {
          values[z] = scale;
          if (!nonzero_holds(cs.nonzero, values)) continue;
          if (eval_numeric(cs.entropy, values) < 0) {
            rep.necessity[j] = true;
            break;
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace entropik
