// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "entropik/entropy_split.hpp"

namespace entropik {

struct Multiplier {
  Atom symbol;                    // Lambda_<field>
  std::size_t equation = 0;       // equation it multiplies
  std::vector<Atom> dependency;   // postulated arguments
};

// One multiplier per equation, named after the field of the equation's
// leading derivative.  An empty dependency list means the model's
// constitutive dependency.
std::vector<Multiplier> make_multipliers(const ModelDef& m, const std::vector<Atom>& dependency = {});

struct LiuIdentity {
  Expr expr;        // expr == 0
  Monomial atom;    // splitting derivative whose coefficient it is
};

struct LiuResult {
  std::vector<Multiplier> multipliers;
  std::vector<LiuIdentity> identities;
  Expr residual;                  // residual >= 0
  std::vector<Atom> split_set;    // canonical order
  Expr extended;
};

// Chain-expanded entropy minus sum(multiplier * equation).
Expr liu_extended(const ModelDef& m, const ExpandedModel& ex, const std::vector<Multiplier>& mult);
Expr liu_extended(const ModelDef& m, const std::vector<Atom>& dependency = {});

// Coefficients of the derivatives that are not constitutive arguments.
// Independent variables and underived fields outside the dependency stay in
// the coefficients.  NonlinearExtendedInequality when e is not linear in the
// splitting set.
LiuResult liu_split(const Expr& e, const ModelDef& m, const std::vector<Atom>& dependency = {});
LiuResult run_mueller_liu(const ModelDef& m, const std::vector<Atom>& dependency = {});

struct SolvedMultiplier {
  Atom symbol;
  Expr value;
  Expr from;   // identity it was solved from
};

struct LiuElimination {
  std::vector<SolvedMultiplier> solved;
  std::vector<Atom> unsolved;
  std::vector<Constraint> physical;   // multiplier-free, dedup normal form
  std::vector<Expr> unresolved;       // identities still mentioning a multiplier
  std::vector<Expr> nonzero;
  Expr residual;                      // residual with the solved multipliers
  // "q1_rho: A + Lambda_theta*B split, Lambda_theta varies with rho_t"
  std::vector<std::string> separations;
  const Expr* value(const Atom& multiplier) const;
};

// Split identities in the state variables, solve linearly for the
// multipliers, and separate identities in which a solved multiplier enters
// alone while varying in an argument nothing else depends on.
LiuElimination eliminate_multipliers(const ModelDef& m, const LiuResult& lr, std::vector<Expr> nonzero = {});

enum class Verdict { identical, liu_over_restricts, incomparable };
std::string to_string(Verdict v);

struct Comparison {
  Verdict verdict = Verdict::incomparable;
  LiuElimination liu;
  std::vector<Expr> both;               // Liu identities equivalent to a solution-set constraint
  std::vector<Expr> only_liu;           // not implied by the solution-set constraints
  std::vector<Expr> only_solution_set;  // not implied by the Liu identities
  std::vector<std::string> errors;      // "MultiplierEliminationIncomplete: ..."
};

// True when c follows from `set` by linear single-symbol elimination with
// nonzero coefficients.
bool implied_by(const Expr& c, const std::vector<Expr>& set, const std::vector<Expr>& nonzero);

Comparison compare(const ModelDef& m, const LiuResult& lr, const ConstraintSystem& cs);

}  // namespace entropik
