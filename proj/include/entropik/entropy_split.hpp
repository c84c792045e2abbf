// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entropik/solution_set.hpp"

namespace entropik {

struct Constraint {
  Expr expr;                         // expr == 0, in dedup normal form
  std::vector<Monomial> monomials;   // free-element monomials whose coefficient it is
  std::vector<Expr> cancelled;       // nonzero factors divided out
  std::string symmetry;              // "T11: u_y ~ v_x" for symmetrization constraints
};

struct ConstraintSystem {
  std::vector<Constraint> constraints;
  Expr residual;                    // residual >= 0 on the solution set
  Poly residual_numerator;          // constant coefficient of the cleared entropy
  Poly denominator;                 // cleared denominator of the entropy on solutions
  std::vector<Expr> nonzero;        // pivots, denominator factors, user assumptions
  std::vector<Atom> free;           // free elements, canonical order
  std::vector<CollectedTerm> table; // raw monomial -> coefficient decomposition
  Expr entropy;                     // entropy on solutions, before splitting

  std::vector<Expr> constraint_exprs() const;
};

// Chain-expanded entropy with the (closed) solved form substituted.  s is
// extended with every consequence the entropy needs.
Expr entropy_on_solutions(const ModelDef& m, const ExpandedModel& ex, SolvedSystem& s);

// Free elements of a model given its solved form and the entropy on solutions.
std::vector<Atom> free_elements(const ModelDef& m, const ExpandedModel& ex, const SolvedSystem& s,
                                const Expr& entropy);

// Normal form used for deduplication: nonzero factors cancelled, canonical
// leading coefficient 1.  Factors removed are appended to `cancelled`.
Expr constraint_normal_form(const Expr& c, const std::vector<Expr>& nonzero, std::vector<Expr>* cancelled);

// Append c unless an equal normal form is already present.
void add_constraint(std::vector<Constraint>& out, Constraint c, const std::vector<Expr>& nonzero);

ConstraintSystem split(const ModelDef& m, const ExpandedModel& ex, const SolvedSystem& s, const Expr& entropy);

// One call for the whole solution-set pipeline.
struct SolutionSetResult {
  ExpandedModel expanded;
  SolvedSystem solved;
  ConstraintSystem system;
};
SolutionSetResult run_solution_set(const ModelDef& m);

// Exact check: cleared entropy numerator == sum(monomial * coefficient).
bool reconstruction_holds(const ConstraintSystem& cs);

struct OracleReport {
  int trials = 0;
  int identity_pass = 0;
  int variety_pass = 0;
  int variety_skipped = 0;  // draws that could not be projected onto the constraints
  int rejected = 0;         // draws discarded for violating a nonzero condition
  std::vector<std::string> failures;  // witness points of mismatches
  // Per constraint: whether a point violating only that constraint with
  // negative entropy production was found.
  std::vector<bool> necessity;
  bool ok() const { return failures.empty() && identity_pass == trials && variety_pass == trials; }
};

OracleReport numeric_oracle(const ModelDef& m, const ConstraintSystem& cs, int trials, std::uint64_t seed,
                            bool necessity = false);

}  // namespace entropik
