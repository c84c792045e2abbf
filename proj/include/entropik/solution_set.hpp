// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "entropik/model.hpp"

namespace entropik {

// How a differential-consequence key was produced: the solved equation for
// `base` (a leading derivative, or an earlier consequence) differentiated
// once more in the direction `var`.
struct ConsequenceRecord {
  Atom key;
  std::size_t equation = 0;  // index of the model equation being prolonged
  Atom parent;               // key whose solved form was differentiated
  int var = -1;              // independent-variable index
  MultiIndex order;          // total prolongation of the equation (key - leading)
};

struct SolvedSystem {
  SubstitutionMap substitution;  // triangular: no RHS contains a key or a consequence
  std::vector<Atom> keys;        // insertion order: leading derivatives, then consequences
  std::vector<Expr> pivots;      // irreducible divisors of the solve, canonical and monic
  std::vector<ConsequenceRecord> consequences;

  const Expr& value(const Atom& key) const;
  bool is_key(const Atom& a) const { return substitution.contains(a); }
};

// Solve the expanded equations for the leading derivatives by fraction-free
// elimination over the polynomial ring.  Equations are taken in declaration
// order and unknowns in leading order.
SolvedSystem solve_leading(const ModelDef& m, const ExpandedModel& ex);
SolvedSystem solve_leading(const ModelDef& m);

// Extend s until neither target (after substitution) nor any RHS mentions a
// differential consequence of a leading derivative.
SolvedSystem close_consequences(const ModelDef& m, const ExpandedModel& ex, SolvedSystem s,
                                const Expr& target);

// Prolongation of an expanded equation by a multi-index.
Expr prolong(const Expr& equation, const MultiIndex& order, const JetContext& ctx);

struct VerifyItem {
  std::string what;  // "mass", "D_x mass", ...
  Expr residue;      // zero when satisfied
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  bool triangular = true;
  bool ok() const;
};

// Substitute s into every expanded equation and every generated consequence.
VerifyReport verify_solved(const ModelDef& m, const ExpandedModel& ex, const SolvedSystem& s);

// Split a polynomial into irreducible-looking factors: single atoms of the
// monomial content, plus the remaining primitive part when it is not constant.
std::vector<Poly> split_factors(const Poly& p);

}  // namespace entropik
