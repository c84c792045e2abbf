// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "entropik/entropy_split.hpp"

namespace entropik {

struct Assumption {
  enum class Polarity { zero, nonzero };
  Expr expr;
  Polarity polarity = Polarity::zero;
};
std::string to_string(const Assumption& a);

struct CaseOptions {
  // Constitutive functions being classified; the remaining ones are unknowns
  // and are eliminated first.  Empty: the symbols with the fewest arguments
  // when they have strictly fewer than the rest, else those of the entropy
  // inequality.
  std::set<std::string> classify;
  bool force_residual_zero = false;  // add the residual numerator as a constraint
  std::vector<Assumption> assumptions;  // hold at the root
  int max_key_order = 6;   // compatibility conditions above this order are skipped
  int max_steps = 4000;    // eliminations per reduction before giving up
  int max_terms = 400;     // larger constraints are kept open unreduced
  int time_limit_ms = 3000;   // per reduction
  int tree_time_limit_ms = 60000;
};

std::set<std::string> default_classifying(const ModelDef& m);

// A constraint system after linear elimination.  Every eliminated
// constitutive symbol or partial has a value free of eliminated symbols and
// of their derivatives; `open` holds the constraints whose leading
// coefficient is not known to be nonzero.
struct ReducedSystem {
  SubstitutionMap solved;
  std::vector<Atom> solved_order;
  std::vector<Expr> open;
  std::vector<Expr> nonzero;
  bool inconsistent = false;
  std::string contradiction;   // "1 = 0", "deta/deps != 0 forced to 0", ...
  bool capped = false;          // step or order limit hit
  std::vector<std::string> certificates;

  // All relations as polynomials == 0: key*den - num for each elimination,
  // then the open constraints; canonical and monic.
  std::vector<Expr> relations() const;
  // Relation set rendered and sorted; equal for equal reduced systems.
  std::vector<std::string> fingerprint() const;
  const Expr* value(const Atom& a) const { return solved.find(a); }
};

ReducedSystem apply_assumptions(const ModelDef& m, const ConstraintSystem& cs,
                                const std::vector<Assumption>& assumptions, const CaseOptions& opt = {});

// e reduced by the eliminations of rs, cleared and normalized; zero when rs
// implies e.
Expr reduce_in(const ModelDef& m, const ReducedSystem& rs, const Expr& e, const CaseOptions& opt = {});

// Nondegenerate classification: when a recorded pivot is a first partial
// df/dx of a classifying function f, every classifying function with the
// argument x is assumed to vary with x as well.
std::vector<Assumption> nondegenerate_assumptions(const ModelDef& m, const ConstraintSystem& cs,
                                                  const CaseOptions& opt = {});

// Leading coefficient factors that block an elimination in a reduced
// system, each monic and not known to be nonzero, with occurrence counts.
struct PivotCandidate {
  Expr expr;
  int count = 0;
};
std::vector<PivotCandidate> blocking_factors(const ModelDef& m, const ReducedSystem& rs, const CaseOptions& opt = {});

// Constitutive partials occurring as factors in the constraint terms, recorded
// pivots, and blocking leading coefficients; ranked by occurrence count, ties
// in canonical order.
std::vector<PivotCandidate> pivot_candidates(const ModelDef& m, const ConstraintSystem& cs, const CaseOptions& opt = {});
std::vector<Expr> pivot_exprs(const std::vector<PivotCandidate>& c);

// split: inner node; open: unresolved (depth or step limit).
enum class CaseStatus { open, closed_inconsistent, leaf, split };
std::string to_string(CaseStatus s);

struct CaseNode {
  std::vector<Assumption> assumptions;   // path from the root, root assumptions first
  ReducedSystem system;
  std::vector<CaseNode> children;        // nonzero branch first
  CaseStatus status = CaseStatus::leaf;
  Expr pivot;                            // split pivot of an inner node
  std::vector<std::string> errors;       // "DepthCapExceeded: ..."
  bool is_inner() const { return !children.empty(); }
};

// Binary splitting: at each node the first listed pivot that blocks an
// elimination is assumed nonzero and zero.  Inconsistent children are kept as
// closed nodes; a pivot whose two branches reduce to the same system is
// skipped.  A node that would need a split below the depth cap is marked open
// and reports DepthCapExceeded.
CaseNode build_tree(const ModelDef& m, const ConstraintSystem& cs, const std::vector<Expr>& pivots, int depth_cap,
                    const CaseOptions& opt = {});

std::vector<const CaseNode*> leaves(const CaseNode& root);
std::vector<Expr> split_pivots(const CaseNode& root);  // pivots of inner nodes, first occurrence order

}  // namespace entropik
