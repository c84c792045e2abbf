// SPDX-License-Identifier: Apache-2.0
#include <set>

#include "entropik/case_analysis.hpp"
#include "support.hpp"

using namespace entropik;
using testing::expr;
using testing::load;

namespace {

using Polarity = Assumption::Polarity;

Assumption zero(const Expr& e) { return {e, Polarity::zero}; }
Assumption nonzero(const Expr& e) { return {e, Polarity::nonzero}; }

bool solved_to_zero(const ReducedSystem& rs, const Expr& atom_expr) {
  for (const Atom& a : atom_expr.atoms()) {
    const Expr* v = rs.value(a);
    return v != nullptr && v->is_zero();
  }
  return false;
}

bool same_pivot_set(const std::vector<Expr>& got, const std::vector<Expr>& want) {
  if (got.size() != want.size()) return false;
  for (const Expr& w : want) {
    if (!testing::contains_up_to_scale(got, w)) return false;
  }
  return true;
}

// Every pair of leaves disagrees on the polarity of some assumption.
bool leaves_disjoint(const CaseNode& root) {
  std::vector<const CaseNode*> ls = leaves(root);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    for (std::size_t j = i + 1; j < ls.size(); ++j) {
      bool exclusive = false;
      for (const auto& a : ls[i]->assumptions) {
        for (const auto& b : ls[j]->assumptions) {
          if (a.expr == b.expr && a.polarity != b.polarity) exclusive = true;
        }
      }
      if (!exclusive) return false;
    }
  }
  return true;
}

struct Adiabatic {
  ModelDef m;
  ConstraintSystem cs;
  CaseOptions opt;
};

Adiabatic fluid(bool adiabatic) {
  Adiabatic a{load("models/fluid2d.epk"), {}, {}};
  a.cs = run_solution_set(a.m).system;
  a.opt.force_residual_zero = adiabatic;
  a.opt.assumptions = nondegenerate_assumptions(a.m, a.cs, a.opt);
  return a;
}

}  // namespace

TEST_CASE("gas: pivot candidates") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  std::vector<Expr> c = pivot_exprs(pivot_candidates(m, cs));
  REQUIRE(c.size() >= 3);
  CHECK(c[0] == expr(m, "deta/deps"));
  CHECK(c[1] == expr(m, "dPhi1/deps"));
  CHECK(c[2] == expr(m, "dPhi1/drho"));
}

TEST_CASE("constraints without constitutive partial factors have no candidates") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs;
  cs.constraints.push_back({expr(m, "p - rho^2"), {}, {}, {}});
  cs.nonzero.push_back(expr(m, "rho"));
  CHECK(pivot_candidates(m, cs).empty());
}

TEST_CASE("gas: zero entropy-density derivative in the energy makes entropy and flux constant") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  ReducedSystem rs = apply_assumptions(m, cs, {zero(expr(m, "deta/deps"))});
  CHECK_FALSE(rs.inconsistent);
  for (const char* a : {"deta/deps", "deta/drho", "dPhi1/deps", "dPhi1/drho"}) {
    CAPTURE(a);
    CHECK(solved_to_zero(rs, expr(m, a)));
  }
  // rho^2*deta/drho = 0 needed rho != 0.
  bool cancelled_rho = false;
  for (const auto& c : rs.certificates) {
    if (c.find("cancelling rho") != std::string::npos && c.find("deta/drho = 0") != std::string::npos) {
      cancelled_rho = true;
    }
  }
  CHECK(cancelled_rho);
  // Pressure and heat flux are left free.
  for (const char* a : {"p", "dq1/drho", "dq1/deps"}) CHECK(rs.value(*expr(m, a).atoms().begin()) == nullptr);
  CHECK(rs.open.empty());
}

TEST_CASE("gas: a flux independent of the energy forces the heat flux to be independent of it") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  ReducedSystem rs = apply_assumptions(m, cs, {zero(expr(m, "dPhi1/deps")), nonzero(expr(m, "deta/deps"))});
  CHECK_FALSE(rs.inconsistent);
  CHECK(solved_to_zero(rs, expr(m, "dq1/deps")));
  // The same assumptions without the nonzero one leave dq1/deps undetermined.
  ReducedSystem weaker = apply_assumptions(m, cs, {zero(expr(m, "dPhi1/deps"))});
  CHECK_FALSE(solved_to_zero(weaker, expr(m, "dq1/deps")));
}

TEST_CASE("contradictory assumptions are inconsistent") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  Expr x = expr(m, "dPhi1/drho");
  ReducedSystem rs = apply_assumptions(m, cs, {zero(x), nonzero(x)});
  CHECK(rs.inconsistent);
  CHECK(rs.contradiction.find("dPhi1/drho") != std::string::npos);
  CaseOptions opt;
  opt.assumptions = {zero(x), nonzero(x)};
  CaseNode root = build_tree(m, cs, pivot_exprs(pivot_candidates(m, cs)), 3, opt);
  CHECK(root.status == CaseStatus::closed_inconsistent);
  CHECK(root.children.empty());
  CHECK(leaves(root).empty());
}

TEST_CASE("gas: four cases on three pivots") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  Expr p1 = expr(m, "deta/deps"), p2 = expr(m, "dPhi1/deps"), p3 = expr(m, "dPhi1/drho");
  CaseNode root = build_tree(m, cs, pivot_exprs(pivot_candidates(m, cs)), 3);
  CHECK(leaves(root).size() == 4);
  CHECK(same_pivot_set(split_pivots(root), {p1, p2, p3}));
  CHECK(leaves_disjoint(root));
  // Branch structure: p1 at the root, p2 below p1 != 0, p3 below p2 = 0.
  REQUIRE(root.status == CaseStatus::split);
  CHECK(root.pivot == p1);
  REQUIRE(root.children.size() == 2);
  const CaseNode& general = root.children[0];
  const CaseNode& case4 = root.children[1];
  CHECK(case4.status == CaseStatus::leaf);
  REQUIRE(general.status == CaseStatus::split);
  CHECK(general.pivot == p2);
  CHECK(general.children[0].status == CaseStatus::leaf);
  REQUIRE(general.children[1].status == CaseStatus::split);
  CHECK(general.children[1].pivot == p3);
  // Case 1 (all pivots nonzero): the integrability condition of q1.
  CHECK(reduce_in(m, general.children[0].system,
                  expr(m, "dPhi1/deps*deta/drho/deps - dPhi1/drho*deta/deps/deps"))
            .is_zero());
  // Case 2: eta linear in the energy.
  CHECK(solved_to_zero(general.children[1].children[0].system, expr(m, "deta/deps/deps")));
  // Case 4: constant entropy density and flux.
  for (const char* a : {"deta/drho", "dPhi1/deps", "dPhi1/drho"}) CHECK(solved_to_zero(case4.system, expr(m, a)));
}

TEST_CASE("every leaf implies the constraints it started from") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  CaseNode root = build_tree(m, cs, pivot_exprs(pivot_candidates(m, cs)), 3);
  for (const CaseNode* leaf : leaves(root)) {
    for (const Expr& c : cs.constraint_exprs()) {
      Expr r = reduce_in(m, leaf->system, c);
      CHECK((r.is_zero() || std::find(leaf->system.open.begin(), leaf->system.open.end(), r) !=
                                leaf->system.open.end()));
    }
    for (const Assumption& a : leaf->assumptions) {
      if (a.polarity == Polarity::zero) CHECK(reduce_in(m, leaf->system, a.expr).is_zero());
    }
  }
}

TEST_CASE("an empty pivot list gives the reduced input as the only leaf") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  CaseNode root = build_tree(m, cs, {}, 3);
  CHECK(root.status == CaseStatus::leaf);
  CHECK(root.children.empty());
  CHECK(root.system.fingerprint() == apply_assumptions(m, cs, {}).fingerprint());
  CHECK(testing::same_relations(root.system.open, cs.constraint_exprs()));
}

TEST_CASE("a depth cap below the tree depth is reported per branch") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  CaseNode root = build_tree(m, cs, pivot_exprs(pivot_candidates(m, cs)), 1);
  REQUIRE(root.children.size() == 2);
  CHECK(root.children[0].status == CaseStatus::open);
  REQUIRE(root.children[0].errors.size() == 1);
  CHECK(root.children[0].errors[0].rfind("DepthCapExceeded", 0) == 0);
  CHECK(root.children[1].status == CaseStatus::leaf);
  CHECK(root.children[1].errors.empty());
}

TEST_CASE("a zero assumption never adds open constraints on the gas model") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  ReducedSystem base = apply_assumptions(m, cs, {});
  for (const Expr& p : pivot_exprs(pivot_candidates(m, cs))) {
    CAPTURE(to_string(p));
    ReducedSystem z = apply_assumptions(m, cs, {zero(p)});
    CHECK(z.open.size() <= base.open.size());
  }
}

TEST_CASE("running example: nondegenerate classification and two cases") {
  Adiabatic a = fluid(false);
  REQUIRE(a.opt.assumptions.size() == 1);
  CHECK(a.opt.assumptions[0].expr == expr(a.m, "deta/dtheta"));
  CHECK(default_classifying(a.m) == std::set<std::string>{"eps", "eta"});
  CaseNode root = build_tree(a.m, a.cs, pivot_exprs(pivot_candidates(a.m, a.cs, a.opt)), 4, a.opt);
  CHECK(leaves(root).size() == 2);
  Expr p1 = expr(a.m, "deps/dtheta*deta/drho/dtheta - deta/dtheta*deps/drho/dtheta");
  CHECK(same_pivot_set(split_pivots(root), {p1}));
}

TEST_CASE("adiabatic running example: four cases on two pivots") {
  Adiabatic a = fluid(true);
  std::vector<Expr> candidates = pivot_exprs(pivot_candidates(a.m, a.cs, a.opt));
  Expr p1 = expr(a.m, "deps/dtheta*deta/drho/dtheta - deta/dtheta*deps/drho/dtheta");
  Expr p2 = expr(a.m, "deps/dtheta*deta/dtheta/dtheta - deta/dtheta*deps/dtheta/dtheta");
  CHECK(testing::contains_up_to_scale(candidates, p1));
  CHECK(testing::contains_up_to_scale(candidates, p2));
  CaseNode root = build_tree(a.m, a.cs, candidates, 4, a.opt);
  CHECK(leaves(root).size() == 4);
  CHECK(same_pivot_set(split_pivots(root), {p1, p2}));
  CHECK(leaves_disjoint(root));
  for (const CaseNode* leaf : leaves(root)) {
    CHECK(leaf->status == CaseStatus::leaf);
    // The residual vanishes in every case.
    CHECK(reduce_in(a.m, leaf->system, Expr(a.cs.residual_numerator), a.opt).is_zero());
  }
}
