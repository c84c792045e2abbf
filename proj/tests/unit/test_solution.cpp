// SPDX-License-Identifier: Apache-2.0
#include <set>

#include "entropik/entropy_split.hpp"
#include "entropik/errors.hpp"
#include "support.hpp"

using namespace entropik;
using testing::expr;
using testing::load;

namespace {

const char* const kModels[] = {"models/gas1d.epk", "models/fluid2d.epk", "models/nonsimple2d.epk",
                               "models/granular2d.epk"};

std::set<std::string> key_names(const std::vector<Atom>& keys) {
  std::set<std::string> out;
  for (const Atom& k : keys) out.insert(k.str());
  return out;
}

std::set<std::string> consequence_names(const SolvedSystem& s) {
  std::set<std::string> out;
  for (const auto& c : s.consequences) out.insert(c.key.str());
  return out;
}

}  // namespace

TEST_CASE("gas dynamics solved form") {
  ModelDef m = load("models/gas1d.epk");
  SolvedSystem s = solve_leading(m);
  // Hand-solved: mass, momentum and energy balance divided by rho.
  CHECK(s.value(m.jet("rho", {1, 0})) == expr(m, "-(rho_x*u + rho*u_x)"));
  CHECK(s.value(m.jet("u", {1, 0})) == expr(m, "-u*u_x - (dp/drho*rho_x + dp/deps*eps_x)/rho"));
  CHECK(s.value(m.jet("eps", {1, 0})) ==
        expr(m, "-u*eps_x - (dq1/drho*rho_x + dq1/deps*eps_x + p*u_x)/rho"));
  REQUIRE(s.pivots.size() == 1);
  CHECK(s.pivots[0] == expr(m, "rho"));
  CHECK(s.consequences.empty());
}

TEST_CASE("gas dynamics constraints and residual") {
  ModelDef m = load("models/gas1d.epk");
  SolutionSetResult r = run_solution_set(m);
  // Coefficients of u_x, rho_x and eps_x after substituting the solved form.
  std::vector<Expr> want = {expr(m, "rho^2*deta/drho + p*deta/deps"), expr(m, "dPhi1/drho - deta/deps*dq1/drho"),
                            expr(m, "dPhi1/deps - deta/deps*dq1/deps")};
  CHECK(testing::same_relations(r.system.constraint_exprs(), want));
  CHECK(r.system.residual.is_zero());
  std::set<std::string> free;
  for (const Atom& a : r.system.free) free.insert(a.str());
  CHECK(free == std::set<std::string>{"t", "x", "u", "rho_x", "u_x", "eps_x"});
}

TEST_CASE("running example: eight constraints and the residual inequality") {
  ModelDef m = load("models/fluid2d.epk");
  SolutionSetResult r = run_solution_set(m);
  const std::string iso = "rho^2*(deps/drho*deta/dtheta - deps/dtheta*deta/drho)";
  std::vector<Expr> want = {
      expr(m, "deps/dtheta*dPhi1/drho - deta/dtheta*dq1/drho"),
      expr(m, "deps/dtheta*dPhi2/drho - deta/dtheta*dq2/drho"),
      expr(m, iso + " + deta/dtheta*T11"),
      expr(m, iso + " + deta/dtheta*T22"),
      expr(m, "deta/dtheta*T12"),
      expr(m, "deps/dtheta*(2*dPhi1/dtheta_x) - deta/dtheta*(2*dq1/dtheta_x)"),
      expr(m, "deps/dtheta*(2*dPhi2/dtheta_y) - deta/dtheta*(2*dq2/dtheta_y)"),
      expr(m, "deps/dtheta*(dPhi1/dtheta_y + dPhi2/dtheta_x) - deta/dtheta*(dq1/dtheta_y + dq2/dtheta_x)"),
  };
  CHECK(testing::same_relations(r.system.constraint_exprs(), want));
  Expr residual = expr(m,
                       "(theta_x*(deps/dtheta*dPhi1/dtheta - deta/dtheta*dq1/dtheta) + "
                       "theta_y*(deps/dtheta*dPhi2/dtheta - deta/dtheta*dq2/dtheta)) / deps/dtheta");
  CHECK(r.system.residual == residual);
  CHECK(std::find(r.system.nonzero.begin(), r.system.nonzero.end(), expr(m, "deps/dtheta")) !=
        r.system.nonzero.end());
  CHECK(r.system.free.size() == 23);
}

TEST_CASE("non-simple fluid closes over the time derivative of the density") {
  ModelDef m = load("models/nonsimple2d.epk");
  SolutionSetResult r = run_solution_set(m);
  CHECK(consequence_names(r.solved) == std::set<std::string>{"rho_tx", "rho_ty", "rho_tt", "u_tx", "v_ty"});
  CHECK(r.system.residual.is_zero());
  std::vector<Expr> cs = r.system.constraint_exprs();
  for (const char* rel : {"deps/dtheta*deta/drho_t - deta/dtheta*deps/drho_t", "deta/dtheta*T12",
                          "rho^2*(deps/drho*deta/dtheta - deps/dtheta*deta/drho) + deta/dtheta*T11",
                          "rho^2*(deps/drho*deta/dtheta - deps/dtheta*deta/drho) + deta/dtheta*T22",
                          "deps/dtheta*dPhi1/drho - deta/dtheta*dq1/drho",
                          "deps/dtheta*dPhi2/drho - deta/dtheta*dq2/drho",
                          "deps/dtheta*dPhi1/dtheta - deta/dtheta*dq1/dtheta",
                          "deps/dtheta*dPhi2/dtheta - deta/dtheta*dq2/dtheta"}) {
    CAPTURE(rel);
    CHECK(testing::contains_up_to_scale(cs, expr(m, rel)));
  }
}

TEST_CASE("granular solid: momentum consequences, symmetrization, nonzero residual") {
  ModelDef m = load("models/granular2d.epk");
  SolutionSetResult r = run_solution_set(m);
  std::set<std::string> cons = consequence_names(r.solved);
  for (const char* k : {"u_tx", "u_ty", "v_tx", "v_ty"}) CHECK(cons.count(k) == 1);
  std::set<std::string> tagged;
  for (const auto& c : r.system.constraints) {
    if (!c.symmetry.empty()) tagged.insert(c.symmetry.substr(0, c.symmetry.find(':')));
  }
  for (const auto& d : m.constit) {
    if (!d.symmetric.empty()) CHECK(tagged.count(d.name) == 1);
  }
  CHECK(reconstruction_holds(r.system));
  CHECK_FALSE(r.system.residual.is_zero());
}

TEST_CASE("solved forms are triangular and satisfy every equation and consequence") {
  for (const char* path : kModels) {
    CAPTURE(path);
    ModelDef m = load(path);
    SolutionSetResult r = run_solution_set(m);
    CHECK(r.solved.substitution.check_triangular());
    VerifyReport v = verify_solved(m, r.expanded, r.solved);
    CHECK(v.triangular);
    for (const auto& item : v.items) {
      CAPTURE(item.what);
      CHECK(item.residue.is_zero());
    }
    CHECK(v.items.size() == m.equations.size() + r.solved.consequences.size());
    CHECK(reconstruction_holds(r.system));
  }
}

TEST_CASE("a corrupted solved form is caught") {
  ModelDef m = load("models/gas1d.epk");
  ExpandedModel ex = expand_model(m);
  SolvedSystem s = solve_leading(m, ex);
  Atom rho_t = m.jet("rho", {1, 0});
  s.substitution.set(rho_t, s.value(rho_t) + expr(m, "rho_x"));
  CHECK_FALSE(verify_solved(m, ex, s).ok());
}

TEST_CASE("singular and nonlinear leading systems") {
  ModelDef singular = ModelBuilder()
                          .independent({"t", "x"})
                          .field({"u", "v"})
                          .constitutive("eta(u, v)")
                          .equation("a", "dt(u) + dt(v)", "0")
                          .equation("b", "2*dt(u) + 2*dt(v) + dx(u)", "0")
                          .entropy("dt(eta)")
                          .leading({"dt(u)", "dt(v)"})
                          .build();
  CHECK_THROWS_AS(solve_leading(singular), SingularSystem);
  ModelDef nonlinear = ModelBuilder()
                           .independent({"t", "x"})
                           .field({"u"})
                           .constitutive("eta(u)")
                           .equation("a", "dt(u)*dt(u) + dx(u)", "0")
                           .entropy("dt(eta)")
                           .leading({"dt(u)"})
                           .build();
  CHECK_THROWS_AS(solve_leading(nonlinear), NonlinearInLeading);
}

TEST_CASE("every division of the solve is recorded as a nonzero condition") {
  for (const char* path : kModels) {
    CAPTURE(path);
    ModelDef m = load(path);
    SolutionSetResult r = run_solution_set(m);
    for (const Expr& p : r.solved.pivots) CHECK(std::find(r.system.nonzero.begin(), r.system.nonzero.end(), p) != r.system.nonzero.end());
    // Each denominator occurring in the solved form is a product of pivots.
    for (const auto& [k, v] : r.solved.substitution.pairs) {
      for (const Poly& f : split_factors(v.den())) {
        CAPTURE(k.str());
        CHECK(std::find(r.solved.pivots.begin(), r.solved.pivots.end(), Expr(f)) != r.solved.pivots.end());
      }
    }
  }
}

TEST_CASE("numeric oracle on the gas and running-example models") {
  for (const char* path : {"models/gas1d.epk", "models/fluid2d.epk"}) {
    CAPTURE(path);
    ModelDef m = load(path);
    SolutionSetResult r = run_solution_set(m);
    OracleReport o = numeric_oracle(m, r.system, 200, 7);
    for (const auto& f : o.failures) MESSAGE(f);
    CHECK(o.trials == 200);
    CHECK(o.identity_pass == 200);
    CHECK(o.variety_pass == 200);
    CHECK(o.ok());
  }
}

TEST_CASE("each gas constraint is necessary") {
  ModelDef m = load("models/gas1d.epk");
  SolutionSetResult r = run_solution_set(m);
  OracleReport o = numeric_oracle(m, r.system, 20, 11, true);
  REQUIRE(o.necessity.size() == r.system.constraints.size());
  for (bool b : o.necessity) CHECK(b);
}

TEST_CASE("constraint normal form") {
  ModelDef m = load("models/gas1d.epk");
  std::vector<Expr> nonzero = {expr(m, "rho")};
  std::vector<Expr> cancelled;
  Expr nf = constraint_normal_form(expr(m, "-3*rho^2*(dPhi1/drho - deta/deps*dq1/drho)"), nonzero, &cancelled);
  CHECK(testing::same_up_to_scale(nf, expr(m, "dPhi1/drho - deta/deps*dq1/drho")));
  CHECK(nf == constraint_normal_form(nf, nonzero, nullptr));
  REQUIRE(cancelled.size() == 1);
  CHECK(cancelled[0] == expr(m, "rho"));
  std::vector<Constraint> out;
  add_constraint(out, Constraint{expr(m, "2*deta/deps"), {}, {}, {}}, nonzero);
  add_constraint(out, Constraint{expr(m, "-rho*deta/deps"), {}, {}, {}}, nonzero);
  CHECK(out.size() == 1);
}
