// SPDX-License-Identifier: Apache-2.0
#include <set>

#include "entropik/errors.hpp"
#include "entropik/mueller_liu.hpp"
#include "support.hpp"

using namespace entropik;
using testing::expr;
using testing::load;

namespace {

Atom multiplier(const LiuResult& lr, const std::string& name) {
  for (const auto& mu : lr.multipliers) {
    if (mu.symbol.str() == name) return mu.symbol;
  }
  FAIL("no multiplier " << name);
  return {};
}

std::vector<Expr> physical(const LiuElimination& e) {
  std::vector<Expr> out;
  for (const auto& c : e.physical) out.push_back(c.expr);
  return out;
}

}  // namespace

TEST_CASE("gas: extended inequality and its six identities") {
  ModelDef m = load("models/gas1d.epk");
  ExpandedModel ex = expand_model(m);
  std::vector<Multiplier> mult = make_multipliers(m);
  REQUIRE(mult.size() == 3);
  CHECK(mult[0].symbol.str() == "Lambda_rho");
  CHECK(mult[1].symbol.str() == "Lambda_u");
  CHECK(mult[2].symbol.str() == "Lambda_eps");
  CHECK(mult[0].dependency == m.dependency_atoms());

  Expr e = liu_extended(m, ex, mult);
  Expr by_hand = ex.entropy;
  for (std::size_t i = 0; i < 3; ++i) by_hand -= Expr(mult[i].symbol) * ex.equations[i];
  CHECK(e == by_hand);
  SubstitutionMap zero;
  for (const auto& mu : mult) zero.set(mu.symbol, Expr());
  CHECK(substitute(e, zero) == ex.entropy);

  LiuResult lr = liu_split(e, m);
  CHECK(lr.identities.size() == 6);
  std::set<std::string> split;
  for (const Atom& a : lr.split_set) split.insert(a.str());
  CHECK(split == std::set<std::string>{"rho_t", "rho_x", "u_t", "u_x", "eps_t", "eps_x"});
  for (const auto& id : lr.identities) {
    for (const Atom& a : lr.split_set) CHECK_FALSE(id.expr.contains(a));
  }
  CHECK(lr.residual.is_zero());
  // Coefficient of rho_x, written out by hand.
  bool found = false;
  for (const auto& id : lr.identities) {
    if (to_string(id.atom) != "rho_x") continue;
    found = true;
    Expr lr_rho(mult[0].symbol), lr_u(mult[1].symbol), lr_eps(mult[2].symbol);
    CHECK(id.expr == expr(m, "u") * (expr(m, "rho*deta/drho") - lr_rho) - lr_u * expr(m, "dp/drho") -
                         lr_eps * expr(m, "dq1/drho") + expr(m, "dPhi1/drho"));
  }
  CHECK(found);
}

TEST_CASE("gas: multipliers and identities after elimination") {
  ModelDef m = load("models/gas1d.epk");
  LiuResult lr = run_mueller_liu(m);
  LiuElimination el = eliminate_multipliers(m, lr);
  CHECK(el.unsolved.empty());
  CHECK(el.unresolved.empty());
  REQUIRE(el.value(multiplier(lr, "Lambda_u")) != nullptr);
  CHECK(el.value(multiplier(lr, "Lambda_u"))->is_zero());
  CHECK(*el.value(multiplier(lr, "Lambda_rho")) == expr(m, "rho*deta/drho"));
  CHECK(*el.value(multiplier(lr, "Lambda_eps")) == expr(m, "deta/deps"));
  std::vector<Expr> want = {expr(m, "rho^2*deta/drho + p*deta/deps"), expr(m, "dPhi1/drho - deta/deps*dq1/drho"),
                            expr(m, "dPhi1/deps - deta/deps*dq1/deps")};
  CHECK(testing::same_relations(physical(el), want));
  CHECK(el.separations.empty());
}

TEST_CASE("gas: with the solved multipliers the extended inequality differs from the entropy by the equations") {
  ModelDef m = load("models/gas1d.epk");
  ExpandedModel ex = expand_model(m);
  LiuResult lr = run_mueller_liu(m);
  LiuElimination el = eliminate_multipliers(m, lr);
  SubstitutionMap values;
  for (const auto& s : el.solved) values.set(s.symbol, s.value);
  Expr ext = substitute(lr.extended, values);
  Expr span;
  for (const auto& mu : lr.multipliers) span += *el.value(mu.symbol) * ex.equations[mu.equation];
  CHECK((ext - ex.entropy + span).is_zero());
  SolutionSetResult ss = run_solution_set(m);
  CHECK(substitute(ext, ss.solved.substitution) == ss.system.entropy);
}

TEST_CASE("gas and running example compare as identical") {
  for (const char* path : {"models/gas1d.epk", "models/fluid2d.epk"}) {
    CAPTURE(path);
    ModelDef m = load(path);
    SolutionSetResult ss = run_solution_set(m);
    Comparison c = compare(m, run_mueller_liu(m), ss.system);
    for (const auto& e : c.only_liu) MESSAGE("only Liu: " << to_string(e));
    for (const auto& e : c.only_solution_set) MESSAGE("only solution set: " << to_string(e));
    CHECK(c.verdict == Verdict::identical);
    CHECK(c.errors.empty());
    CHECK(c.both.size() == ss.system.constraints.size());
  }
}

TEST_CASE("running example: energy multiplier") {
  ModelDef m = load("models/fluid2d.epk");
  LiuResult lr = run_mueller_liu(m);
  LiuElimination el = eliminate_multipliers(m, lr);
  CHECK(*el.value(multiplier(lr, "Lambda_theta")) == expr(m, "deta/dtheta / (deps/dtheta)"));
}

TEST_CASE("non-simple fluid: linear extended inequality, over-restricting identities") {
  ModelDef m = load("models/nonsimple2d.epk");
  LiuResult lr;
  CHECK_NOTHROW(lr = run_mueller_liu(m));
  for (const Atom& a : lr.split_set) CHECK(a.str() != "rho_t");
  SolutionSetResult ss = run_solution_set(m);
  Comparison c = compare(m, lr, ss.system);
  CHECK(c.verdict == Verdict::liu_over_restricts);
  CHECK(c.only_solution_set.empty());
  std::vector<Expr> flux;
  for (const char* f : {"dq1/drho", "dq2/drho", "dq1/dtheta", "dq2/dtheta", "dPhi1/drho", "dPhi2/drho",
                        "dPhi1/dtheta", "dPhi2/dtheta"}) {
    flux.push_back(expr(m, f));
  }
  CHECK(testing::same_relations(c.only_liu, flux));
  CHECK_FALSE(c.liu.separations.empty());
}

TEST_CASE("a quadratic derivative in the entropy inequality is reported") {
  ModelDef m = ModelBuilder()
                   .independent({"t", "x"})
                   .field({"rho", "u", "eps"})
                   .constitutive("p(rho, eps)")
                   .constitutive("q1(rho, eps)")
                   .constitutive("eta(rho, eps)")
                   .constitutive("Phi1(rho, eps)")
                   .equation("mass", "dt(rho) + dx(rho*u)", "0")
                   .equation("momentum", "rho*(dt(u) + u*dx(u)) + dx(p)", "0")
                   .equation("energy", "rho*(dt(eps) + u*dx(eps)) + dx(q1) + p*dx(u)", "0")
                   .entropy("rho*(dt(eta) + u*dx(eta)) + dx(Phi1) + dx(u)*dx(u)")
                   .leading({"dt(rho)", "dt(u)", "dt(eps)"})
                   .build();
  CHECK_THROWS_AS(run_mueller_liu(m), NonlinearExtendedInequality);
}

TEST_CASE("multiplier dependency can be overridden") {
  ModelDef m = load("models/gas1d.epk");
  std::vector<Atom> dep = {m.jet("rho", {0, 0})};
  LiuResult lr = run_mueller_liu(m, dep);
  for (const auto& mu : lr.multipliers) CHECK(mu.dependency == dep);
}

TEST_CASE("implication by linear elimination") {
  ModelDef m = load("models/gas1d.epk");
  std::vector<Expr> nonzero = {expr(m, "rho")};
  std::vector<Expr> set = {expr(m, "dPhi1/drho - deta/deps*dq1/drho"), expr(m, "rho*dq1/drho")};
  CHECK(implied_by(expr(m, "dPhi1/drho"), set, nonzero));
  CHECK(implied_by(expr(m, "3*dq1/drho"), set, nonzero));
  CHECK_FALSE(implied_by(expr(m, "dq1/deps"), set, nonzero));
  CHECK(implied_by(expr(m, "deta/deps*dq1/deps - dPhi1/deps"),
                   {expr(m, "dPhi1/deps - deta/deps*dq1/deps")}, nonzero));
}
