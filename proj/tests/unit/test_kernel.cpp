// SPDX-License-Identifier: Apache-2.0
#include <thread>

#include "doctest.h"
#include "entropik/expr.hpp"

using namespace entropik;

namespace {

const std::vector<std::string> kTX = {"t", "x"};

Atom jet(const char* f, int t = 0, int x = 0) { return Atom::jet(f, {t, x}, kTX); }

JetContext gas_context() {
  JetContext ctx;
  ctx.indep = kTX;
  for (const char* name : {"p", "q1", "eta", "Phi1"}) {
    ctx.constit[name] = ConstitSignature{{jet("rho"), jet("eps")}, {"rho", "eps"}};
  }
  return ctx;
}

}  // namespace

TEST_CASE("atoms are interned and canonically ordered") {
  CHECK(jet("rho", 1, 0) == jet("rho", 1, 0));
  CHECK(jet("rho", 1, 0).str() == "rho_t");
  CHECK(jet("rho", 1, 2).str() == "rho_txx");
  Atom t = Atom::indep("t");
  Atom p = Atom::constit("p");
  Atom dp = Atom::partial("p", {1, 0}, std::vector<std::string>{"rho", "eps"});
  CHECK(dp.str() == "dp/drho");
  CHECK(canonical_less(t, jet("rho")));
  CHECK(canonical_less(jet("u"), p));
  CHECK(canonical_less(p, dp));
  CHECK(canonical_less(jet("rho", 1, 0), jet("rho", 0, 1)));
  CHECK(Atom::partial("p", {0, 0}, std::vector<std::string>{"rho", "eps"}) == p);
}

TEST_CASE("interning is safe under concurrent registration") {
  std::vector<std::thread> threads;
  std::vector<std::vector<std::uint32_t>> ids(4);
  for (int k = 0; k < 4; ++k) {
    threads.emplace_back([k, &ids] {
      for (int i = 0; i < 200; ++i) ids[k].push_back(Atom::constit("c" + std::to_string(i)).id());
    });
  }
  for (auto& th : threads) th.join();
  for (int k = 1; k < 4; ++k) CHECK(ids[k] == ids[0]);
}

TEST_CASE("normalization") {
  Expr rho = jet("rho");
  Expr u = jet("u");
  CHECK((rho * u) * (Expr(1) / rho) == u);
  CHECK(rho * u + u * rho == Expr(2) * rho * u);
  Expr zero = rho.pow(2) - rho.pow(2);
  CHECK(zero.is_zero());
  CHECK(zero.den() == Poly(1));
  CHECK_THROWS_AS(Expr(1) / (rho - rho), DivisionByZeroExpr);
  // Denominator leading coefficient is normalized to one.
  Expr f = u / (Expr(2) * rho);
  CHECK(f.den() == Poly(jet("rho")));
  CHECK(f.num() == Poly(jet("u")).scaled(mpq_class(1, 2)));
  // Exact cancellation of a non-monomial denominator.
  Expr g = (rho.pow(2) - u.pow(2)) / (rho - u);
  CHECK(g == rho + u);
}

TEST_CASE("partial_diff") {
  Atom r = jet("rho");
  Expr rho = r;
  Expr u = jet("u");
  CHECK(partial_diff(rho.pow(2) * u, r) == Expr(2) * rho * u);
  CHECK(partial_diff(Expr(1) / rho, r) == -(Expr(1) / rho.pow(2)));
  Expr q1 = Atom::constit("q1");
  CHECK(partial_diff(q1 * Expr(jet("rho", 0, 1)), jet("rho", 0, 1)) == q1);
}

TEST_CASE("total_derivative") {
  JetContext ctx = gas_context();
  Expr rho = jet("rho");
  Expr u = jet("u");
  CHECK(total_derivative(rho * u, 1, ctx) == Expr(jet("rho", 0, 1)) * u + rho * Expr(jet("u", 0, 1)));
  Expr dq_rho = ctx.partial_atom("q1", {1, 0});
  Expr dq_eps = ctx.partial_atom("q1", {0, 1});
  CHECK(total_derivative(Expr(Atom::constit("q1")), 1, ctx) ==
        dq_rho * Expr(jet("rho", 0, 1)) + dq_eps * Expr(jet("eps", 0, 1)));
  CHECK(total_derivative(Expr(Atom::indep("t")), 0, ctx) == Expr(1));
  CHECK(total_derivative(Expr(Atom::indep("t")), 1, ctx).is_zero());
  CHECK_THROWS_AS(total_derivative(Expr(Atom::constit("zz")), 0, ctx), UnknownConstitSym);
}

TEST_CASE("total_derivative through a time-derivative argument") {
  JetContext ctx;
  ctx.indep = kTX;
  ctx.constit["eta"] = ConstitSignature{{jet("rho"), jet("rho", 1, 0), jet("theta")},
                                        {"rho", "rho_t", "theta"}};
  Expr d = total_derivative(Expr(Atom::constit("eta")), 0, ctx);
  Expr expected = Expr(ctx.partial_atom("eta", {1, 0, 0})) * Expr(jet("rho", 1, 0)) +
                  Expr(ctx.partial_atom("eta", {0, 1, 0})) * Expr(jet("rho", 2, 0)) +
                  Expr(ctx.partial_atom("eta", {0, 0, 1})) * Expr(jet("theta", 1, 0));
  CHECK(d == expected);
  CHECK(ctx.partial_atom("eta", {0, 1, 0}).str() == "deta/drho_t");
}

TEST_CASE("substitute") {
  Atom rt = jet("rho", 1, 0);
  Expr rho = jet("rho");
  Expr u = jet("u");
  Expr ux = jet("u", 0, 1);
  Expr rx = jet("rho", 0, 1);
  SubstitutionMap m;
  m.set(rt, -rho * ux - u * rx);
  CHECK(substitute(Expr(rt) + u, m) == u - rho * ux - u * rx);
  SubstitutionMap m2;
  m2.set(rt, -rho * ux);
  CHECK(substitute(Expr(rt).pow(2), m2) == rho.pow(2) * ux.pow(2));
  CHECK(substitute(Expr(rt) / rho, SubstitutionMap{}) == Expr(rt) / rho);
  CHECK(m.check_triangular());
  // Idempotent for triangular maps.
  Expr once = substitute(Expr(rt) * u + Expr(rt).pow(3), m);
  CHECK(substitute(once, m) == once);
}

TEST_CASE("collect_coefficients") {
  Expr a = Atom::constit("a");
  Expr b = Atom::constit("b");
  Expr c = Atom::constit("c");
  Atom rx = jet("rho", 0, 1);
  Atom ux = jet("u", 0, 1);
  Expr e = a * Expr(rx) + b * Expr(rx) * Expr(ux) + c;
  auto coll = collect_coefficients(e, {rx, ux});
  REQUIRE(coll.size() == 3);
  CHECK(coll[0].mono.empty());
  CHECK(Expr(coll[0].coef) == c);
  CHECK(Expr(coll[1].coef) == a);
  CHECK(Expr(coll[2].coef) == b);
  CHECK(collect_coefficients(Expr(0), {rx}).empty());
  CHECK_THROWS_AS(collect_coefficients(Expr(1) / Expr(rx), {rx}), NotPolynomialInVars);
}

TEST_CASE("eval_numeric") {
  Atom r = jet("rho");
  Atom u = jet("u");
  Assignment v{{r, 2}, {u, 3}};
  CHECK(eval_numeric(Expr(r).pow(2) * Expr(u), v) == 12);
  Assignment z{{r, 0}};
  CHECK_THROWS_AS(eval_numeric(Expr(1) / Expr(r), z), DenominatorVanishes);
}

TEST_CASE("chain_partial follows declared arguments") {
  JetContext ctx = gas_context();
  Atom r = jet("rho");
  Expr p = Atom::constit("p");
  Expr e = p * Expr(r);
  CHECK(chain_partial(e, r, ctx) == Expr(ctx.partial_atom("p", {1, 0})) * Expr(r) + p);
}

TEST_CASE("printing") {
  Expr rho = jet("rho");
  Expr u = jet("u");
  CHECK(to_string(rho.pow(2) * u - u) == "rho^2*u - u");
  CHECK(to_string(u / rho) == "u/rho");
  CHECK(to_latex(Expr(Atom::partial("Phi1", {0, 1}, std::vector<std::string>{"rho", "eps"}))) ==
        "\\frac{\\partial \\Phi_{1}}{\\partial \\varepsilon}");
}
