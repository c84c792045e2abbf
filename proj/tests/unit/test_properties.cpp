// SPDX-License-Identifier: Apache-2.0
#include "../common/properties.hpp"
#include "support.hpp"

using namespace entropik;
using testing::load;

namespace {

const char* const kModels[] = {"models/gas1d.epk", "models/fluid2d.epk", "models/nonsimple2d.epk",
                               "models/granular2d.epk"};

}  // namespace

TEST_CASE("total derivatives commute and obey the Leibniz rule on random expressions") {
  for (const char* path : kModels) {
    CAPTURE(path);
    ModelDef m = load(path);
    props::Tally t = props::derivative_properties(m, 1000, 20240611);
    CAPTURE(t.first_failure);
    CHECK(t.trials == 1000);
    CHECK(t.commutation_failures == 0);
    CHECK(t.leibniz_failures == 0);
  }
}

TEST_CASE("jet-coordinate partial derivatives commute on random expressions") {
  ModelDef m = load("models/fluid2d.epk");
  props::ExprGen gen(m, 99);
  Atom rho = m.jet("rho", {0, 0, 0});
  Atom theta_x = m.jet("theta", {0, 1, 0});
  for (int k = 0; k < 200; ++k) {
    Expr e = gen.next();
    CHECK(partial_diff(partial_diff(e, rho), theta_x) == partial_diff(partial_diff(e, theta_x), rho));
  }
}

TEST_CASE("the generator is not degenerate: a wrong product rule is caught") {
  ModelDef m = load("models/gas1d.epk");
  props::ExprGen gen(m, 5);
  JetContext ctx = m.context();
  int caught = 0;
  for (int k = 0; k < 50; ++k) {
    Expr a = gen.next(), b = gen.next();
    Expr wrong = total_derivative(a, 1, ctx) * total_derivative(b, 1, ctx);
    if (!equivalent(total_derivative(a * b, 1, ctx), wrong)) ++caught;
  }
  CHECK(caught > 40);
}

TEST_CASE("equal fractions may differ in canonical form but are equivalent") {
  ModelDef m = load("models/gas1d.epk");
  Expr common = testing::expr(m, "rho + eps");
  Expr a = testing::expr(m, "rho + 1");
  Expr b = testing::expr(m, "eps + 1");
  Expr reduced = a / b;
  Expr padded = Expr::fraction((common * a).num(), (common * b).num());
  CHECK(padded != reduced);
  CHECK(equivalent(padded, reduced));
  CHECK_FALSE(equivalent(padded, b / a));
}
