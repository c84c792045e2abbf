// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <sstream>

#include "entropik/bindings.hpp"
#include "support.hpp"

using namespace entropik;
using testing::load;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Bindings bindings(const ModelDef& m, const std::string& text) {
  BindingsResult r = parse_bindings(text, m);
  for (const auto& d : r.diagnostics) MESSAGE(format_diagnostic(d));
  REQUIRE(r.ok());
  return *r.bindings;
}

// Expression in the scope of some bindings (parameters, auxiliary functions).
Expr bexpr(const ModelDef& m, const Bindings& b, const std::string& text) {
  ExpressionScope scope;
  scope.extra_functions = b.functions;
  for (const auto& p : b.parameters) scope.extra_functions[p] = {};
  ExpressionResult r = parse_expression(text, m, scope);
  REQUIRE(r.node.has_value());
  return ast::evaluate(*r.node, b.context(m));
}

std::string first_code(const BindingsResult& r) {
  for (const auto& d : r.diagnostics) MESSAGE(format_diagnostic(d));
  return r.diagnostics.empty() ? std::string("<none>") : r.diagnostics.front().code;
}

const std::string kAdmissible = R"(
function F(rho)
parameter C0
parameter C1
parameter C2
free eta, Phi1, Phi2
bind eps = F(rho) + C0*eta
bind q1 = C0*Phi1 + C1
bind q2 = C0*Phi2 + C2
bind T11 = -rho^2*dF/drho
bind T22 = -rho^2*dF/drho
)";

}  // namespace

TEST_CASE("statements of a bindings file") {
  ModelDef m = load("models/gas1d.epk");
  Bindings b = bindings(m, R"(# comment
parameter gamma = 1.4   # trailing comment
parameter Cv
function G(rho)
free Phi1
bind p = (gamma - 1)*rho*eps + G(rho)
bind deta/deps = Cv/eps
)");
  CHECK(b.parameters == std::vector<std::string>{"gamma", "Cv"});
  REQUIRE(b.values.count("gamma") == 1);
  CHECK(b.values.at("gamma") == mpq_class(7, 5));
  CHECK(b.functions.at("G") == std::vector<Atom>{m.jet("rho", {0, 0})});
  CHECK(b.free == std::set<std::string>{"Phi1"});
  REQUIRE(b.bindings.size() == 2);
  CHECK(b.bindings[0].target == Atom::constit("p"));
  CHECK(b.bindings[1].target == m.context().partial_atom("eta", {0, 1}));
  CHECK(b.bindings[1].line == 7);
}

TEST_CASE("bindings are differentiated along the declared arguments") {
  ModelDef m = load("models/gas1d.epk");
  Bindings b = bindings(m, "parameter Cv\nfunction G(rho)\nbind p = rho^2*eps + G(rho)\nbind deta/deps = Cv/eps\n");
  JetContext ctx = b.context(m);
  auto value = [&](const std::string& text) { return apply_bindings(testing::expr(m, text), m, b); };
  CHECK(value("dp/drho") == bexpr(m, b, "2*rho*eps + dG/drho"));
  CHECK(value("dp/drho/deps") == bexpr(m, b, "2*rho"));
  CHECK(value("dp/deps/deps") == Expr(0));
  CHECK(value("deta/deps/deps") == bexpr(m, b, "-Cv/eps^2"));
  CHECK(value("deta/deps*p") == bexpr(m, b, "Cv*rho^2 + Cv*G(rho)/eps"));
  // Nothing determines deta/drho.
  CHECK_THROWS_AS(value("deta/drho"), UnboundSymbol);
  CHECK_THROWS_AS(value("q1"), UnboundSymbol);
}

TEST_CASE("bindings may use other symbols, which are resolved in turn") {
  ModelDef m = load("models/fluid2d.epk");
  Bindings b = bindings(m, "bind eps = eta^2\nbind eta = rho*theta\n");
  CHECK(apply_bindings(testing::expr(m, "deps/dtheta"), m, b) == testing::expr(m, "2*rho^2*theta"));
  Bindings cyclic = bindings(m, "bind eps = eta\nbind eta = eps\n");
  CHECK_THROWS_AS(apply_bindings(testing::expr(m, "eps"), m, cyclic), UnboundSymbol);
}

TEST_CASE("bindings diagnostics carry stable codes") {
  ModelDef m = load("models/gas1d.epk");
  CHECK(first_code(parse_bindings("bind p = log(rho)\n", m)) == "NonRationalBinding");
  CHECK(first_code(parse_bindings("bind p = rho^(1/2)\n", m)) == "NonRationalBinding");
  CHECK(first_code(parse_bindings("bind p = rho^0.5\n", m)) == "NonRationalBinding");
  CHECK(first_code(parse_bindings("parameter k = pi\n", m)) == "NonRationalBinding");
  CHECK(first_code(parse_bindings("bind p = kappa*rho\n", m)) == "UnboundSymbol");
  CHECK(first_code(parse_bindings("free pressure\n", m)) == "UnboundSymbol");
  BindingsResult located = parse_bindings("\n\nbind p = exp(rho)\n", m, "x.bind");
  REQUIRE(located.diagnostics.size() == 1);
  CHECK(located.diagnostics[0].span.line == 3);
  CHECK(located.diagnostics[0].span.col_start == 10);
  CHECK(format_diagnostic(located.diagnostics[0]).rfind("x.bind:3:10: error[NonRationalBinding]", 0) == 0);
  // Structural mistakes have no code but are still errors.
  for (const char* bad : {"bind p = u*rho\n", "bind p = rho\nbind p = eps\n", "bind p = rho\nbind dp/drho = 1\n",
                          "free q1\nbind q1 = 0\n", "bind rho = 1\n", "let p = 1\n", "function F()\n"}) {
    CAPTURE(bad);
    BindingsResult r = parse_bindings(bad, m);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.diagnostics.empty());
  }
}

TEST_CASE("ideal gas passes every constraint") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  BindingsResult b = parse_bindings_file("models/bindings/gas1d-ideal.bind", m);
  REQUIRE(b.ok());
  CheckResult r = check_candidate(m, cs, *b.bindings);
  REQUIRE(r.items.size() == 3);
  for (const auto& i : r.items) {
    CAPTURE(i.what);
    CHECK(i.pass);
  }
  CHECK(r.ok());
  CHECK(r.residual.is_zero());
}

TEST_CASE("pressure rho*eps is admissible for gamma = 2 only") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  // First constraint rho^2*deta/drho + p*deta/deps becomes
  // rho^2*(-Cv*(gamma - 1)/rho) + rho*eps*Cv/eps = rho*Cv*(2 - gamma).
  std::string body = "parameter Cv\nbind p = rho*eps\nbind deta/deps = Cv/eps\n"
                     "bind deta/drho = -Cv*(gamma - 1)/rho\nbind q1 = 0\nbind Phi1 = 0\n";
  Bindings symbolic = bindings(m, "parameter gamma\n" + body);
  CheckResult r = check_candidate(m, cs, symbolic);
  CHECK(r.items[0].value == bexpr(m, symbolic, "rho*Cv*(2 - gamma)"));
  CHECK(check_candidate(m, cs, bindings(m, "parameter gamma = 2\n" + body)).ok());
  CheckResult three = check_candidate(m, cs, bindings(m, "parameter gamma = 3\n" + body));
  CHECK_FALSE(three.ok());
  CHECK_FALSE(three.items[0].pass);
  CHECK(three.items[1].pass);
  CHECK(three.items[2].pass);
  // The bundled files say the same.
  for (const auto& [file, ok] : {std::pair{"gas1d-gamma2.bind", true}, std::pair{"gas1d-gamma3.bind", false}}) {
    BindingsResult f = parse_bindings_file(std::string("models/bindings/") + file, m);
    REQUIRE(f.ok());
    CHECK(check_candidate(m, cs, *f.bindings).ok() == ok);
  }
}

TEST_CASE("a constraint without a binding for one of its symbols is an error") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  CHECK_THROWS_AS(check_candidate(m, cs, bindings(m, "bind p = rho\nbind q1 = 0\nbind Phi1 = 0\n")), UnboundSymbol);
  // Declaring the entropy free leaves its partials symbolic instead.
  CheckResult r = check_candidate(m, cs, bindings(m, "free eta\nbind p = rho\nbind q1 = 0\nbind Phi1 = 0\n"));
  CHECK_FALSE(r.items[0].pass);
  CHECK(r.items[0].value == testing::expr(m, "rho^2*deta/drho + rho*deta/deps"));
  CHECK(r.items[1].pass);
}

TEST_CASE("non-simple fluid: the admissible family passes, a shear stress breaks isotropy") {
  ModelDef m = load("models/nonsimple2d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  BindingsResult file = parse_bindings_file("models/bindings/nonsimple2d-admissible.bind", m);
  REQUIRE(file.ok());
  CheckResult r = check_candidate(m, cs, *file.bindings);
  CHECK(r.items.size() == cs.constraints.size());
  CHECK(r.ok());
  CHECK(r.residual.is_zero());
  CHECK(check_candidate(m, cs, bindings(m, kAdmissible + "bind T12 = 0\n")).ok());

  Atom t12 = Atom::constit("T12");
  for (const char* c : {"1", "-3/2", "7", "1/1000"}) {
    CAPTURE(c);
    CheckResult p = check_candidate(m, cs, bindings(m, kAdmissible + "bind T12 = " + c + "\n"));
    CHECK_FALSE(p.ok());
    for (std::size_t i = 0; i < p.items.size(); ++i) {
      // Only the isotropy constraint (T12 times the temperature derivative of
      // the entropy) mentions the shear stress itself.
      bool isotropy = cs.constraints[i].expr.contains(t12);
      CAPTURE(p.items[i].what);
      CHECK(p.items[i].pass == !isotropy);
      if (isotropy) CHECK(testing::same_up_to_scale(p.items[i].value, testing::expr(m, "deta/dtheta")));
    }
  }
}

TEST_CASE("ideal gas: entropy production vanishes at every sample point") {
  ModelDef m = load("models/gas1d.epk");
  ConstraintSystem cs = run_solution_set(m).system;
  Bindings ideal = *parse_bindings_file("models/bindings/gas1d-ideal.bind", m).bindings;
  ProductionSample s = sample_production(m, cs, ideal, 200, 7);
  CHECK(s.production.is_zero());
  CHECK(s.trials == 200);
  CHECK(s.zero == 200);
  CHECK(s.witnesses.empty());
  // Negative control: with gamma = 3 the production is nonzero and witnessed.
  Bindings three = *parse_bindings_file("models/bindings/gas1d-gamma3.bind", m).bindings;
  ProductionSample t = sample_production(m, cs, three, 50, 7);
  CHECK_FALSE(t.production.is_zero());
  CHECK(t.zero < 50);
  CHECK_FALSE(t.witnesses.empty());
}

TEST_CASE("bundled bindings files parse") {
  ModelDef gas = load("models/gas1d.epk");
  ModelDef ns = load("models/nonsimple2d.epk");
  for (const char* f : {"gas1d-ideal.bind", "gas1d-gamma2.bind", "gas1d-gamma3.bind"}) {
    CAPTURE(f);
    CHECK(parse_bindings(read_file(std::string("models/bindings/") + f), gas).ok());
  }
  for (const char* f : {"nonsimple2d-admissible.bind", "nonsimple2d-shear.bind"}) {
    CAPTURE(f);
    CHECK(parse_bindings(read_file(std::string("models/bindings/") + f), ns).ok());
  }
}
