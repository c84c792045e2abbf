// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entropik/entropy_split.hpp"
#include "entropik/parser.hpp"

namespace entropik {

// Candidate constitutive functions for a model.  A bindings file holds one
// statement per line ('#' starts a comment):
//
//   parameter gamma [= 7/5]     scalar constant, optionally with a test value
//   function F(rho)             auxiliary function of some model arguments
//   free eta                    model symbol left arbitrary
//   bind p = (gamma - 1)*rho*eps
//   bind deta/deps = Cv/eps     a partial derivative instead of the function,
//                               for entropies that are not rational
//
// Bound values stay in the rational fragment; logarithms and other
// transcendental functions are written through their derivatives.
struct Binding {
  Atom target;   // constitutive symbol or partial
  Expr value;
  int line = 0;
};

struct Bindings {
  std::string file;
  std::vector<std::string> parameters;           // declaration order
  std::map<std::string, mpq_class> values;       // parameters with a test value
  std::map<std::string, std::vector<Atom>> functions;
  std::set<std::string> free;
  std::vector<Binding> bindings;

  // Model context extended by the parameters and auxiliary functions.
  JetContext context(const ModelDef& m) const;
};

struct BindingsResult {
  std::optional<Bindings> bindings;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return bindings.has_value(); }
};

// Never throws.  Unknown names are reported with code UnboundSymbol,
// transcendental functions and fractional powers with NonRationalBinding.
BindingsResult parse_bindings(const std::string& text, const ModelDef& m, const std::string& file = "<bindings>");
BindingsResult parse_bindings_file(const std::string& path, const ModelDef& m);

// e with every constitutive symbol and partial replaced by the derivative of
// its binding; free symbols, auxiliary functions and parameters without a
// value stay symbolic.  UnboundSymbol when an atom is neither free nor
// determined by a binding.
Expr apply_bindings(const Expr& e, const ModelDef& m, const Bindings& b);

struct CheckItem {
  std::string what;   // "constraint 3", "symmetry T11: u_y ~ v_x"
  Expr constraint;
  Expr value;         // constraint with the bindings applied
  bool pass = false;
  std::string note;   // set when the value could not be formed
};

struct CheckResult {
  std::vector<CheckItem> items;
  Expr residual;      // residual with the bindings applied; its sign is left open
  bool ok() const;
};

CheckResult check_candidate(const ModelDef& m, const ConstraintSystem& cs, const Bindings& b);

// Entropy production on solutions with the bindings applied, evaluated at
// random rational points of the remaining atoms.
struct ProductionSample {
  Expr production;      // symbolic, after the bindings
  int trials = 0;
  int zero = 0;         // points where the production vanishes exactly
  int rejected = 0;     // draws where a denominator vanished
  std::vector<std::string> witnesses;  // nonzero values with their points, at most 5
};

ProductionSample sample_production(const ModelDef& m, const ConstraintSystem& cs, const Bindings& b, int trials,
                                   std::uint64_t seed);

}  // namespace entropik
