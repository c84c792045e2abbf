// SPDX-License-Identifier: Apache-2.0
// Randomized algebraic properties of the differentiation kernel, shared by
// the unit suite and the acceptance runner.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "entropik/model.hpp"

namespace entropik::props {

// Random rational functions over the jet coordinates (up to second order),
// the constitutive symbols and their first partials of a model.
class ExprGen {
 public:
  ExprGen(const ModelDef& m, std::uint64_t seed) : rng_(seed) {
    JetContext ctx = m.context();
    for (const auto& name : m.indep) atoms_.push_back(Atom::indep(name));
    std::size_t n = m.indep.size();
    for (const auto& f : m.fields) {
      MultiIndex idx(n, 0);
      atoms_.push_back(ctx.jet_atom(f, idx));
      for (std::size_t i = 0; i < n; ++i) {
        MultiIndex a(n, 0);
        a[i] = 1;
        atoms_.push_back(ctx.jet_atom(f, a));
        for (std::size_t j = i; j < n; ++j) {
          MultiIndex b = a;
          b[j] += 1;
          atoms_.push_back(ctx.jet_atom(f, b));
        }
      }
    }
    for (const ConstitDecl& d : m.constit) {
      atoms_.push_back(Atom::constit(d.name));
      for (std::size_t s = 0; s < d.args.size(); ++s) {
        MultiIndex slots(d.args.size(), 0);
        slots[s] = 1;
        atoms_.push_back(ctx.partial_atom(d.name, slots));
      }
    }
  }

  Expr poly(int max_terms) {
    std::uniform_int_distribution<int> terms(1, max_terms);
    std::uniform_int_distribution<int> factors(0, 3);
    std::uniform_int_distribution<std::size_t> pick(0, atoms_.size() - 1);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 5);
    Expr out;
    for (int t = terms(rng_); t > 0; --t) {
      mpq_class c(num(rng_), den(rng_));
      c.canonicalize();
      Expr term(c);
      for (int f = factors(rng_); f > 0; --f) term *= Expr(atoms_[pick(rng_)]);
      out += term;
    }
    return out;
  }

  // A polynomial, or with probability 1/4 a quotient of two.
  Expr next() {
    Expr p = poly(4);
    if (std::uniform_int_distribution<int>(0, 3)(rng_) != 0) return p;
    Expr q = poly(2);
    return q.is_zero() ? p : p / q;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::vector<Atom> atoms_;
};

struct Tally {
  int trials = 0;
  int commutation_failures = 0;
  int leibniz_failures = 0;
  int structural_mismatches = 0;  // equal fractions whose canonical forms differ
  std::string first_failure;
  bool ok() const { return commutation_failures == 0 && leibniz_failures == 0; }
};

// For `trials` random expressions: D_i D_j e = D_j D_i e for two random
// directions, and D_i(a*b) = D_i(a)*b + a*D_i(b), with total derivatives
// expanded through the constitutive dependencies.  Sides are compared as
// rational functions; structural_mismatches counts the comparisons that
// needed the cross-multiplication.
inline Tally derivative_properties(const ModelDef& m, int trials, std::uint64_t seed) {
  ExprGen gen(m, seed);
  JetContext ctx = m.context();
  int n = static_cast<int>(m.indep.size());
  std::uniform_int_distribution<int> dir(0, n - 1);
  Tally out;
  out.trials = trials;
  for (int k = 0; k < trials; ++k) {
    Expr a = gen.next();
    Expr b = gen.next();
    int i = dir(gen.rng());
    int j = n > 1 ? (i + 1 + std::uniform_int_distribution<int>(0, n - 2)(gen.rng())) % n : i;
    Expr dij = total_derivative(total_derivative(a, j, ctx), i, ctx);
    Expr dji = total_derivative(total_derivative(a, i, ctx), j, ctx);
    if (dij != dji && equivalent(dij, dji)) ++out.structural_mismatches;
    if (!equivalent(dij, dji)) {
      ++out.commutation_failures;
      if (out.first_failure.empty()) out.first_failure = "commutation on " + to_string(a);
    }
    Expr lhs = total_derivative(a * b, i, ctx);
    Expr rhs = total_derivative(a, i, ctx) * b + a * total_derivative(b, i, ctx);
    if (lhs != rhs && equivalent(lhs, rhs)) ++out.structural_mismatches;
    if (!equivalent(lhs, rhs)) {
      ++out.leibniz_failures;
      if (out.first_failure.empty()) out.first_failure = "Leibniz on " + to_string(a) + " and " + to_string(b);
    }
  }
  return out;
}

}  // namespace entropik::props
