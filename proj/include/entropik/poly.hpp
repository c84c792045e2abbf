// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "entropik/atom.hpp"

namespace entropik {

struct VarPow {
  std::uint32_t var;  // atom id
  std::uint32_t exp;  // > 0
  friend auto operator<=>(const VarPow&, const VarPow&) = default;
};

// Power product of atoms, factors sorted by atom id.  The empty monomial is 1.
using Monomial = std::vector<VarPow>;

// Lexicographic monomial order on atom ids: > 0 when a is larger.
int lex_compare(const Monomial& a, const Monomial& b);
Monomial mono_mul(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& d, const Monomial& m);
Monomial mono_div(const Monomial& m, const Monomial& d);  // requires divides
Monomial mono_gcd(const Monomial& a, const Monomial& b);
Monomial mono_lcm(const Monomial& a, const Monomial& b);
std::uint32_t mono_degree(const Monomial& m);
std::uint32_t mono_exponent(const Monomial& m, std::uint32_t var);
// Registration-independent comparison (total degree, then canonical atoms).
int canonical_mono_compare(const Monomial& a, const Monomial& b);

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

struct Term {
  Monomial mono;
  mpq_class coef;
};

// Sparse multivariate polynomial with exact rational coefficients.  Terms are
// kept sorted in decreasing lexicographic order without zero coefficients, so
// structural equality is polynomial equality.
class Poly {
 public:
  Poly() = default;
  Poly(int c);  // NOLINT(google-explicit-constructor)
  Poly(const mpq_class& c);  // NOLINT(google-explicit-constructor)
  explicit Poly(const Atom& a);
  static Poly monomial(Monomial m, mpq_class c);
  static Poly from_terms(std::vector<Term> terms);  // sorts and merges

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  mpq_class constant_term() const;
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const mpq_class& c) const;
  Poly times_monomial(const Monomial& m, const mpq_class& c = 1) const;
  Poly div_monomial(const Monomial& m) const;  // requires m | every term
  Poly pow(unsigned n) const;

  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  // Greatest monomial dividing every term (1 for the zero polynomial).
  Monomial monomial_content() const;
  // Term that comes first in the canonical (registration-independent) order.
  const Term& canonical_leading() const;
  std::set<std::uint32_t> vars() const;
  bool contains_var(std::uint32_t var) const;
  std::uint32_t degree_in(std::uint32_t var) const;
  Poly partial(std::uint32_t var) const;
  // Coefficient of var^k (k >= 0) viewing the polynomial as univariate in var.
  Poly coefficient(std::uint32_t var, std::uint32_t k) const;

  std::size_t hash() const;

 private:
  void normalize_order();
  std::vector<Term> terms_;
};

// Exact quotient a / b when b divides a in the polynomial ring.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);

// Make the polynomial primitive up to a rational multiple: the coefficient of
// the canonical leading term becomes 1.
Poly make_monic(const Poly& p);

}  // namespace entropik
