// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "entropik/atom.hpp"
#include "entropik/errors.hpp"
#include "entropik/poly.hpp"

namespace entropik {

// Canonical rational function num/den:
//  * a zero numerator forces den == 1;
//  * monomial factors shared by num and den are cancelled;
//  * den is divided out entirely when it divides num exactly;
//  * the canonical leading coefficient of den is 1.
class Expr {
 public:
  Expr() : den_(1) {}
  Expr(int c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  Expr(const mpq_class& c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  Expr(const Atom& a) : num_(a), den_(1) {}  // NOLINT(google-explicit-constructor)
  Expr(Poly p) : num_(std::move(p)), den_(1) {}  // NOLINT(google-explicit-constructor)
  // Normalizing constructor; throws DivisionByZeroExpr for a zero den.
  static Expr fraction(Poly num, Poly den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_constant(); }
  mpq_class constant_value() const;  // requires is_constant()
  std::set<Atom, CanonicalLess> atoms() const;
  bool contains(const Atom& a) const;
  std::size_t hash() const { return num_.hash() * 7919U ^ den_.hash(); }

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr pow(int n) const;

  friend bool operator==(const Expr& a, const Expr& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  // Divide num and den by f wherever f divides exactly (used to strip
  // factors known to be common, such as recorded pivots).
  Expr cancel_factor(const Poly& f) const;

 private:
  Expr(Poly num, Poly den, bool /*trusted*/) : num_(std::move(num)), den_(std::move(den)) {}
  Poly num_;
  Poly den_;
};

// Equality as rational functions: the cross-multiplied numerators agree.
// Canonical forms only cancel monomial factors, so two equal fractions may
// still differ by a common polynomial factor and compare unequal with ==.
inline bool equivalent(const Expr& a, const Expr& b) { return a == b || (a - b).is_zero(); }

// Argument lists of the constitutive symbols plus the independent variables;
// everything the chain rule needs to know.
struct ConstitSignature {
  std::vector<Atom> args;
  std::vector<std::string> labels;  // display names of args, used by partial atoms
};

struct JetContext {
  std::vector<std::string> indep;
  std::map<std::string, ConstitSignature> constit;

  const ConstitSignature& signature(const std::string& name) const;  // UnknownConstitSym
  Atom partial_atom(const std::string& name, const MultiIndex& slots) const;
  Atom jet_atom(const std::string& field, const MultiIndex& index) const;
  int indep_index(const std::string& name) const;  // -1 if absent
};

// Formal partial derivative in one atom; every other atom is a constant.
Expr partial_diff(const Expr& e, const Atom& a);
Poly partial_diff(const Poly& p, const Atom& a);

// Total derivative D_iv with the chain rule through constitutive symbols.
Expr total_derivative(const Expr& e, int iv, const JetContext& ctx);
Poly total_derivative(const Poly& p, int iv, const JetContext& ctx);
Poly total_derivative_atom(const Atom& a, int iv, const JetContext& ctx);

// Partial derivative with respect to a constitutive argument: constitutive
// symbols are functions of their declared arguments, everything else that is
// not the argument itself is constant.
Expr chain_partial(const Expr& e, const Atom& arg, const JetContext& ctx);

struct SubstitutionMap {
  std::map<Atom, Expr> pairs;
  bool triangular = true;

  bool contains(const Atom& a) const { return pairs.count(a) != 0; }
  const Expr* find(const Atom& a) const;
  void set(const Atom& a, Expr value) { pairs[a] = std::move(value); }
  // Recompute the flag by scanning every right-hand side for keys.
  bool check_triangular() const;
  std::vector<Atom> keys_canonical() const;
};

// One simultaneous pass: every key occurrence replaced by its value.
Expr substitute(const Expr& e, const SubstitutionMap& m);
Expr substitute(const Expr& e, const Atom& a, const Expr& value);
// Repeats simultaneous passes until no key remains (bounded by the key count).
Expr substitute_fixpoint(const Expr& e, const SubstitutionMap& m);

struct CollectedTerm {
  Monomial mono;  // monomial in the collection variables
  Poly coef;      // part of the numerator, free of the collection variables
};

// numerator(e) == sum mono * coef, terms in canonical monomial order with the
// unit monomial first.  NotPolynomialInVars when den mentions a variable.
std::vector<CollectedTerm> collect_coefficients(const Expr& e, const std::set<Atom>& vars);
std::vector<CollectedTerm> collect_coefficients(const Poly& p, const std::set<Atom>& vars);

using Assignment = std::unordered_map<Atom, mpq_class>;

mpq_class eval_numeric(const Poly& p, const Assignment& values);
mpq_class eval_numeric(const Expr& e, const Assignment& values);  // DenominatorVanishes

std::string to_string(const Monomial& m);
std::string to_string(const Poly& p);
std::string to_string(const Expr& e);
std::string to_latex(const Atom& a);
std::string to_latex(const Poly& p);
std::string to_latex(const Expr& e);

}  // namespace entropik

template <>
struct std::hash<entropik::Expr> {
  std::size_t operator()(const entropik::Expr& e) const noexcept { return e.hash(); }
};
