// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entropik/expr.hpp"

namespace entropik {

// Source-level expression tree.  Models keep the tree exactly as written so
// that formatting and re-parsing is an identity; expand_model turns it into
// canonical Exprs with every derivative operator evaluated.
namespace ast {

enum class Kind { number, symbol, neg, add, sub, mul, div, pow, deriv };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::number;
  mpq_class value;  // number
  Atom atom;        // symbol
  int exponent = 0; // pow
  int var = -1;     // deriv: index of the independent variable
  NodePtr lhs;      // operand / left operand
  NodePtr rhs;      // right operand
};

NodePtr number(const mpq_class& v);
NodePtr symbol(const Atom& a);
NodePtr negate(NodePtr a);
NodePtr binary(Kind k, NodePtr a, NodePtr b);
NodePtr power(NodePtr base, int exponent);
NodePtr deriv(int var, NodePtr child);

bool equal(const NodePtr& a, const NodePtr& b);
Expr evaluate(const NodePtr& n, const JetContext& ctx);
std::string format(const NodePtr& n, const std::vector<std::string>& indep);

}  // namespace ast

struct ConstitDecl {
  std::string name;
  std::vector<Atom> args;                      // jet variables of declared fields
  std::vector<std::pair<int, int>> symmetric;  // argument slot pairs

  std::vector<std::string> labels() const;
  friend bool operator==(const ConstitDecl&, const ConstitDecl&) = default;
};

struct Equation {
  std::string label;
  ast::NodePtr lhs;
  ast::NodePtr rhs;  // the equation reads lhs = rhs
};

struct ModelDef {
  std::vector<std::string> indep;
  std::vector<std::string> fields;
  std::vector<ConstitDecl> constit;
  std::vector<Equation> equations;
  ast::NodePtr entropy_lhs;  // entropy_lhs >= entropy_rhs
  ast::NodePtr entropy_rhs;
  std::vector<Atom> leading;  // one jet variable per equation, same order
  std::vector<ast::NodePtr> nonzero;
  int max_order = 4;

  JetContext context() const;
  const ConstitDecl* find_constit(const std::string& name) const;
  bool is_field(const std::string& name) const;
  Atom jet(const std::string& field, const MultiIndex& index) const;
  // Union of constitutive arguments in declaration order, without repeats.
  std::vector<Atom> dependency_atoms() const;
  // Leading derivative itself or a jet variable that strictly dominates one.
  bool is_leading_class(const Atom& a) const;
  // Strictly dominates a leading derivative of the same field (or nullopt).
  std::optional<std::size_t> consequence_base(const Atom& a) const;
};

bool structurally_equal(const ModelDef& a, const ModelDef& b);

struct ExpandedModel {
  std::vector<Expr> equations;  // lhs - rhs, chain-expanded
  Expr entropy;                 // entropy lhs - rhs, chain-expanded
  std::vector<Expr> nonzero;
};

ExpandedModel expand_model(const ModelDef& m);

// Structural problems of a model; empty when valid.  Each entry names the
// offending item so the parser can attach it to a source line.
struct ModelProblem {
  enum class Where { leading, equation, constit, general } where = Where::general;
  std::size_t index = 0;
  std::string message;
};
std::vector<ModelProblem> validate_model(const ModelDef& m);
void require_valid(const ModelDef& m);  // InvalidModel

struct AtomClasses {
  std::set<Atom, CanonicalLess> leading;
  std::set<Atom, CanonicalLess> dependency;
  std::set<Atom, CanonicalLess> free;
  std::set<Atom, CanonicalLess> excluded;
  std::vector<Atom> conflicts;  // dependency atoms that are also leading-class
};

// Partition of the jet coordinates relevant to exprs.  The universe is every
// independent variable, every field jet variable up to the highest order that
// occurs, and every atom that occurs.
AtomClasses classify_atoms(const ModelDef& m, const std::vector<Expr>& exprs);

}  // namespace entropik
