// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "entropik/parser.hpp"

namespace testing {

inline entropik::ModelDef load(const std::string& path) {
  entropik::ParseResult r = entropik::parse_model_file(path);
  for (const auto& d : r.diagnostics) MESSAGE(entropik::format_diagnostic(d));
  REQUIRE(r.ok());
  return *r.model;
}

// Expression in the DSL's partial notation (dq1/drho, rho_x, ...).
inline entropik::Expr expr(const entropik::ModelDef& m, const std::string& text) {
  entropik::ExpressionResult r = entropik::parse_expression(text, m);
  for (const auto& d : r.diagnostics) MESSAGE(entropik::format_diagnostic(d));
  REQUIRE(r.node.has_value());
  return entropik::ast::evaluate(*r.node, m.context());
}

// Equality up to a nonzero rational factor.
inline bool same_up_to_scale(const entropik::Expr& a, const entropik::Expr& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  entropik::Expr q = a / b;
  return q.is_constant();
}

inline bool contains_up_to_scale(const std::vector<entropik::Expr>& set, const entropik::Expr& e) {
  return std::any_of(set.begin(), set.end(), [&](const entropik::Expr& s) { return same_up_to_scale(s, e); });
}

// Both lists describe the same set of relations, each up to a nonzero factor.
inline bool same_relations(const std::vector<entropik::Expr>& got, const std::vector<entropik::Expr>& want) {
  if (got.size() != want.size()) return false;
  for (const auto& w : want) {
    if (!contains_up_to_scale(got, w)) {
      MESSAGE("missing: " << entropik::to_string(w));
      return false;
    }
  }
  return true;
}

}  // namespace testing
