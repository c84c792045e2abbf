// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entropik/model.hpp"

namespace entropik {

struct SourceSpan {
  std::string file;
  int line = 1;
  int col_start = 1;
  int col_end = 1;
};

struct ParseDiagnostic {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string message;
  std::string code;  // stable error code when the problem has one
  SourceSpan span;
  std::string hint;
};

std::string format_diagnostic(const ParseDiagnostic& d);

struct ParseResult {
  std::optional<ModelDef> model;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

// Never throws: malformed input yields at least one error diagnostic.
ParseResult parse_model(const std::string& text, const std::string& file = "<input>");
ParseResult parse_model_file(const std::string& path);

std::string format_model(const ModelDef& m);

// Names available to an expression beyond the model's own declarations.
struct ExpressionScope {
  // Extra constitutive-like symbols (parameters, auxiliary functions) with
  // their argument lists; empty for scalar parameters.
  std::map<std::string, std::vector<Atom>> extra_functions;
  // Accept partial notation d<sym>/d<arg>[/d<arg>...].
  bool partial_notation = true;
};

struct ExpressionResult {
  std::optional<ast::NodePtr> node;
  std::vector<ParseDiagnostic> diagnostics;
};

// Parse a standalone expression against a model (assume flags, bindings).
ExpressionResult parse_expression(const std::string& text, const ModelDef& m,
                                  const ExpressionScope& scope = {},
                                  const SourceSpan& origin = {});

// Programmatic construction mirroring the DSL one statement at a time.  Each
// call throws InvalidModel with the located diagnostic on failure.
class ModelBuilder {
 public:
  ModelBuilder& independent(const std::vector<std::string>& names);
  ModelBuilder& field(const std::vector<std::string>& names);
  ModelBuilder& constitutive(const std::string& declaration);  // "q1(rho, eps)"
  ModelBuilder& equation(const std::string& label, const std::string& lhs, const std::string& rhs);
  ModelBuilder& entropy(const std::string& lhs);
  ModelBuilder& leading(const std::vector<std::string>& derivatives);
  ModelBuilder& assume_nonzero(const std::string& expr);
  ModelBuilder& max_order(int n);
  ModelDef build() const;  // validated

 private:
  std::vector<std::string> lines_;
};

}  // namespace entropik
