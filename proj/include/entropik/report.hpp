// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "entropik/bindings.hpp"
#include "entropik/case_analysis.hpp"
#include "entropik/mueller_liu.hpp"

namespace entropik {

extern const char* const engine_version;
extern const char* const report_schema_id;

// "sha256:<hex>" of the canonical model text.
std::string model_fingerprint(const ModelDef& m);

// Reports hold rendered expressions only, so they serialize losslessly and
// text, JSON and LaTeX are all produced from the same data.
struct ExprEntry {
  std::string text;
  std::string latex;
  friend bool operator==(const ExprEntry&, const ExprEntry&) = default;
};
ExprEntry entry(const Expr& e);

struct ConstraintEntry {
  ExprEntry expr;                           // expr = 0
  std::vector<std::string> coefficient_of;  // free-element monomials
  std::vector<std::string> cancelled;       // nonzero factors divided out
  std::string symmetry;
  friend bool operator==(const ConstraintEntry&, const ConstraintEntry&) = default;
};

struct SolvedSummary {
  struct Key {
    std::string key;
    ExprEntry value;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct Consequence {
    std::string key;
    std::string equation;   // label of the prolonged equation
    std::string parent;     // key whose solved form was differentiated
    std::string direction;  // independent variable
    friend bool operator==(const Consequence&, const Consequence&) = default;
  };
  std::vector<Key> keys;
  std::vector<ExprEntry> pivots;
  std::vector<Consequence> consequences;
  friend bool operator==(const SolvedSummary&, const SolvedSummary&) = default;
};

struct ConstraintsSection {
  std::vector<ConstraintEntry> constraints;
  ExprEntry residual;                  // residual >= 0
  std::vector<ExprEntry> nonzero;      // side conditions
  std::vector<std::string> free;       // free elements
  friend bool operator==(const ConstraintsSection&, const ConstraintsSection&) = default;
};

struct LiuSection {
  struct Multiplier {
    std::string symbol;
    std::string equation;
    std::vector<std::string> dependency;
    friend bool operator==(const Multiplier&, const Multiplier&) = default;
  };
  struct Identity {
    ExprEntry expr;
    std::string coefficient_of;
    friend bool operator==(const Identity&, const Identity&) = default;
  };
  struct Solved {
    std::string symbol;
    ExprEntry value;
    friend bool operator==(const Solved&, const Solved&) = default;
  };
  std::vector<Multiplier> multipliers;
  std::vector<Identity> identities;
  ExprEntry residual;                  // with the multipliers unsolved
  std::vector<Solved> solved;
  std::vector<std::string> unsolved;
  std::vector<ConstraintEntry> physical;
  std::vector<ExprEntry> unresolved;
  std::vector<std::string> separations;
  ExprEntry reduced_residual;          // with the solved multipliers substituted
  friend bool operator==(const LiuSection&, const LiuSection&) = default;
};

struct ComparisonSection {
  std::string verdict;
  std::vector<ExprEntry> both;
  std::vector<ExprEntry> only_liu;
  std::vector<ExprEntry> only_solution_set;
  friend bool operator==(const ComparisonSection&, const ComparisonSection&) = default;
};

struct AssumptionEntry {
  ExprEntry expr;
  bool zero = true;  // expr = 0, else expr != 0
  friend bool operator==(const AssumptionEntry&, const AssumptionEntry&) = default;
};

struct CaseEntry {
  std::vector<AssumptionEntry> assumptions;  // path from the root
  std::string status;
  ExprEntry pivot;                       // empty unless split
  std::vector<ExprEntry> relations;      // reduced system, each = 0
  std::vector<ExprEntry> nonzero;
  std::string contradiction;
  bool capped = false;
  std::vector<std::string> errors;
  std::vector<CaseEntry> children;
  friend bool operator==(const CaseEntry&, const CaseEntry&) = default;
};

struct CasesSection {
  std::vector<std::string> classify;
  std::vector<AssumptionEntry> assumptions;  // root assumptions
  bool force_residual_zero = false;
  int depth = 0;
  std::vector<ExprEntry> candidates;
  std::vector<ExprEntry> pivots;         // pivots actually split on
  int leaves = 0;
  CaseEntry root;
  friend bool operator==(const CasesSection&, const CasesSection&) = default;
};

struct ProductionSection {
  std::string bindings;
  ExprEntry production;
  int trials = 0;
  int zero = 0;
  int rejected = 0;
  std::vector<std::string> witnesses;
  friend bool operator==(const ProductionSection&, const ProductionSection&) = default;
};

struct VerifySection {
  int trials = 0;
  std::uint64_t seed = 0;
  int identity_pass = 0;
  int variety_pass = 0;
  int variety_skipped = 0;
  int rejected = 0;
  std::vector<std::string> failures;
  bool pass = false;
  std::optional<ProductionSection> production;
  friend bool operator==(const VerifySection&, const VerifySection&) = default;
};

struct CheckSection {
  struct Item {
    std::string what;
    ExprEntry constraint;
    ExprEntry value;
    bool pass = false;
    std::string note;
    friend bool operator==(const Item&, const Item&) = default;
  };
  std::string bindings;
  std::vector<Item> items;
  ExprEntry residual;
  bool pass = false;
  friend bool operator==(const CheckSection&, const CheckSection&) = default;
};

struct ReportError {
  std::string code;
  std::string message;
  friend bool operator==(const ReportError&, const ReportError&) = default;
};

struct AnalysisReport {
  std::string schema = report_schema_id;
  std::string engine_version = entropik::engine_version;
  std::string command;      // analyze, compare, split, verify, check
  std::string method;       // solution-set, mueller-liu or both
  std::string model;        // path as given
  std::string fingerprint;
  std::optional<SolvedSummary> solved;
  std::optional<ConstraintsSection> constraints;
  std::optional<LiuSection> liu;
  std::optional<ComparisonSection> comparison;
  std::optional<CasesSection> cases;
  std::optional<VerifySection> verify;
  std::optional<CheckSection> check;
  std::vector<ReportError> errors;
  std::map<std::string, double> timings_ms;  // excluded from deterministic output
  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

AnalysisReport make_report(const std::string& command, const std::string& model_path, const ModelDef& m);

void add_solution_set(AnalysisReport& r, const ModelDef& m, const SolutionSetResult& s);
void add_liu(AnalysisReport& r, const LiuResult& lr, const LiuElimination& el, const ModelDef& m);
void add_comparison(AnalysisReport& r, const Comparison& c);
void add_cases(AnalysisReport& r, const CaseNode& root, const CaseOptions& opt, int depth,
               const std::vector<Expr>& candidates);
void add_verify(AnalysisReport& r, const OracleReport& o, std::uint64_t seed);
void add_production(AnalysisReport& r, const std::string& bindings_path, const ProductionSample& p);
void add_check(AnalysisReport& r, const std::string& bindings_path, const CheckResult& c);

nlohmann::json report_to_json(const AnalysisReport& r, bool timings = true);
AnalysisReport report_from_json(const nlohmann::json& j);

std::string render_json(const AnalysisReport& r, bool timings = true);
std::string render_text(const AnalysisReport& r);
std::string render_latex(const AnalysisReport& r);  // standalone document

}  // namespace entropik
