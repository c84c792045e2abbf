// SPDX-License-Identifier: Apache-2.0
#include "entropik/cli.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "entropik/report.hpp"

namespace entropik {

namespace {

struct Options {
  std::string model;
  std::string output = "text";
  int max_order = 0;
  bool no_timings = false;
  // analyze / compare
  std::string method = "solution-set";
  std::string multiplier_dep;
  // split
  std::vector<std::string> assume;
  int depth = 4;
  bool force_residual_zero = false;
  std::string classify;
  bool no_default_assumptions = false;
  // verify
  int trials = 200;
  std::uint64_t seed = 7;
  std::string bindings;
};

// Raised for problems reported as located diagnostics (exit 1).
struct DiagnosticsFailure {
  std::vector<ParseDiagnostic> diagnostics;
};

class Stopwatch {
 public:
  double lap_ms() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (std::istringstream in(s); std::getline(in, item, ',');) {
    auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

SourceSpan flag_span(const std::string& flag) { return {flag, 1, 1, 1}; }

Expr parse_flag_expr(const std::string& text, const ModelDef& m, const std::string& flag) {
  ExpressionResult r = parse_expression(text, m, {}, flag_span(flag));
  if (!r.node) throw DiagnosticsFailure{r.diagnostics};
  return ast::evaluate(*r.node, m.context());
}

// "dPhi1/deps = 0", "deta/dtheta != 0", "a = b".
Assumption parse_assumption(const std::string& text, const ModelDef& m) {
  std::size_t op = text.find("!=");
  bool nonzero = op != std::string::npos;
  if (!nonzero) op = text.find('=');
  if (op == std::string::npos) {
    ParseDiagnostic d;
    d.message = "assumption '" + text + "' needs '= 0' or '!= 0'";
    d.span = flag_span("--assume");
    throw DiagnosticsFailure{{d}};
  }
  Expr lhs = parse_flag_expr(text.substr(0, op), m, "--assume");
  Expr rhs = parse_flag_expr(text.substr(op + (nonzero ? 2 : 1)), m, "--assume");
  Expr e = lhs - rhs;
  if (e.is_constant()) {
    ParseDiagnostic d;
    d.message = "assumption '" + text + "' is constant";
    d.span = flag_span("--assume");
    throw DiagnosticsFailure{{d}};
  }
  return {e, nonzero ? Assumption::Polarity::nonzero : Assumption::Polarity::zero};
}

std::vector<Atom> parse_dependency(const std::string& list, const ModelDef& m) {
  std::vector<Atom> out;
  for (const std::string& item : split_list(list)) {
    Expr e = parse_flag_expr(item, m, "--multiplier-dep");
    auto atoms = e.atoms();
    if (atoms.size() != 1 || e != Expr(*atoms.begin()) || atoms.begin()->is_function()) {
      ParseDiagnostic d;
      d.message = "'" + item + "' is not a jet variable";
      d.span = flag_span("--multiplier-dep");
      throw DiagnosticsFailure{{d}};
    }
    out.push_back(*atoms.begin());
  }
  return out;
}

ModelDef load_model(const Options& o) {
  ParseResult r = parse_model_file(o.model);
  if (!r.ok()) throw DiagnosticsFailure{r.diagnostics};
  ModelDef m = std::move(*r.model);
  if (o.max_order > 0) m.max_order = o.max_order;
  return m;
}

void analyze(const Options& o, const ModelDef& m, AnalysisReport& r, Stopwatch& sw) {
  r.method = o.method;
  if (o.method == "solution-set") {
    SolutionSetResult s = run_solution_set(m);
    r.timings_ms["solution_set"] = sw.lap_ms();
    add_solution_set(r, m, s);
  } else {
    std::vector<Atom> dep = parse_dependency(o.multiplier_dep, m);
    LiuResult lr = run_mueller_liu(m, dep);
    LiuElimination el = eliminate_multipliers(m, lr, expand_model(m).nonzero);
    r.timings_ms["mueller_liu"] = sw.lap_ms();
    add_liu(r, lr, el, m);
  }
}

void compare_methods(const Options& o, const ModelDef& m, AnalysisReport& r, Stopwatch& sw) {
  r.method = "both";
  SolutionSetResult s = run_solution_set(m);
  r.timings_ms["solution_set"] = sw.lap_ms();
  LiuResult lr = run_mueller_liu(m, parse_dependency(o.multiplier_dep, m));
  Comparison c = compare(m, lr, s.system);
  r.timings_ms["mueller_liu"] = sw.lap_ms();
  add_solution_set(r, m, s);
  add_liu(r, lr, c.liu, m);
  add_comparison(r, c);
}

void split_cases(const Options& o, const ModelDef& m, AnalysisReport& r, Stopwatch& sw) {
  r.method = "solution-set";
  SolutionSetResult s = run_solution_set(m);
  r.timings_ms["solution_set"] = sw.lap_ms();
  CaseOptions opt;
  opt.force_residual_zero = o.force_residual_zero;
  std::vector<std::string> classify = split_list(o.classify);
  for (const std::string& c : classify) {
    if (m.find_constit(c) == nullptr) {
      ParseDiagnostic d;
      d.message = "'" + c + "' is not a constitutive symbol";
      d.code = "UnknownConstitSym";
      d.span = flag_span("--classify");
      throw DiagnosticsFailure{{d}};
    }
  }
  opt.classify = classify.empty() ? default_classifying(m) : std::set<std::string>(classify.begin(), classify.end());
  for (const std::string& a : o.assume) opt.assumptions.push_back(parse_assumption(a, m));
  if (!o.no_default_assumptions) {
    for (const Assumption& a : nondegenerate_assumptions(m, s.system, opt)) {
      bool stated = std::any_of(opt.assumptions.begin(), opt.assumptions.end(),
                                [&](const Assumption& b) { return b.expr == a.expr; });
      if (!stated) opt.assumptions.push_back(a);
    }
  }
  std::vector<Expr> candidates = pivot_exprs(pivot_candidates(m, s.system, opt));
  CaseNode root = build_tree(m, s.system, candidates, o.depth, opt);
  r.timings_ms["case_tree"] = sw.lap_ms();
  add_cases(r, root, opt, o.depth, candidates);
}

void verify(const Options& o, const ModelDef& m, AnalysisReport& r, Stopwatch& sw) {
  r.method = "solution-set";
  SolutionSetResult s = run_solution_set(m);
  r.timings_ms["solution_set"] = sw.lap_ms();
  add_verify(r, numeric_oracle(m, s.system, o.trials, o.seed), o.seed);
  r.timings_ms["oracle"] = sw.lap_ms();
  if (!o.bindings.empty()) {
    BindingsResult b = parse_bindings_file(o.bindings, m);
    if (!b.ok()) throw DiagnosticsFailure{b.diagnostics};
    add_production(r, o.bindings, sample_production(m, s.system, *b.bindings, o.trials, o.seed));
    r.timings_ms["production"] = sw.lap_ms();
  }
}

void check(const Options& o, const ModelDef& m, AnalysisReport& r, Stopwatch& sw) {
  r.method = "solution-set";
  BindingsResult b = parse_bindings_file(o.bindings, m);
  if (!b.ok()) throw DiagnosticsFailure{b.diagnostics};
  SolutionSetResult s = run_solution_set(m);
  r.timings_ms["solution_set"] = sw.lap_ms();
  add_check(r, o.bindings, check_candidate(m, s.system, *b.bindings));
  r.timings_ms["check"] = sw.lap_ms();
}

void emit(const AnalysisReport& r, const Options& o, std::ostream& out) {
  if (o.output == "json") {
    out << render_json(r, !o.no_timings);
  } else if (o.output == "latex") {
    out << render_latex(r);
  } else {
    out << render_text(r);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy-principle exploitation for continuum models", "entropik"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(engine_version));
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("model", o.model, "model file (.epk)")->required();
    sub->add_option("--output", o.output, "report format")->check(CLI::IsMember({"text", "json", "latex"}));
    sub->add_option("--max-order", o.max_order, "highest jet order for differential consequences")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--no-timings", o.no_timings, "leave timings out of JSON reports");
  };
  using Command = std::function<void(const Options&, const ModelDef&, AnalysisReport&, Stopwatch&)>;
  std::vector<std::pair<CLI::App*, Command>> commands;

  CLI::App* an = app.add_subcommand("analyze", "derive the constraints of the entropy principle");
  common(an);
  an->add_option("--method", o.method, "exploitation method")
      ->check(CLI::IsMember({"solution-set", "mueller-liu"}));
  an->add_option("--multiplier-dep", o.multiplier_dep,
                 "comma-separated arguments of the multipliers (default: constitutive dependency)");
  commands.emplace_back(an, analyze);

  CLI::App* cmp = app.add_subcommand("compare", "compare the solution-set and Mueller-Liu results");
  common(cmp);
  cmp->add_option("--multiplier-dep", o.multiplier_dep, "comma-separated arguments of the multipliers");
  commands.emplace_back(cmp, compare_methods);

  CLI::App* sp = app.add_subcommand("split", "classify the constraints by case splitting on pivots");
  common(sp);
  sp->add_option("--assume", o.assume, "assumption such as \"dPhi1/deps = 0\" or \"deta/deps != 0\"");
  sp->add_option("--depth", o.depth, "depth cap of the case tree")->check(CLI::PositiveNumber);
  sp->add_flag("--force-residual-zero", o.force_residual_zero, "require the residual to vanish (adiabatic case)");
  sp->add_option("--classify", o.classify, "comma-separated constitutive symbols being classified");
  sp->add_flag("--no-default-assumptions", o.no_default_assumptions,
               "do not assume classifying functions vary with the arguments of first-order pivots");
  commands.emplace_back(sp, split_cases);

  CLI::App* ve = app.add_subcommand("verify", "check the constraint split at random rational points");
  common(ve);
  ve->add_option("--trials", o.trials, "number of sample points")->check(CLI::PositiveNumber);
  ve->add_option("--seed", o.seed, "random seed");
  ve->add_option("--bindings", o.bindings, "also sample the entropy production of these bindings");
  commands.emplace_back(ve, verify);

  CLI::App* ch = app.add_subcommand("check", "evaluate the constraints for candidate constitutive functions");
  common(ch);
  ch->add_option("bindings", o.bindings, "bindings file")->required();
  commands.emplace_back(ch, check);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_diagnostics;
  }

  Command run;
  std::string name;
  for (const auto& [sub, fn] : commands) {
    if (sub->parsed()) {
      run = fn;
      name = sub->get_name();
    }
  }

  Stopwatch sw;
  std::optional<AnalysisReport> report;
  try {
    ModelDef m = load_model(o);
    report = make_report(name, o.model, m);
    report->timings_ms["parse"] = sw.lap_ms();
    run(o, m, *report, sw);
  } catch (const DiagnosticsFailure& f) {
    for (const auto& d : f.diagnostics) err << format_diagnostic(d) << "\n";
    return exit_diagnostics;
  } catch (const EngineError& e) {
    err << "error[" << e.code() << "]: " << e.what() << "\n";
    if (report && o.output == "json") {
      report->errors.push_back({e.code(), e.what()});
      emit(*report, o, out);
    }
    return exit_engine_error;
  }
  emit(*report, o, out);
  return exit_ok;
}

}  // namespace entropik
