// SPDX-License-Identifier: Apache-2.0
#include "entropik/report.hpp"

#include <openssl/evp.h>

#include <iomanip>
#include <sstream>

namespace entropik {

const char* const engine_version = "0.1.0";
const char* const report_schema_id = "entropik-report/1";

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExprEntry, text, latex)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConstraintEntry, expr, coefficient_of, cancelled, symmetry)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SolvedSummary::Key, key, value)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SolvedSummary::Consequence, key, equation, parent, direction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SolvedSummary, keys, pivots, consequences)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConstraintsSection, constraints, residual, nonzero, free)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LiuSection::Multiplier, symbol, equation, dependency)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LiuSection::Identity, expr, coefficient_of)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LiuSection::Solved, symbol, value)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LiuSection, multipliers, identities, residual, solved, unsolved, physical,
                                   unresolved, separations, reduced_residual)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ComparisonSection, verdict, both, only_liu, only_solution_set)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AssumptionEntry, expr, zero)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CaseEntry, assumptions, status, pivot, relations, nonzero, contradiction, capped,
                                   errors, children)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CasesSection, classify, assumptions, force_residual_zero, depth, candidates,
                                   pivots, leaves, root)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProductionSection, bindings, production, trials, zero, rejected, witnesses)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CheckSection::Item, what, constraint, value, pass, note)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CheckSection, bindings, items, residual, pass)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReportError, code, message)

void to_json(json& j, const VerifySection& v) {
  j = json{{"trials", v.trials},
           {"seed", v.seed},
           {"identity_pass", v.identity_pass},
           {"variety_pass", v.variety_pass},
           {"variety_skipped", v.variety_skipped},
           {"rejected", v.rejected},
           {"failures", v.failures},
           {"pass", v.pass}};
  if (v.production) j["production"] = *v.production;
}

void from_json(const json& j, VerifySection& v) {
  j.at("trials").get_to(v.trials);
  j.at("seed").get_to(v.seed);
  j.at("identity_pass").get_to(v.identity_pass);
  j.at("variety_pass").get_to(v.variety_pass);
  j.at("variety_skipped").get_to(v.variety_skipped);
  j.at("rejected").get_to(v.rejected);
  j.at("failures").get_to(v.failures);
  j.at("pass").get_to(v.pass);
  if (j.contains("production")) v.production = j.at("production").get<ProductionSection>();
}

namespace {

std::vector<ExprEntry> entries(const std::vector<Expr>& xs) {
  std::vector<ExprEntry> out;
  for (const Expr& e : xs) out.push_back(entry(e));
  return out;
}

ConstraintEntry constraint_entry(const Constraint& c) {
  ConstraintEntry out{entry(c.expr), {}, {}, c.symmetry};
  for (const Monomial& mono : c.monomials) out.coefficient_of.push_back(to_string(mono));
  for (const Expr& f : c.cancelled) out.cancelled.push_back(to_string(f));
  return out;
}

AssumptionEntry assumption_entry(const Assumption& a) {
  return {entry(a.expr), a.polarity == Assumption::Polarity::zero};
}

CaseEntry case_entry(const CaseNode& n) {
  CaseEntry out;
  for (const Assumption& a : n.assumptions) out.assumptions.push_back(assumption_entry(a));
  out.status = to_string(n.status);
  if (n.is_inner()) out.pivot = entry(n.pivot);
  if (!n.is_inner()) {
    out.relations = entries(n.system.relations());
    out.nonzero = entries(n.system.nonzero);
  }
  out.contradiction = n.system.contradiction;
  out.capped = n.system.capped;
  out.errors = n.errors;
  for (const CaseNode& c : n.children) out.children.push_back(case_entry(c));
  return out;
}

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::string assumption_text(const AssumptionEntry& a) { return a.expr.text + (a.zero ? " = 0" : " != 0"); }

std::string assumption_latex(const AssumptionEntry& a) { return a.expr.latex + (a.zero ? " = 0" : " \\neq 0"); }

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

// ---- text ----------------------------------------------------------------

void text_constraints(std::ostream& os, const std::string& title, const std::vector<ConstraintEntry>& cs) {
  os << title << " (" << cs.size() << "):\n";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const ConstraintEntry& c = cs[i];
    os << "  " << std::setw(3) << i + 1 << ". " << c.expr.text << " = 0";
    if (!c.symmetry.empty()) {
      os << "    [symmetry " << c.symmetry << "]";
    } else if (!c.coefficient_of.empty()) {
      os << "    [coefficient of " << join(c.coefficient_of, ", ") << "]";
    }
    if (!c.cancelled.empty()) os << " [cancelled " << join(c.cancelled, ", ") << "]";
    os << "\n";
  }
}

void text_case(std::ostream& os, const CaseEntry& n, int depth) {
  std::string ind(static_cast<std::size_t>(2 * depth), ' ');
  os << ind << "- ";
  if (depth > 0 && !n.assumptions.empty()) os << "[" << assumption_text(n.assumptions.back()) << "] ";
  os << n.status;
  if (!n.pivot.text.empty()) os << " on " << n.pivot.text;
  os << "\n";
  for (const auto& e : n.errors) os << ind << "    ! " << e << "\n";
  if (!n.contradiction.empty()) os << ind << "    contradiction: " << n.contradiction << "\n";
  if (n.children.empty() && n.contradiction.empty()) {
    if (n.relations.empty()) os << ind << "    no remaining relations\n";
    for (const auto& r : n.relations) os << ind << "    " << r.text << " = 0\n";
  }
  for (const auto& c : n.children) text_case(os, c, depth + 1);
}

// ---- LaTeX ---------------------------------------------------------------

std::string tex_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\textbackslash{}"; break;
      case '{': out += "\\{"; break;
      case '}': out += "\\}"; break;
      case '_': out += "\\_"; break;
      case '^': out += "\\textasciicircum{}"; break;
      case '~': out += "\\textasciitilde{}"; break;
      case '#': out += "\\#"; break;
      case '$': out += "\\$"; break;
      case '%': out += "\\%"; break;
      case '&': out += "\\&"; break;
      default: out += c;
    }
  }
  return out;
}

void tex_equations(std::ostream& os, const std::vector<std::string>& lines) {
  if (lines.empty()) {
    os << "None.\n\n";
    return;
  }
  os << "\\begin{align*}\n";
  for (std::size_t i = 0; i < lines.size(); ++i) os << "  " << lines[i] << (i + 1 < lines.size() ? " \\\\\n" : "\n");
  os << "\\end{align*}\n";
}

void tex_constraints(std::ostream& os, const std::vector<ConstraintEntry>& cs) {
  std::vector<std::string> lines;
  for (const auto& c : cs) lines.push_back(c.expr.latex + " &= 0");
  tex_equations(os, lines);
}

void tex_case(std::ostream& os, const CaseEntry& n, int depth) {
  os << "\\item ";
  if (depth > 0 && !n.assumptions.empty()) os << "$" << assumption_latex(n.assumptions.back()) << "$: ";
  os << tex_escape(n.status);
  if (!n.pivot.text.empty()) os << " on $" << n.pivot.latex << "$";
  os << "\n";
  for (const auto& e : n.errors) os << "\\emph{" << tex_escape(e) << "}\n";
  if (n.children.empty() && n.contradiction.empty()) {
    std::vector<std::string> lines;
    for (const auto& r : n.relations) lines.push_back(r.latex + " &= 0");
    if (!lines.empty()) tex_equations(os, lines);
  }
  if (!n.children.empty()) {
    os << "\\begin{itemize}\n";
    for (const auto& c : n.children) tex_case(os, c, depth + 1);
    os << "\\end{itemize}\n";
  }
}

}  // namespace

ExprEntry entry(const Expr& e) { return {to_string(e), to_latex(e)}; }

std::string model_fingerprint(const ModelDef& m) {
  std::string text = format_model(m);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream os;
  os << "sha256:";
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

AnalysisReport make_report(const std::string& command, const std::string& model_path, const ModelDef& m) {
  AnalysisReport r;
  r.command = command;
  r.model = model_path;
  r.fingerprint = model_fingerprint(m);
  return r;
}

void add_solution_set(AnalysisReport& r, const ModelDef& m, const SolutionSetResult& s) {
  SolvedSummary sum;
  for (const Atom& k : s.solved.keys) sum.keys.push_back({k.str(), entry(s.solved.value(k))});
  sum.pivots = entries(s.solved.pivots);
  for (const ConsequenceRecord& c : s.solved.consequences) {
    sum.consequences.push_back({c.key.str(), m.equations.at(c.equation).label, c.parent.str(),
                                c.var >= 0 ? m.indep.at(static_cast<std::size_t>(c.var)) : std::string()});
  }
  r.solved = std::move(sum);
  ConstraintsSection cs;
  for (const Constraint& c : s.system.constraints) cs.constraints.push_back(constraint_entry(c));
  cs.residual = entry(s.system.residual);
  cs.nonzero = entries(s.system.nonzero);
  for (const Atom& a : s.system.free) cs.free.push_back(a.str());
  r.constraints = std::move(cs);
}

void add_liu(AnalysisReport& r, const LiuResult& lr, const LiuElimination& el, const ModelDef& m) {
  LiuSection s;
  for (const Multiplier& mu : lr.multipliers) {
    LiuSection::Multiplier out{mu.symbol.str(), m.equations.at(mu.equation).label, {}};
    for (const Atom& a : mu.dependency) out.dependency.push_back(a.str());
    s.multipliers.push_back(std::move(out));
  }
  for (const LiuIdentity& id : lr.identities) s.identities.push_back({entry(id.expr), to_string(id.atom)});
  s.residual = entry(lr.residual);
  for (const SolvedMultiplier& sm : el.solved) s.solved.push_back({sm.symbol.str(), entry(sm.value)});
  for (const Atom& a : el.unsolved) s.unsolved.push_back(a.str());
  for (const Constraint& c : el.physical) s.physical.push_back(constraint_entry(c));
  s.unresolved = entries(el.unresolved);
  s.separations = el.separations;
  s.reduced_residual = entry(el.residual);
  r.liu = std::move(s);
}

void add_comparison(AnalysisReport& r, const Comparison& c) {
  r.comparison = ComparisonSection{to_string(c.verdict), entries(c.both), entries(c.only_liu),
                                   entries(c.only_solution_set)};
  for (const std::string& e : c.errors) {
    auto colon = e.find(':');
    r.errors.push_back({e.substr(0, colon), colon == std::string::npos ? e : e.substr(colon + 2)});
  }
}

void add_cases(AnalysisReport& r, const CaseNode& root, const CaseOptions& opt, int depth,
               const std::vector<Expr>& candidates) {
  CasesSection s;
  s.classify.assign(opt.classify.begin(), opt.classify.end());
  for (const Assumption& a : opt.assumptions) s.assumptions.push_back(assumption_entry(a));
  s.force_residual_zero = opt.force_residual_zero;
  s.depth = depth;
  s.candidates = entries(candidates);
  s.pivots = entries(split_pivots(root));
  s.leaves = static_cast<int>(leaves(root).size());
  s.root = case_entry(root);
  r.cases = std::move(s);
}

void add_verify(AnalysisReport& r, const OracleReport& o, std::uint64_t seed) {
  VerifySection v;
  v.trials = o.trials;
  v.seed = seed;
  v.identity_pass = o.identity_pass;
  v.variety_pass = o.variety_pass;
  v.variety_skipped = o.variety_skipped;
  v.rejected = o.rejected;
  v.failures = o.failures;
  v.pass = o.ok();
  r.verify = std::move(v);
}

void add_production(AnalysisReport& r, const std::string& bindings_path, const ProductionSample& p) {
  if (!r.verify) r.verify = VerifySection{};
  r.verify->production =
      ProductionSection{bindings_path, entry(p.production), p.trials, p.zero, p.rejected, p.witnesses};
  r.verify->pass = r.verify->pass && p.zero == p.trials;
}

void add_check(AnalysisReport& r, const std::string& bindings_path, const CheckResult& c) {
  CheckSection s;
  s.bindings = bindings_path;
  for (const CheckItem& i : c.items) {
    s.items.push_back({i.what, entry(i.constraint), entry(i.value), i.pass, i.note});
  }
  s.residual = entry(c.residual);
  s.pass = c.ok();
  r.check = std::move(s);
}

json report_to_json(const AnalysisReport& r, bool timings) {
  json j{{"schema", r.schema},   {"engine_version", r.engine_version}, {"command", r.command},
         {"method", r.method},   {"model", r.model},                   {"fingerprint", r.fingerprint},
         {"errors", r.errors}};
  put(j, "solved", r.solved);
  put(j, "constraints", r.constraints);
  put(j, "liu", r.liu);
  put(j, "comparison", r.comparison);
  put(j, "cases", r.cases);
  put(j, "verify", r.verify);
  put(j, "check", r.check);
  if (timings) j["timings_ms"] = r.timings_ms;
  return j;
}

AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  j.at("schema").get_to(r.schema);
  j.at("engine_version").get_to(r.engine_version);
  j.at("command").get_to(r.command);
  j.at("method").get_to(r.method);
  j.at("model").get_to(r.model);
  j.at("fingerprint").get_to(r.fingerprint);
  j.at("errors").get_to(r.errors);
  get(j, "solved", r.solved);
  get(j, "constraints", r.constraints);
  get(j, "liu", r.liu);
  get(j, "comparison", r.comparison);
  get(j, "cases", r.cases);
  get(j, "verify", r.verify);
  get(j, "check", r.check);
  if (j.contains("timings_ms")) j.at("timings_ms").get_to(r.timings_ms);
  return r;
}

std::string render_json(const AnalysisReport& r, bool timings) { return report_to_json(r, timings).dump(2) + "\n"; }

std::string render_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "entropik " << r.engine_version << " " << r.command << " " << r.model << "\n";
  os << "fingerprint " << r.fingerprint << "\n";
  if (!r.method.empty()) os << "method " << r.method << "\n";
  if (r.solved) {
    std::vector<std::string> keys, pivots;
    for (const auto& k : r.solved->keys) keys.push_back(k.key);
    for (const auto& p : r.solved->pivots) pivots.push_back(p.text);
    os << "\nsolved for: " << (keys.empty() ? "nothing" : join(keys, ", ")) << "\n";
    os << "pivots: " << (pivots.empty() ? "none" : join(pivots, ", ")) << "\n";
    os << "consequences (" << r.solved->consequences.size() << ")" << (r.solved->consequences.empty() ? "" : ":")
       << "\n";
    for (const auto& c : r.solved->consequences) {
      os << "  " << c.key << " = D_" << c.direction << " " << c.parent << " (" << c.equation << ")\n";
    }
  }
  if (r.constraints) {
    os << "\n";
    text_constraints(os, "constraints", r.constraints->constraints);
    os << "residual: " << r.constraints->residual.text << " >= 0\n";
    std::vector<std::string> nz;
    for (const auto& z : r.constraints->nonzero) nz.push_back(z.text + " != 0");
    os << "side conditions: " << (nz.empty() ? "none" : join(nz, ", ")) << "\n";
    os << "free elements: " << join(r.constraints->free, ", ") << "\n";
  }
  if (r.liu) {
    const LiuSection& l = *r.liu;
    os << "\nmultipliers:";
    for (const auto& mu : l.multipliers) {
      os << " " << mu.symbol << " (" << mu.equation;
      if (!mu.dependency.empty()) os << "; " << join(mu.dependency, ", ");
      os << ")";
    }
    os << "\nLiu identities (" << l.identities.size() << "):\n";
    for (std::size_t i = 0; i < l.identities.size(); ++i) {
      os << "  " << std::setw(3) << i + 1 << ". " << l.identities[i].expr.text << " = 0    [coefficient of "
         << l.identities[i].coefficient_of << "]\n";
    }
    os << "solved multipliers (" << l.solved.size() << "):\n";
    for (const auto& s : l.solved) os << "  " << s.symbol << " = " << s.value.text << "\n";
    if (!l.unsolved.empty()) os << "unsolved multipliers: " << join(l.unsolved, ", ") << "\n";
    text_constraints(os, "constraints after elimination", l.physical);
    for (const auto& u : l.unresolved) os << "  unresolved: " << u.text << " = 0\n";
    for (const auto& s : l.separations) os << "  separated: " << s << "\n";
    os << "residual: " << l.reduced_residual.text << " >= 0\n";
  }
  if (r.comparison) {
    const ComparisonSection& c = *r.comparison;
    os << "\nverdict: " << c.verdict << "\n";
    os << "shared relations: " << c.both.size() << "\n";
    os << "only from Mueller-Liu (" << c.only_liu.size() << "):\n";
    for (const auto& e : c.only_liu) os << "  " << e.text << " = 0\n";
    os << "only from the solution set (" << c.only_solution_set.size() << "):\n";
    for (const auto& e : c.only_solution_set) os << "  " << e.text << " = 0\n";
  }
  if (r.cases) {
    const CasesSection& c = *r.cases;
    os << "\nclassifying: " << join(c.classify, ", ") << "\n";
    std::vector<std::string> as;
    for (const auto& a : c.assumptions) as.push_back(assumption_text(a));
    os << "assumptions: " << (as.empty() ? "none" : join(as, ", ")) << "\n";
    if (c.force_residual_zero) os << "residual forced to zero\n";
    std::vector<std::string> ps;
    for (const auto& p : c.pivots) ps.push_back(p.text);
    os << "pivots: " << (ps.empty() ? "none" : join(ps, "; ")) << "\n";
    os << "leaves: " << c.leaves << " (depth cap " << c.depth << ")\n\n";
    text_case(os, c.root, 0);
  }
  if (r.verify) {
    const VerifySection& v = *r.verify;
    os << "\ntrials " << v.trials << ", seed " << v.seed << "\n";
    os << "identity checks:   " << v.identity_pass << "/" << v.trials << "\n";
    os << "on-variety checks: " << v.variety_pass << "/" << v.trials;
    if (v.variety_skipped > 0) os << " (" << v.variety_skipped << " skipped)";
    os << "\n";
    for (const auto& f : v.failures) os << "  failure: " << f << "\n";
    if (v.production) {
      const ProductionSection& p = *v.production;
      os << "entropy production with " << p.bindings << ": " << p.production.text << "\n";
      os << "exactly zero at " << p.zero << "/" << p.trials << " sample points\n";
      for (const auto& w : p.witnesses) os << "  witness: " << w << "\n";
    }
    os << "verdict: " << pass_fail(v.pass) << "\n";
  }
  if (r.check) {
    const CheckSection& c = *r.check;
    os << "\nbindings " << c.bindings << "\n";
    for (const auto& i : c.items) {
      os << "  " << pass_fail(i.pass) << "  " << i.what << ": " << i.constraint.text << " = 0";
      if (!i.pass) os << "\n          evaluates to " << (i.note.empty() ? i.value.text : i.note);
      os << "\n";
    }
    os << "residual: " << c.residual.text << " >= 0 (sign not decided)\n";
    os << "verdict: " << pass_fail(c.pass) << "\n";
  }
  for (const auto& e : r.errors) os << "error[" << e.code << "]: " << e.message << "\n";
  return os.str();
}

std::string render_latex(const AnalysisReport& r) {
  std::ostringstream os;
  os << "\\documentclass{article}\n\\usepackage{amsmath}\n\\allowdisplaybreaks\n\\begin{document}\n";
  os << "\\section*{" << tex_escape(r.command) << ": \\texttt{" << tex_escape(r.model) << "}}\n";
  os << "Fingerprint \\texttt{" << tex_escape(r.fingerprint) << "}";
  if (!r.method.empty()) os << ", method " << tex_escape(r.method);
  os << ".\n\n";
  if (r.solved && !r.solved->consequences.empty()) {
    os << "\\subsection*{Differential consequences}\n";
    std::vector<std::string> keys;
    for (const auto& c : r.solved->consequences) keys.push_back("\\texttt{" + tex_escape(c.key) + "}");
    os << join(keys, ", ") << ".\n\n";
  }
  if (r.constraints) {
    os << "\\subsection*{Constraints}\n";
    tex_constraints(os, r.constraints->constraints);
    os << "\\subsection*{Residual inequality}\n\\[\n  " << r.constraints->residual.latex << " \\geq 0\n\\]\n";
    if (!r.constraints->nonzero.empty()) {
      std::vector<std::string> nz;
      for (const auto& z : r.constraints->nonzero) nz.push_back(z.latex + " \\neq 0");
      os << "Side conditions: $" << join(nz, "$, $") << "$.\n\n";
    }
  }
  if (r.liu) {
    os << "\\subsection*{Liu identities}\n";
    std::vector<std::string> lines;
    for (const auto& id : r.liu->identities) lines.push_back(id.expr.latex + " &= 0");
    tex_equations(os, lines);
    os << "\\subsection*{Multipliers}\n";
    lines.clear();
    for (const auto& s : r.liu->solved) lines.push_back(to_latex(Atom::constit(s.symbol)) + " &= " + s.value.latex);
    tex_equations(os, lines);
    os << "\\subsection*{Constraints after elimination}\n";
    tex_constraints(os, r.liu->physical);
    os << "\\[\n  " << r.liu->reduced_residual.latex << " \\geq 0\n\\]\n";
  }
  if (r.comparison) {
    os << "\\subsection*{Comparison}\nVerdict: " << tex_escape(r.comparison->verdict) << ".\n\n";
    std::vector<std::string> lines;
    for (const auto& e : r.comparison->only_liu) lines.push_back(e.latex + " &= 0");
    if (!lines.empty()) {
      os << "Relations only from the Liu identities:\n";
      tex_equations(os, lines);
    }
  }
  if (r.cases) {
    os << "\\subsection*{Case tree}\n" << r.cases->leaves << " leaves.\n\\begin{itemize}\n";
    tex_case(os, r.cases->root, 0);
    os << "\\end{itemize}\n";
  }
  if (r.verify) {
    const VerifySection& v = *r.verify;
    os << "\\subsection*{Numeric verification}\n";
    os << "Identity checks " << v.identity_pass << "/" << v.trials << ", on-variety checks " << v.variety_pass << "/"
       << v.trials << " (seed " << v.seed << ").\n\n";
    if (v.production) {
      os << "Entropy production with the bindings:\n\\[\n  " << v.production->production.latex << "\n\\]\n";
    }
  }
  if (r.check) {
    os << "\\subsection*{Candidate check}\n\\begin{itemize}\n";
    for (const auto& i : r.check->items) {
      os << "\\item " << pass_fail(i.pass) << ": $" << i.constraint.latex << " = 0$";
      if (!i.pass && i.note.empty()) os << ", evaluates to $" << i.value.latex << "$";
      os << "\n";
    }
    os << "\\end{itemize}\nResidual: $" << r.check->residual.latex << " \\geq 0$.\n\n";
  }
  for (const auto& e : r.errors) os << "\\emph{" << tex_escape(e.code + ": " + e.message) << "}\n\n";
  os << "\\end{document}\n";
  return os.str();
}

}  // namespace entropik
