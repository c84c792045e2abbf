// SPDX-License-Identifier: Apache-2.0
#include "entropik/model.hpp"

#include <algorithm>
#include <functional>

namespace entropik {

namespace ast {

namespace {

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

// Binding strength used by the formatter.
int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::add:
    case Kind::sub:
      return 1;
    case Kind::mul:
    case Kind::div:
      return 2;
    case Kind::neg:
      return 3;
    case Kind::pow:
      return 4;
    default:
      return 5;
  }
}

}  // namespace

NodePtr number(const mpq_class& v) {
  Node n;
  n.kind = Kind::number;
  n.value = v;
  return make(std::move(n));
}

NodePtr symbol(const Atom& a) {
  Node n;
  n.kind = Kind::symbol;
  n.atom = a;
  return make(std::move(n));
}

NodePtr negate(NodePtr a) {
  Node n;
  n.kind = Kind::neg;
  n.lhs = std::move(a);
  return make(std::move(n));
}

NodePtr binary(Kind k, NodePtr a, NodePtr b) {
  Node n;
  n.kind = k;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

NodePtr power(NodePtr base, int exponent) {
  Node n;
  n.kind = Kind::pow;
  n.lhs = std::move(base);
  n.exponent = exponent;
  return make(std::move(n));
}

NodePtr deriv(int var, NodePtr child) {
  Node n;
  n.kind = Kind::deriv;
  n.var = var;
  n.lhs = std::move(child);
  return make(std::move(n));
}

bool equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::number:
      return a->value == b->value;
    case Kind::symbol:
      return a->atom == b->atom;
    case Kind::pow:
      return a->exponent == b->exponent && equal(a->lhs, b->lhs);
    case Kind::deriv:
      return a->var == b->var && equal(a->lhs, b->lhs);
    case Kind::neg:
      return equal(a->lhs, b->lhs);
    default:
      return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

Expr evaluate(const NodePtr& n, const JetContext& ctx) {
  switch (n->kind) {
    case Kind::number:
      return Expr(n->value);
    case Kind::symbol:
      return Expr(n->atom);
    case Kind::neg:
      return -evaluate(n->lhs, ctx);
    case Kind::add:
      return evaluate(n->lhs, ctx) + evaluate(n->rhs, ctx);
    case Kind::sub:
      return evaluate(n->lhs, ctx) - evaluate(n->rhs, ctx);
    case Kind::mul:
      return evaluate(n->lhs, ctx) * evaluate(n->rhs, ctx);
    case Kind::div:
      return evaluate(n->lhs, ctx) / evaluate(n->rhs, ctx);
    case Kind::pow:
      return evaluate(n->lhs, ctx).pow(n->exponent);
    case Kind::deriv:
      return total_derivative(evaluate(n->lhs, ctx), n->var, ctx);
  }
  return Expr();
}

std::string format(const NodePtr& n, const std::vector<std::string>& indep) {
  auto wrap = [&](const NodePtr& child, int min_prec) {
    std::string s = format(child, indep);
    return precedence(*child) < min_prec ? "(" + s + ")" : s;
  };
  switch (n->kind) {
    case Kind::number:
      return n->value.get_str();
    case Kind::symbol:
      return n->atom.str();
    case Kind::neg:
      return "-" + wrap(n->lhs, 3);
    case Kind::add:
      return wrap(n->lhs, 1) + " + " + wrap(n->rhs, 2);
    case Kind::sub:
      return wrap(n->lhs, 1) + " - " + wrap(n->rhs, 2);
    case Kind::mul:
      return wrap(n->lhs, 2) + "*" + wrap(n->rhs, 3);
    case Kind::div:
      return wrap(n->lhs, 2) + "/" + wrap(n->rhs, 3);
    case Kind::pow: {
      std::string e = n->exponent < 0 ? "(" + std::to_string(n->exponent) + ")"
                                      : std::to_string(n->exponent);
      return wrap(n->lhs, 5) + "^" + e;
    }
    case Kind::deriv:
      return "d" + indep.at(static_cast<std::size_t>(n->var)) + "(" + format(n->lhs, indep) + ")";
  }
  return "";
}

}  // namespace ast

std::vector<std::string> ConstitDecl::labels() const {
  std::vector<std::string> out;
  out.reserve(args.size());
  for (const auto& a : args) out.push_back(a.str());
  return out;
}

JetContext ModelDef::context() const {
  JetContext ctx;
  ctx.indep = indep;
  for (const auto& c : constit) ctx.constit[c.name] = ConstitSignature{c.args, c.labels()};
  return ctx;
}

const ConstitDecl* ModelDef::find_constit(const std::string& name) const {
  for (const auto& c : constit) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool ModelDef::is_field(const std::string& name) const {
  return std::find(fields.begin(), fields.end(), name) != fields.end();
}

Atom ModelDef::jet(const std::string& field, const MultiIndex& index) const {
  return Atom::jet(field, index, indep);
}

std::vector<Atom> ModelDef::dependency_atoms() const {
  std::vector<Atom> out;
  for (const auto& c : constit) {
    for (const auto& a : c.args) {
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
  }
  return out;
}

std::optional<std::size_t> ModelDef::consequence_base(const Atom& a) const {
  if (a.kind() != AtomKind::jet) return std::nullopt;
  for (std::size_t k = 0; k < leading.size(); ++k) {
    if (leading[k].name() == a.name() && dominates_strictly(a.index(), leading[k].index())) return k;
  }
  return std::nullopt;
}

bool ModelDef::is_leading_class(const Atom& a) const {
  if (a.kind() != AtomKind::jet) return false;
  if (std::find(leading.begin(), leading.end(), a) != leading.end()) return true;
  return consequence_base(a).has_value();
}

bool structurally_equal(const ModelDef& a, const ModelDef& b) {
  if (a.indep != b.indep || a.fields != b.fields || !(a.constit == b.constit)) return false;
  if (a.equations.size() != b.equations.size()) return false;
  for (std::size_t i = 0; i < a.equations.size(); ++i) {
    const auto& x = a.equations[i];
    const auto& y = b.equations[i];
    if (x.label != y.label || !ast::equal(x.lhs, y.lhs) || !ast::equal(x.rhs, y.rhs)) return false;
  }
  if (!ast::equal(a.entropy_lhs, b.entropy_lhs) || !ast::equal(a.entropy_rhs, b.entropy_rhs)) {
    return false;
  }
  if (a.leading != b.leading || a.max_order != b.max_order) return false;
  if (a.nonzero.size() != b.nonzero.size()) return false;
  for (std::size_t i = 0; i < a.nonzero.size(); ++i) {
    if (!ast::equal(a.nonzero[i], b.nonzero[i])) return false;
  }
  return true;
}

ExpandedModel expand_model(const ModelDef& m) {
  JetContext ctx = m.context();
  ExpandedModel out;
  for (const auto& eq : m.equations) {
    out.equations.push_back(ast::evaluate(eq.lhs, ctx) - ast::evaluate(eq.rhs, ctx));
  }
  if (m.entropy_lhs) {
    Expr rhs = m.entropy_rhs ? ast::evaluate(m.entropy_rhs, ctx) : Expr(0);
    out.entropy = ast::evaluate(m.entropy_lhs, ctx) - rhs;
  }
  for (const auto& nz : m.nonzero) out.nonzero.push_back(ast::evaluate(nz, ctx));
  return out;
}

std::vector<ModelProblem> validate_model(const ModelDef& m) {
  using Where = ModelProblem::Where;
  std::vector<ModelProblem> problems;
  auto add = [&](Where w, std::size_t i, std::string msg) {
    problems.push_back({w, i, std::move(msg)});
  };
  if (m.indep.empty()) add(Where::general, 0, "model declares no independent variables");
  if (m.fields.empty()) add(Where::general, 0, "model declares no fields");
  if (m.equations.empty()) add(Where::general, 0, "model declares no equations");
  if (!m.entropy_lhs) add(Where::general, 0, "model requires exactly one entropy inequality");
  if (m.leading.size() != m.equations.size()) {
    add(Where::leading, 0,
        "number of leading derivatives (" + std::to_string(m.leading.size()) +
            ") differs from number of equations (" + std::to_string(m.equations.size()) + ")");
  }
  if (m.max_order < 1) add(Where::general, 0, "max_order must be at least 1");
  for (std::size_t k = 0; k < m.leading.size(); ++k) {
    const Atom& l = m.leading[k];
    if (l.kind() != AtomKind::jet || !m.is_field(l.name()) || l.index().size() != m.indep.size()) {
      add(Where::leading, k, "leading derivative '" + l.str() + "' is not a jet variable of a declared field");
      continue;
    }
    if (l.order() == 0) add(Where::leading, k, "leading derivative '" + l.str() + "' must be a derivative");
    for (std::size_t j = 0; j < m.leading.size(); ++j) {
      if (j == k) continue;
      if (m.leading[j] == l && j < k) {
        add(Where::leading, k, "leading derivative '" + l.str() + "' listed twice");
      }
      if (m.leading[j].name() == l.name() && dominates_strictly(l.index(), m.leading[j].index())) {
        add(Where::leading, k,
            "leading derivative '" + l.str() + "' is a derivative of leading derivative '" +
                m.leading[j].str() + "'");
      }
    }
  }
  for (std::size_t c = 0; c < m.constit.size(); ++c) {
    const auto& d = m.constit[c];
    for (std::size_t i = 0; i < d.args.size(); ++i) {
      if (d.args[i].kind() != AtomKind::jet || !m.is_field(d.args[i].name())) {
        add(Where::constit, c, "argument '" + d.args[i].str() + "' of '" + d.name + "' is not a field jet variable");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (d.args[i] == d.args[j]) add(Where::constit, c, "argument '" + d.args[i].str() + "' of '" + d.name + "' repeated");
      }
    }
    for (const auto& [a, b] : d.symmetric) {
      if (a < 0 || b < 0 || a >= static_cast<int>(d.args.size()) ||
          b >= static_cast<int>(d.args.size()) || a == b) {
        add(Where::constit, c, "symmetric pair of '" + d.name + "' references invalid argument slots");
      }
    }
  }
  if (!problems.empty()) return problems;
  // Semantic checks that need the chain-expanded equations.
  ExpandedModel ex;
  try {
    ex = expand_model(m);
  } catch (const EngineError& e) {
    add(Where::general, 0, e.what());
    return problems;
  }
  for (std::size_t k = 0; k < m.leading.size(); ++k) {
    bool found = false;
    for (const auto& e : ex.equations) found = found || e.contains(m.leading[k]);
    if (!found) {
      add(Where::leading, k, "leading derivative '" + m.leading[k].str() + "' appears in no equation");
    }
  }
  for (std::size_t i = 0; i < ex.equations.size(); ++i) {
    bool has_jet = false;
    for (const auto& a : ex.equations[i].atoms()) has_jet = has_jet || a.kind() == AtomKind::jet;
    if (!has_jet) add(Where::equation, i, "equation '" + m.equations[i].label + "' contains no jet variable");
  }
  return problems;
}

void require_valid(const ModelDef& m) {
  auto problems = validate_model(m);
  if (problems.empty()) return;
  std::string msg = problems.front().message;
  for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i].message;
  throw InvalidModel(msg);
}

AtomClasses classify_atoms(const ModelDef& m, const std::vector<Expr>& exprs) {
  std::set<Atom, CanonicalLess> universe;
  int max_order = 0;
  for (const auto& e : exprs) {
    for (const auto& a : e.atoms()) {
      universe.insert(a);
      if (a.kind() == AtomKind::jet) max_order = std::max(max_order, a.order());
    }
  }
  for (const auto& name : m.indep) universe.insert(Atom::indep(name));
  // Every jet variable of every field up to max_order.
  std::function<void(const std::string&, MultiIndex&, std::size_t, int)> enumerate =
      [&](const std::string& f, MultiIndex& idx, std::size_t pos, int left) {
        if (pos == idx.size()) {
          universe.insert(m.jet(f, idx));
          return;
        }
        for (int k = 0; k <= left; ++k) {
          idx[pos] = k;
          enumerate(f, idx, pos + 1, left - k);
        }
        idx[pos] = 0;
      };
  for (const auto& f : m.fields) {
    MultiIndex idx(m.indep.size(), 0);
    enumerate(f, idx, 0, max_order);
  }
  std::vector<Atom> deps = m.dependency_atoms();
  AtomClasses out;
  for (const auto& a : universe) {
    if (a.is_function()) {
      out.excluded.insert(a);
    } else if (m.is_leading_class(a)) {
      out.leading.insert(a);
      if (std::find(deps.begin(), deps.end(), a) != deps.end()) out.conflicts.push_back(a);
    } else if (std::find(deps.begin(), deps.end(), a) != deps.end()) {
      out.dependency.insert(a);
    } else {
      out.free.insert(a);
    }
  }
  return out;
}

}  // namespace entropik
