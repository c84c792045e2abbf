// SPDX-License-Identifier: Apache-2.0
#include "entropik/case_analysis.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <optional>

namespace entropik {

namespace {

bool has_function_atom(const Poly& p) {
  for (std::uint32_t v : p.vars()) {
    if (Atom::from_id(v).is_function()) return true;
  }
  return false;
}

Expr monic(const Poly& p) { return Expr(make_monic(p)); }

bool contains_expr(const std::vector<Expr>& v, const Expr& e) { return std::find(v.begin(), v.end(), e) != v.end(); }

void add_nonzero(std::vector<Expr>& out, const Poly& p) {
  for (Poly& f : split_factors(p)) {
    if (!has_function_atom(f)) continue;
    Expr e = monic(f);
    if (!contains_expr(out, e)) out.push_back(std::move(e));
  }
}

MultiIndex slots_of(const Atom& a, const JetContext& ctx) {
  if (a.kind() == AtomKind::partial) return a.index();
  return MultiIndex(ctx.signature(a.name()).args.size(), 0);
}

// Higher in the elimination ranking: unknowns before classifying functions,
// then higher differential order, then later in canonical order.
bool ranks_above(const Atom& a, const Atom& b, const std::set<std::string>& classify) {
  bool ua = classify.count(a.name()) == 0, ub = classify.count(b.name()) == 0;
  if (ua != ub) return ua;
  if (a.order() != b.order()) return a.order() > b.order();
  return canonical_compare(a, b) > 0;
}

std::optional<Atom> single_atom(const Expr& e) {
  if (!e.is_polynomial() || !e.num().is_monomial()) return std::nullopt;
  const Monomial& mono = e.num().leading().mono;
  if (mono.size() != 1 || mono[0].exp != 1) return std::nullopt;
  return Atom::from_id(mono[0].var);
}

// Atoms in canonical order, then lower degree, then by rendering.
int canonical_expr_compare(const Expr& a, const Expr& b) {
  std::optional<Atom> sa = single_atom(a), sb = single_atom(b);
  if (sa && sb) return canonical_compare(*sa, *sb);
  if (sa || sb) return sa ? -1 : 1;
  if (a.num().size() != b.num().size()) return a.num().size() < b.num().size() ? -1 : 1;
  std::string ta = to_string(a), tb = to_string(b);
  return ta < tb ? -1 : (ta > tb ? 1 : 0);
}

std::string polarity_text(Assumption::Polarity p) { return p == Assumption::Polarity::zero ? "= 0" : "!= 0"; }

class Reducer {
 public:
  Reducer(const ModelDef& m, const CaseOptions& opt) : ctx_(m.context()), opt_(opt) {
    classify_ = opt.classify.empty() ? default_classifying(m) : opt.classify;
  }

  void add_base_nonzero(const Expr& e) { add_nonzero(nonzero_, e.num()); }

  void assume(const Assumption& a) {
    if (a.polarity == Assumption::Polarity::nonzero) {
      add_nonzero(nonzero_, a.expr.num());
      asserted_.push_back(a.expr);
      log("assume " + to_string(a.expr) + " != 0");
    } else {
      push(a.expr, "assume " + to_string(a.expr) + " = 0");
    }
  }

  void push(const Expr& e, std::string why) { queue_.emplace_back(e, std::move(why)); }

  void load(const ReducedSystem& rs) {
    out_ = rs;
    for (const Atom& k : rs.solved_order) keys_by_name_[k.name()].push_back(k);
    for (const Expr& z : rs.nonzero) add_nonzero(nonzero_, z.num());
    refresh_nonzero();
  }

  ReducedSystem run() {
    refresh_nonzero();
    deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(opt_.time_limit_ms);
    int steps = 0;
    while (!out_.inconsistent) {
      while (!queue_.empty() && !out_.inconsistent) {
        if (++steps > opt_.max_steps || out_of_time()) {
          out_.capped = true;
          log(steps > opt_.max_steps ? "step limit reached" : "time limit reached");
          queue_.clear();
          break;
        }
        auto [e, why] = std::move(queue_.front());
        queue_.pop_front();
        process(e, why);
      }
      if (out_.inconsistent || out_.capped || !add_compatibility()) break;
    }
    check_asserted();
    return finish();
  }

  // Reduced, cleared and normalized constraint; zero when it is implied.
  Poly normal(const Expr& e, std::vector<std::string>* notes) {
    Poly p = reduce(e).num();
    if (p.is_zero() || p.size() > static_cast<std::size_t>(opt_.max_terms)) return p;
    std::vector<Expr> cancelled;
    p = constraint_normal_form(Expr(p), nonzero_reduced_, &cancelled).num();
    Monomial generic;
    for (const VarPow& vp : p.monomial_content()) {
      if (!Atom::from_id(vp.var).is_function()) generic.push_back(vp);
    }
    if (!generic.empty()) {
      cancelled.push_back(Expr(Poly::monomial(generic, 1)));
      p = make_monic(p.div_monomial(generic));
    }
    if (notes != nullptr) {
      for (const Expr& c : cancelled) notes->push_back(to_string(c));
    }
    return p;
  }

  // Highest-ranked function atom, when the polynomial is linear in it.
  // Solving for anything lower would put a higher-ranked atom on the
  // right-hand side, and differentiating such rules need not terminate.
  std::optional<Atom> leading(const Poly& p) const {
    std::optional<Atom> best;
    for (std::uint32_t v : p.vars()) {
      Atom a = Atom::from_id(v);
      if (!a.is_function()) continue;
      if (!best || ranks_above(a, *best, classify_)) best = a;
    }
    if (best && p.degree_in(best->id()) != 1) return std::nullopt;
    return best;
  }

  bool known_nonzero(const Poly& f) const {
    if (f.is_constant()) return !f.is_zero();
    if (!has_function_atom(f)) return true;
    return contains_expr(nonzero_reduced_, monic(f));
  }

  std::vector<Poly> blocking(const Poly& coef) const {
    std::vector<Poly> out;
    for (Poly& f : split_factors(coef)) {
      if (!known_nonzero(f)) out.push_back(make_monic(f));
    }
    return out;
  }

  Expr reduce(const Expr& e) const {
    Expr r = substitute(e, out_.solved);
    for (int round = 0; round < 64; ++round) {
      SubstitutionMap derived;
      for (const Atom& a : r.atoms()) {
        if (!a.is_function() || out_.solved.contains(a)) continue;
        auto it = keys_by_name_.find(a.name());
        if (it == keys_by_name_.end()) continue;
        MultiIndex sa = slots_of(a, ctx_);
        const Atom* base = nullptr;
        for (const Atom& k : it->second) {
          if (dominates_strictly(sa, slots_of(k, ctx_)) && (base == nullptr || k.order() > base->order())) base = &k;
        }
        if (base != nullptr) derived.set(a, derivative(*base, *out_.solved.find(*base), sa));
      }
      if (derived.pairs.empty() || out_of_time()) return r;
      r = substitute(substitute(r, derived), out_.solved);
    }
    return r;
  }

 private:
  bool out_of_time() const { return std::chrono::steady_clock::now() > deadline_; }
  std::size_t value_terms_limit() const { return static_cast<std::size_t>(opt_.max_terms) / 4; }

  Expr derivative(const Atom& key, const Expr& value, const MultiIndex& target) const {
    MultiIndex sk = slots_of(key, ctx_);
    const ConstitSignature& sig = ctx_.signature(key.name());
    Expr v = value;
    for (std::size_t j = 0; j < sig.args.size(); ++j) {
      for (int n = sk[j]; n < target[j]; ++n) v = chain_partial(v, sig.args[j], ctx_);
    }
    return v;
  }

  void log(std::string s) {
    out_.certificates.push_back(std::move(s));
  }

  void process(const Expr& e, const std::string& why) {
    std::vector<std::string> notes;
    Poly p = normal(e, &notes);
    if (p.size() > static_cast<std::size_t>(opt_.max_terms)) {
      out_.capped = true;
      log(why + ": " + std::to_string(p.size()) + " terms, kept open unreduced");
      out_.open.push_back(Expr(p));
      return;
    }
    if (p.is_zero()) {
      if (why.rfind("compatibility", 0) == 0) log(why + ": satisfied");
      return;
    }
    std::string cancel;
    for (const auto& n : notes) cancel += (cancel.empty() ? " cancelling " : ", ") + n;
    if (!has_function_atom(p)) {
      out_.inconsistent = true;
      out_.contradiction = why + ": " + to_string(p) + " = 0" + cancel;
      log(out_.contradiction + ", inconsistent");
      return;
    }
    std::optional<Atom> lead = leading(p);
    if (lead) {
      Poly coef = p.coefficient(lead->id(), 1);
      Poly rest = p.coefficient(lead->id(), 0);
      if (coef.size() + rest.size() > value_terms_limit()) {
        out_.capped = true;
        log(why + ": " + std::to_string(p.size()) + " terms, too large to eliminate " + lead->str() + ", kept open");
        out_.open.push_back(Expr(p));
        return;
      }
      if (blocking(coef).empty()) {
        Expr value = Expr::fraction(-rest, coef);
        log(why + ": " + to_string(p) + " = 0" + cancel + " gives " + lead->str() + " = " + to_string(value));
        add_rule(*lead, value);
        return;
      }
    }
    Expr c(p);
    if (!contains_expr(out_.open, c)) {
      log(why + ": " + to_string(p) + " = 0" + cancel + " kept open");
      out_.open.push_back(c);
    }
  }

  void add_rule(const Atom& a, const Expr& value) {
    out_.solved.set(a, value);
    out_.solved_order.push_back(a);
    keys_by_name_[a.name()].push_back(a);
    MultiIndex sa = slots_of(a, ctx_);
    // Keys that are derivatives of the new one become ordinary constraints.
    std::vector<Atom> demoted;
    for (const Atom& k : keys_by_name_[a.name()]) {
      if (k != a && dominates_strictly(slots_of(k, ctx_), sa)) demoted.push_back(k);
    }
    for (const Atom& k : demoted) {
      Expr old = *out_.solved.find(k);
      drop_key(k);
      push(Expr(k) - old, "derivative of " + a.str() + " solved as " + k.str());
    }
    // Keep right-hand sides free of keys and of derivatives of keys.
    for (;;) {
      bool changed = false;
      if (out_of_time()) break;
      for (auto& [k, v] : out_.solved.pairs) {
        if (k == a) continue;
        Expr w = reduce(v);
        if (w.contains(k)) {
          Atom key = k;
          drop_key(key);
          push(Expr(key) - w, "self-reference of " + key.str());
          changed = true;
          break;
        }
        v = std::move(w);
      }
      if (!changed) break;
    }
    for (Expr& c : out_.open) push(c, "revisit");
    out_.open.clear();
    refresh_nonzero();
  }

  void drop_key(const Atom& k) {
    out_.solved.pairs.erase(k);
    auto& v = keys_by_name_[k.name()];
    v.erase(std::remove(v.begin(), v.end(), k), v.end());
    out_.solved_order.erase(std::remove(out_.solved_order.begin(), out_.solved_order.end(), k),
                            out_.solved_order.end());
  }

  void refresh_nonzero() {
    nonzero_reduced_.clear();
    for (const Expr& z : nonzero_) {
      Poly r = reduce(z).num();
      if (r.is_zero()) continue;  // reported by check_asserted
      add_nonzero(nonzero_reduced_, r);
    }
  }

  // Cross derivatives of two solved partials of one function must agree.
  bool add_compatibility() {
    bool added = false;
    for (const auto& [name, keys] : keys_by_name_) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        for (std::size_t j = i + 1; j < keys.size(); ++j) {
          Atom k1 = keys[i], k2 = keys[j];
          std::pair<std::uint32_t, std::uint32_t> id{std::min(k1.id(), k2.id()), std::max(k1.id(), k2.id())};
          if (!compat_done_.insert(id).second) continue;
          MultiIndex s1 = slots_of(k1, ctx_), s2 = slots_of(k2, ctx_), l(s1.size());
          for (std::size_t n = 0; n < l.size(); ++n) l[n] = std::max(s1[n], s2[n]);
          if (total_order(l) > opt_.max_key_order) {
            out_.capped = true;
            log("compatibility of " + k1.str() + " and " + k2.str() + " skipped: order limit");
            continue;
          }
          Expr c = derivative(k1, *out_.solved.find(k1), l) - derivative(k2, *out_.solved.find(k2), l);
          push(c, "compatibility of " + k1.str() + " and " + k2.str());
          added = true;
        }
      }
    }
    return added;
  }

  void check_asserted() {
    if (out_.inconsistent) return;
    for (const Expr& z : asserted_) {
      if (reduce(z).is_zero()) {
        out_.inconsistent = true;
        out_.contradiction = to_string(z) + " != 0 forced to 0";
        log(out_.contradiction + ", inconsistent");
        return;
      }
    }
  }

  ReducedSystem finish() {
    out_.nonzero = nonzero_reduced_;
    return out_;
  }

  JetContext ctx_;
  CaseOptions opt_;
  std::set<std::string> classify_;
  std::vector<Expr> nonzero_;
  std::vector<Expr> nonzero_reduced_;
  std::vector<Expr> asserted_;
  std::deque<std::pair<Expr, std::string>> queue_;
  std::map<std::string, std::vector<Atom>> keys_by_name_;
  std::set<std::pair<std::uint32_t, std::uint32_t>> compat_done_;
  ReducedSystem out_;
  std::chrono::steady_clock::time_point deadline_ = std::chrono::steady_clock::time_point::max();
};

Reducer make_reducer(const ModelDef& m, const ConstraintSystem& cs, const std::vector<Assumption>& assumptions,
                     const CaseOptions& opt) {
  Reducer r(m, opt);
  for (const Expr& z : cs.nonzero) r.add_base_nonzero(z);
  std::vector<Assumption> all = opt.assumptions;
  all.insert(all.end(), assumptions.begin(), assumptions.end());
  for (const Assumption& a : all) {
    if (a.polarity == Assumption::Polarity::nonzero) r.assume(a);
  }
  for (const Assumption& a : all) {
    if (a.polarity == Assumption::Polarity::zero) r.assume(a);
  }
  for (std::size_t i = 0; i < cs.constraints.size(); ++i) {
    r.push(cs.constraints[i].expr, "constraint " + std::to_string(i + 1));
  }
  if (opt.force_residual_zero && !cs.residual_numerator.is_zero()) r.push(Expr(cs.residual_numerator), "residual");
  return r;
}

void count_candidate(std::vector<PivotCandidate>& out, const Expr& e, int n = 1) {
  for (auto& c : out) {
    if (c.expr == e) {
      c.count += n;
      return;
    }
  }
  out.push_back({e, n});
}

void rank(std::vector<PivotCandidate>& v) {
  std::stable_sort(v.begin(), v.end(), [](const PivotCandidate& a, const PivotCandidate& b) {
    if (a.count != b.count) return a.count > b.count;
    return canonical_expr_compare(a.expr, b.expr) < 0;
  });
}

void collect_symbols(const ast::NodePtr& n, std::set<std::string>& out) {
  if (!n) return;
  if (n->kind == ast::Kind::symbol && n->atom.is_function()) out.insert(n->atom.name());
  collect_symbols(n->lhs, out);
  collect_symbols(n->rhs, out);
}

void collect_leaves(const CaseNode& n, std::vector<const CaseNode*>& out) {
  if (n.children.empty()) {
    if (n.status != CaseStatus::closed_inconsistent) out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

}  // namespace

std::string to_string(const Assumption& a) { return to_string(a.expr) + " " + polarity_text(a.polarity); }

std::string to_string(CaseStatus s) {
  switch (s) {
    case CaseStatus::open:
      return "open";
    case CaseStatus::closed_inconsistent:
      return "closed-inconsistent";
    case CaseStatus::leaf:
      return "leaf";
    case CaseStatus::split:
      return "split";
  }
  return "?";
}

std::set<std::string> default_classifying(const ModelDef& m) {
  std::size_t fewest = SIZE_MAX, most = 0;
  for (const auto& d : m.constit) {
    fewest = std::min(fewest, d.args.size());
    most = std::max(most, d.args.size());
  }
  std::set<std::string> out;
  if (fewest < most) {
    for (const auto& d : m.constit) {
      if (d.args.size() == fewest) out.insert(d.name);
    }
    return out;
  }
  collect_symbols(m.entropy_lhs, out);
  collect_symbols(m.entropy_rhs, out);
  return out;
}

std::vector<Expr> ReducedSystem::relations() const {
  std::vector<Expr> out;
  for (const Atom& k : solved_order) {
    const Expr& v = *solved.find(k);
    out.push_back(monic(Poly(k) * v.den() - v.num()));
  }
  for (const Expr& c : open) out.push_back(c);
  return out;
}

std::vector<std::string> ReducedSystem::fingerprint() const {
  std::vector<std::string> out;
  for (const Expr& e : relations()) out.push_back(to_string(e));
  std::sort(out.begin(), out.end());
  if (inconsistent) out.push_back("inconsistent");
  return out;
}

ReducedSystem apply_assumptions(const ModelDef& m, const ConstraintSystem& cs,
                                const std::vector<Assumption>& assumptions, const CaseOptions& opt) {
  return make_reducer(m, cs, assumptions, opt).run();
}

Expr reduce_in(const ModelDef& m, const ReducedSystem& rs, const Expr& e, const CaseOptions& opt) {
  Reducer r(m, opt);
  r.load(rs);
  return Expr(r.normal(e, nullptr));
}

std::vector<Assumption> nondegenerate_assumptions(const ModelDef& m, const ConstraintSystem& cs,
                                                  const CaseOptions& opt) {
  std::set<std::string> classify = opt.classify.empty() ? default_classifying(m) : opt.classify;
  std::vector<Expr> known;
  for (const Expr& z : cs.nonzero) add_nonzero(known, z.num());
  std::vector<Assumption> out;
  JetContext ctx = m.context();
  for (const Expr& z : known) {
    std::optional<Atom> a = single_atom(z);
    if (!a || a->kind() != AtomKind::partial || a->order() != 1 || classify.count(a->name()) == 0) continue;
    const ConstitSignature& sig = ctx.signature(a->name());
    std::size_t slot = std::find(a->index().begin(), a->index().end(), 1) - a->index().begin();
    const Atom& arg = sig.args[slot];
    for (const std::string& g : classify) {
      const ConstitDecl* d = m.find_constit(g);
      if (d == nullptr) continue;
      auto it = std::find(d->args.begin(), d->args.end(), arg);
      if (it == d->args.end()) continue;
      MultiIndex slots(d->args.size(), 0);
      slots[static_cast<std::size_t>(it - d->args.begin())] = 1;
      Expr e(ctx.partial_atom(g, slots));
      if (contains_expr(known, e)) continue;
      bool dup = std::any_of(out.begin(), out.end(), [&](const Assumption& x) { return x.expr == e; });
      if (!dup) out.push_back({e, Assumption::Polarity::nonzero});
    }
  }
  return out;
}

std::vector<PivotCandidate> blocking_factors(const ModelDef& m, const ReducedSystem& rs, const CaseOptions& opt) {
  Reducer r(m, opt);
  for (const Expr& z : rs.nonzero) r.add_base_nonzero(z);
  r.run();
  std::vector<PivotCandidate> out;
  for (const Expr& c : rs.open) {
    std::optional<Atom> lead = r.leading(c.num());
    if (!lead) continue;
    for (const Poly& f : r.blocking(c.num().coefficient(lead->id(), 1))) count_candidate(out, Expr(f));
  }
  rank(out);
  return out;
}

std::vector<PivotCandidate> pivot_candidates(const ModelDef& m, const ConstraintSystem& cs, const CaseOptions& opt) {
  std::vector<PivotCandidate> out;
  std::vector<Expr> known;
  for (const Expr& z : cs.nonzero) add_nonzero(known, z.num());
  for (const Assumption& a : opt.assumptions) {
    if (a.polarity == Assumption::Polarity::nonzero) add_nonzero(known, a.expr.num());
  }
  std::vector<Expr> exprs = cs.constraint_exprs();
  if (opt.force_residual_zero && !cs.residual_numerator.is_zero()) exprs.push_back(Expr(cs.residual_numerator));
  for (const Expr& e : exprs) {
    for (const Term& t : e.num().terms()) {
      for (const VarPow& vp : t.mono) {
        Atom a = Atom::from_id(vp.var);
        if (a.kind() != AtomKind::partial) continue;
        Expr f(a);
        if (!contains_expr(known, f)) count_candidate(out, f);
      }
    }
  }
  for (const Expr& z : cs.nonzero) {
    for (const Poly& f : split_factors(z.num())) {
      if (has_function_atom(f)) count_candidate(out, monic(f));
    }
  }
  ReducedSystem root = apply_assumptions(m, cs, {}, opt);
  for (const auto& c : blocking_factors(m, root, opt)) count_candidate(out, c.expr, c.count);
  rank(out);
  return out;
}

std::vector<Expr> pivot_exprs(const std::vector<PivotCandidate>& c) {
  std::vector<Expr> out;
  for (const auto& p : c) out.push_back(p.expr);
  return out;
}

CaseNode build_tree(const ModelDef& m, const ConstraintSystem& cs, const std::vector<Expr>& pivots, int depth_cap,
                    const CaseOptions& opt) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(opt.tree_time_limit_ms);
  std::function<CaseNode(std::vector<Assumption>, ReducedSystem, int)> grow =
      [&](std::vector<Assumption> path, ReducedSystem rs, int depth) {
        CaseNode node;
        node.assumptions = opt.assumptions;
        node.assumptions.insert(node.assumptions.end(), path.begin(), path.end());
        node.system = std::move(rs);
        if (node.system.inconsistent) {
          node.status = CaseStatus::closed_inconsistent;
          return node;
        }
        node.status = node.system.capped ? CaseStatus::open : CaseStatus::leaf;
        std::vector<PivotCandidate> blocking = blocking_factors(m, node.system, opt);
        if (blocking.empty()) return node;
        Reducer reducer = make_reducer(m, cs, path, opt);
        reducer.run();
        for (const Expr& p : pivots) {
          Poly reduced = reducer.normal(p, nullptr);
          if (reduced.is_zero() || !has_function_atom(reduced)) continue;
          bool relevant = std::any_of(blocking.begin(), blocking.end(),
                                      [&](const PivotCandidate& b) { return b.expr == Expr(reduced); });
          if (!relevant) continue;
          if (std::chrono::steady_clock::now() > deadline) {
            node.status = CaseStatus::open;
            node.errors.push_back("time limit reached before splitting on " + to_string(p));
            return node;
          }
          std::vector<Assumption> nz = path, z = path;
          nz.push_back({p, Assumption::Polarity::nonzero});
          z.push_back({p, Assumption::Polarity::zero});
          ReducedSystem rnz = apply_assumptions(m, cs, nz, opt);
          ReducedSystem rz = apply_assumptions(m, cs, z, opt);
          if (rnz.fingerprint() == rz.fingerprint()) continue;
          if (depth >= depth_cap) {
            node.status = CaseStatus::open;
            node.errors.push_back("DepthCapExceeded: split on " + to_string(p) + " needed below depth " +
                                  std::to_string(depth_cap));
            return node;
          }
          node.pivot = p;
          node.status = CaseStatus::split;
          node.children.push_back(grow(nz, std::move(rnz), depth + 1));
          node.children.push_back(grow(z, std::move(rz), depth + 1));
          return node;
        }
        return node;
      };
  return grow({}, apply_assumptions(m, cs, {}, opt), 0);
}

std::vector<const CaseNode*> leaves(const CaseNode& root) {
  std::vector<const CaseNode*> out;
  collect_leaves(root, out);
  return out;
}

std::vector<Expr> split_pivots(const CaseNode& root) {
  std::vector<Expr> out;
  std::function<void(const CaseNode&)> walk = [&](const CaseNode& n) {
    if (n.is_inner() && !contains_expr(out, n.pivot)) out.push_back(n.pivot);
    for (const auto& c : n.children) walk(c);
  };
  walk(root);
  return out;
}

}  // namespace entropik
