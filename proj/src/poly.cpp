// SPDX-License-Identifier: Apache-2.0
#include "entropik/poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace entropik {

int lex_compare(const Monomial& a, const Monomial& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].var != b[i].var) return a[i].var < b[i].var ? 1 : -1;
    if (a[i].exp != b[i].exp) return a[i].exp > b[i].exp ? 1 : -1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() > b.size() ? 1 : -1;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].var == b[j].var) {
      out.push_back({a[i].var, a[i].exp + b[j].exp});
      ++i;
      ++j;
    } else if (a[i].var < b[j].var) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(j), b.end());
  return out;
}

bool mono_divides(const Monomial& d, const Monomial& m) {
  std::size_t j = 0;
  for (const auto& f : d) {
    while (j < m.size() && m[j].var < f.var) ++j;
    if (j == m.size() || m[j].var != f.var || m[j].exp < f.exp) return false;
  }
  return true;
}

Monomial mono_div(const Monomial& m, const Monomial& d) {
  Monomial out;
  out.reserve(m.size());
  std::size_t j = 0;
  for (const auto& f : m) {
    if (j < d.size() && d[j].var == f.var) {
      if (f.exp > d[j].exp) out.push_back({f.var, f.exp - d[j].exp});
      ++j;
    } else {
      out.push_back(f);
    }
  }
  return out;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].var == b[j].var) {
      out.push_back({a[i].var, std::min(a[i].exp, b[j].exp)});
      ++i;
      ++j;
    } else if (a[i].var < b[j].var) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].var == b[j].var) {
      out.push_back({a[i].var, std::max(a[i].exp, b[j].exp)});
      ++i;
      ++j;
    } else if (a[i].var < b[j].var) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(j), b.end());
  return out;
}

std::uint32_t mono_degree(const Monomial& m) {
  std::uint32_t d = 0;
  for (const auto& f : m) d += f.exp;
  return d;
}

std::uint32_t mono_exponent(const Monomial& m, std::uint32_t var) {
  auto it = std::lower_bound(m.begin(), m.end(), var,
                             [](const VarPow& f, std::uint32_t v) { return f.var < v; });
  return (it != m.end() && it->var == var) ? it->exp : 0;
}

namespace {

std::vector<std::pair<Atom, std::uint32_t>> canonical_factors(const Monomial& m) {
  std::vector<std::pair<Atom, std::uint32_t>> out;
  out.reserve(m.size());
  for (const auto& f : m) out.emplace_back(Atom::from_id(f.var), f.exp);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return canonical_less(x.first, y.first);
  });
  return out;
}

}  // namespace

int canonical_mono_compare(const Monomial& a, const Monomial& b) {
  if (a == b) return 0;
  std::uint32_t da = mono_degree(a);
  std::uint32_t db = mono_degree(b);
  if (da != db) return da > db ? 1 : -1;
  auto fa = canonical_factors(a);
  auto fb = canonical_factors(b);
  std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (fa[i].first != fb[i].first) {
      // The monomial carrying the canonically smaller atom ranks higher.
      return canonical_less(fa[i].first, fb[i].first) ? 1 : -1;
    }
    if (fa[i].second != fb[i].second) return fa[i].second > fb[i].second ? 1 : -1;
  }
  if (fa.size() == fb.size()) return 0;
  return fa.size() > fb.size() ? 1 : -1;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& f : m) {
    h ^= (static_cast<std::size_t>(f.var) << 8 | f.exp) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Poly::Poly(int c) : Poly(mpq_class(c)) {}

Poly::Poly(const mpq_class& c) {
  if (sgn(c) != 0) terms_.push_back({Monomial{}, c});
}

Poly::Poly(const Atom& a) { terms_.push_back({Monomial{{a.id(), 1}}, mpq_class(1)}); }

Poly Poly::monomial(Monomial m, mpq_class c) {
  Poly p;
  if (sgn(c) != 0) p.terms_.push_back({std::move(m), std::move(c)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  Poly p;
  p.terms_ = std::move(terms);
  p.normalize_order();
  return p;
}

void Poly::normalize_order() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return lex_compare(a.mono, b.mono) > 0; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().mono == t.mono) {
      merged.back().coef += t.coef;
    } else {
      if (!merged.empty() && sgn(merged.back().coef) == 0) merged.pop_back();
      merged.push_back(std::move(t));
    }
  }
  if (!merged.empty() && sgn(merged.back().coef) == 0) merged.pop_back();
  terms_ = std::move(merged);
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty());
}

mpq_class Poly::constant_term() const {
  if (!terms_.empty() && terms_.back().mono.empty()) return terms_.back().coef;
  return 0;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coef = -t.coef;
  return p;
}

namespace {

std::vector<Term> merge_terms(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i == a.size()) {
      c = -1;
    } else if (j == b.size()) {
      c = 1;
    } else {
      c = lex_compare(a[i].mono, b[j].mono);
    }
    if (c > 0) {
      out.push_back(a[i++]);
    } else if (c < 0) {
      out.push_back(b[j]);
      if (subtract) out.back().coef = -out.back().coef;
      ++j;
    } else {
      mpq_class s = subtract ? mpq_class(a[i].coef - b[j].coef) : mpq_class(a[i].coef + b[j].coef);
      if (sgn(s) != 0) out.push_back({a[i].mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

Poly& Poly::operator+=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  terms_ = merge_terms(terms_, o.terms_, false);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.is_zero()) return *this;
  terms_ = merge_terms(terms_, o.terms_, true);
  return *this;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r = a;
  r += b;
  return r;
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly r = a;
  r -= b;
  return r;
}

Poly Poly::times_monomial(const Monomial& m, const mpq_class& c) const {
  if (sgn(c) == 0) return Poly();
  Poly p;
  p.terms_.reserve(terms_.size());
  // Multiplying by a monomial preserves a monomial order.
  for (const auto& t : terms_) p.terms_.push_back({mono_mul(t.mono, m), t.coef * c});
  return p;
}

Poly Poly::div_monomial(const Monomial& m) const {
  if (m.empty()) return *this;
  Poly p;
  p.terms_.reserve(terms_.size());
  for (const auto& t : terms_) p.terms_.push_back({mono_div(t.mono, m), t.coef});
  return p;
}

Poly Poly::scaled(const mpq_class& c) const {
  if (sgn(c) == 0) return Poly();
  Poly p = *this;
  for (auto& t : p.terms_) t.coef *= c;
  return p;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.terms_.size() == 1) return b.times_monomial(a.terms_[0].mono, a.terms_[0].coef);
  if (b.terms_.size() == 1) return a.times_monomial(b.terms_[0].mono, b.terms_[0].coef);
  const Poly& small = a.terms_.size() <= b.terms_.size() ? a : b;
  const Poly& large = a.terms_.size() <= b.terms_.size() ? b : a;
  std::unordered_map<Monomial, mpq_class, MonomialHash> acc;
  acc.reserve(small.terms_.size() * large.terms_.size());
  for (const auto& s : small.terms_) {
    for (const auto& l : large.terms_) {
      auto [it, inserted] = acc.try_emplace(mono_mul(s.mono, l.mono));
      if (inserted) {
        it->second = s.coef * l.coef;
      } else {
        it->second += s.coef * l.coef;
      }
    }
  }
  std::vector<Term> terms;
  terms.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (sgn(c) != 0) terms.push_back({m, std::move(c)});
  }
  Poly r;
  r.terms_ = std::move(terms);
  std::sort(r.terms_.begin(), r.terms_.end(),
            [](const Term& x, const Term& y) { return lex_compare(x.mono, y.mono) > 0; });
  return r;
}

Poly Poly::pow(unsigned n) const {
  Poly result(1);
  Poly base = *this;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coef != b.terms_[i].coef) return false;
  }
  return true;
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return {};
  Monomial g = terms_[0].mono;
  for (std::size_t i = 1; i < terms_.size() && !g.empty(); ++i) g = mono_gcd(g, terms_[i].mono);
  return g;
}

const Term& Poly::canonical_leading() const {
  if (terms_.empty()) throw std::logic_error("canonical_leading of zero polynomial");
  const Term* best = &terms_[0];
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    if (canonical_mono_compare(terms_[i].mono, best->mono) > 0) best = &terms_[i];
  }
  return *best;
}

std::set<std::uint32_t> Poly::vars() const {
  std::set<std::uint32_t> out;
  for (const auto& t : terms_) {
    for (const auto& f : t.mono) out.insert(f.var);
  }
  return out;
}

bool Poly::contains_var(std::uint32_t var) const {
  for (const auto& t : terms_) {
    if (mono_exponent(t.mono, var) > 0) return true;
  }
  return false;
}

std::uint32_t Poly::degree_in(std::uint32_t var) const {
  std::uint32_t d = 0;
  for (const auto& t : terms_) d = std::max(d, mono_exponent(t.mono, var));
  return d;
}

Poly Poly::partial(std::uint32_t var) const {
  Poly p;
  for (const auto& t : terms_) {
    std::uint32_t e = mono_exponent(t.mono, var);
    if (e == 0) continue;
    Monomial m = mono_div(t.mono, Monomial{{var, 1}});
    p.terms_.push_back({std::move(m), t.coef * e});
  }
  // Dividing every term by the same variable keeps the lexicographic order.
  return p;
}

Poly Poly::coefficient(std::uint32_t var, std::uint32_t k) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (mono_exponent(t.mono, var) != k) continue;
    out.push_back({k == 0 ? t.mono : mono_div(t.mono, Monomial{{var, k}}), t.coef});
  }
  return from_terms(std::move(out));
}

std::size_t Poly::hash() const {
  MonomialHash mh;
  std::size_t h = terms_.size();
  for (const auto& t : terms_) {
    h = h * 1000003ULL ^ mh(t.mono);
    h = h * 31ULL ^ std::hash<std::string>()(t.coef.get_str());
  }
  return h;
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("division by the zero polynomial");
  if (a.is_zero()) return Poly();
  if (b.is_monomial()) {
    const Term& lt = b.leading();
    std::vector<Term> q;
    q.reserve(a.size());
    for (const auto& t : a.terms()) {
      if (!mono_divides(lt.mono, t.mono)) return std::nullopt;
      q.push_back({mono_div(t.mono, lt.mono), t.coef / lt.coef});
    }
    return Poly::from_terms(std::move(q));
  }
  // Cheap degree test before the full division.
  for (std::uint32_t v : b.vars()) {
    if (a.degree_in(v) < b.degree_in(v)) return std::nullopt;
  }
  const Term& lt = b.leading();
  Poly r = a;
  std::vector<Term> q;
  while (!r.is_zero()) {
    const Term& rt = r.leading();
    if (!mono_divides(lt.mono, rt.mono)) return std::nullopt;
    Monomial m = mono_div(rt.mono, lt.mono);
    mpq_class c = rt.coef / lt.coef;
    r -= b.times_monomial(m, c);
    q.push_back({std::move(m), std::move(c)});
  }
  return Poly::from_terms(std::move(q));
}

Poly make_monic(const Poly& p) {
  if (p.is_zero()) return p;
  mpq_class c = p.canonical_leading().coef;
  if (c == 1) return p;
  return p.scaled(1 / c);
}

}  // namespace entropik
