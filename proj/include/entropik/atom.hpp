// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace entropik {

// Per-variable derivative counts.  For a jet variable there is one entry per
// independent variable; for a constitutive partial there is one entry per
// argument slot of the constitutive function.
using MultiIndex = std::vector<int>;

int total_order(const MultiIndex& alpha);

// True when beta >= alpha componentwise and beta != alpha.
bool dominates_strictly(const MultiIndex& beta, const MultiIndex& alpha);

enum class AtomKind : std::uint8_t {
  indep = 0,    // independent variable (t, x, ...)
  jet = 1,      // field derivative rho_tx
  constit = 2,  // constitutive symbol p
  partial = 3,  // constitutive partial dp/drho
};

struct AtomInfo {
  std::uint32_t id = 0;
  AtomKind kind = AtomKind::indep;
  std::string name;                 // variable, field or constitutive name
  MultiIndex index;                 // jet multi-index or partial slot counts
  std::vector<std::string> labels;  // indep names (jet) or argument names (partial)
  std::string display;              // plain-text rendering, e.g. rho_tx, dq1/drho
};

// Interned symbol.  Two atoms compare equal iff they are structurally equal;
// the interner is safe to use from several threads at once.
class Atom {
 public:
  Atom() = default;

  static Atom indep(std::string_view name);
  static Atom jet(std::string_view field, MultiIndex index,
                  std::span<const std::string> indep_names);
  static Atom constit(std::string_view name);
  // A zero slot vector yields the plain constitutive symbol.
  static Atom partial(std::string_view name, MultiIndex slots,
                      std::span<const std::string> arg_labels);
  static Atom from_id(std::uint32_t id);

  bool valid() const { return info_ != nullptr; }
  std::uint32_t id() const { return info_->id; }
  const AtomInfo& info() const { return *info_; }
  AtomKind kind() const { return info_->kind; }
  const std::string& name() const { return info_->name; }
  const MultiIndex& index() const { return info_->index; }
  const std::vector<std::string>& labels() const { return info_->labels; }
  const std::string& str() const { return info_->display; }
  int order() const { return total_order(info_->index); }

  bool is_function() const {
    return kind() == AtomKind::constit || kind() == AtomKind::partial;
  }

  // Same field / constitutive symbol with a different multi-index.
  Atom with_index(MultiIndex index) const;

  friend bool operator==(const Atom& a, const Atom& b) { return a.info_ == b.info_; }
  // Internal (registration) order; cheap, deterministic for a given run.
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    return a.id() <=> b.id();
  }

 private:
  explicit Atom(const AtomInfo* info) : info_(info) {}
  const AtomInfo* info_ = nullptr;
};

// Canonical, registration-independent total order:
// IndepVar < JetVar < ConstitSym < ConstitPartial, then by name, order and index.
int canonical_compare(const Atom& a, const Atom& b);
inline bool canonical_less(const Atom& a, const Atom& b) {
  return canonical_compare(a, b) < 0;
}

struct CanonicalLess {
  bool operator()(const Atom& a, const Atom& b) const { return canonical_less(a, b); }
};

std::size_t interned_atom_count();

}  // namespace entropik

template <>
struct std::hash<entropik::Atom> {
  std::size_t operator()(const entropik::Atom& a) const noexcept { return a.id(); }
};
