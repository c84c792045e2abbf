// SPDX-License-Identifier: Apache-2.0
#include "entropik/atom.hpp"

#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace entropik {

int total_order(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

bool dominates_strictly(const MultiIndex& beta, const MultiIndex& alpha) {
  if (beta.size() != alpha.size()) return false;
  bool differs = false;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] < alpha[i]) return false;
    if (beta[i] != alpha[i]) differs = true;
  }
  return differs;
}

namespace {

// Atoms live in fixed-size blocks that are never moved, so an AtomInfo
// pointer stays valid for the lifetime of the process and lookups by id need
// no lock: only registration takes the mutex.
constexpr std::size_t kBlockBits = 12;
constexpr std::size_t kBlockSize = std::size_t{1} << kBlockBits;
constexpr std::size_t kMaxBlocks = 4096;

class Interner {
 public:
  const AtomInfo* intern(AtomInfo proto) {
    std::string key = make_key(proto);
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = by_key_.find(key); it != by_key_.end()) return it->second;
    std::uint32_t id = count_.load(std::memory_order_relaxed);
    std::size_t block = id >> kBlockBits;
    if (block >= kMaxBlocks) throw std::length_error("atom table exhausted");
    AtomInfo* storage = blocks_[block].load(std::memory_order_relaxed);
    if (storage == nullptr) {
      owned_.push_back(std::make_unique<AtomInfo[]>(kBlockSize));
      storage = owned_.back().get();
      blocks_[block].store(storage, std::memory_order_release);
    }
    AtomInfo& slot = storage[id & (kBlockSize - 1)];
    slot = std::move(proto);
    slot.id = id;
    count_.store(id + 1, std::memory_order_release);
    by_key_.emplace(std::move(key), &slot);
    return &slot;
  }

  const AtomInfo* lookup(std::uint32_t id) const {
    if (id >= count_.load(std::memory_order_acquire)) {
      throw std::out_of_range("unknown atom id");
    }
    return &blocks_[id >> kBlockBits].load(std::memory_order_acquire)[id & (kBlockSize - 1)];
  }

  std::size_t size() const { return count_.load(std::memory_order_acquire); }

 private:
  static std::string make_key(const AtomInfo& a) {
    std::string key(1, static_cast<char>('0' + static_cast<int>(a.kind)));
    key += a.name;
    key += '|';
    for (int v : a.index) {
      key += std::to_string(v);
      key += ',';
    }
    key += '|';
    for (const auto& l : a.labels) {
      key += l;
      key += ',';
    }
    return key;
  }

  std::mutex mu_;
  std::unordered_map<std::string, const AtomInfo*> by_key_;
  std::array<std::atomic<AtomInfo*>, kMaxBlocks> blocks_{};
  std::vector<std::unique_ptr<AtomInfo[]>> owned_;
  std::atomic<std::uint32_t> count_{0};
};

Interner& interner() {
  static Interner instance;
  return instance;
}

std::string jet_display(std::string_view field, const MultiIndex& index,
                        std::span<const std::string> indep_names) {
  std::string out(field);
  std::string suffix;
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (int k = 0; k < index[i]; ++k) suffix += indep_names[i];
  }
  if (!suffix.empty()) out += "_" + suffix;
  return out;
}

std::string partial_display(std::string_view name, const MultiIndex& slots,
                            std::span<const std::string> labels) {
  std::string out = "d" + std::string(name);
  for (std::size_t j = 0; j < slots.size(); ++j) {
    for (int k = 0; k < slots[j]; ++k) out += "/d" + labels[j];
  }
  return out;
}

int compare_strings(const std::string& a, const std::string& b) {
  int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

Atom Atom::indep(std::string_view name) {
  AtomInfo a;
  a.kind = AtomKind::indep;
  a.name = name;
  a.display = name;
  return Atom(interner().intern(std::move(a)));
}

Atom Atom::jet(std::string_view field, MultiIndex index,
               std::span<const std::string> indep_names) {
  if (index.size() != indep_names.size()) {
    throw std::invalid_argument("jet multi-index length differs from independent variable count");
  }
  for (int v : index) {
    if (v < 0) throw std::invalid_argument("negative derivative order");
  }
  AtomInfo a;
  a.kind = AtomKind::jet;
  a.name = field;
  a.display = jet_display(field, index, indep_names);
  a.index = std::move(index);
  a.labels.assign(indep_names.begin(), indep_names.end());
  return Atom(interner().intern(std::move(a)));
}

Atom Atom::constit(std::string_view name) {
  AtomInfo a;
  a.kind = AtomKind::constit;
  a.name = name;
  a.display = name;
  return Atom(interner().intern(std::move(a)));
}

Atom Atom::partial(std::string_view name, MultiIndex slots,
                   std::span<const std::string> arg_labels) {
  if (slots.size() != arg_labels.size()) {
    throw std::invalid_argument("partial slot count differs from declared arity");
  }
  if (total_order(slots) == 0) return constit(name);
  AtomInfo a;
  a.kind = AtomKind::partial;
  a.name = name;
  a.display = partial_display(name, slots, arg_labels);
  a.index = std::move(slots);
  a.labels.assign(arg_labels.begin(), arg_labels.end());
  return Atom(interner().intern(std::move(a)));
}

Atom Atom::from_id(std::uint32_t id) { return Atom(interner().lookup(id)); }

Atom Atom::with_index(MultiIndex index) const {
  switch (kind()) {
    case AtomKind::jet:
      return jet(name(), std::move(index), labels());
    case AtomKind::partial:
      return partial(name(), std::move(index), labels());
    default:
      throw std::logic_error("with_index on an atom without multi-index");
  }
}

int canonical_compare(const Atom& a, const Atom& b) {
  if (a == b) return 0;
  const AtomInfo& x = a.info();
  const AtomInfo& y = b.info();
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  if (int c = compare_strings(x.name, y.name); c != 0) return c;
  int ox = total_order(x.index);
  int oy = total_order(y.index);
  if (ox != oy) return ox < oy ? -1 : 1;
  if (x.index != y.index) {
    if (x.kind == AtomKind::jet) {
      // Time-like (first) variables first: rho_t before rho_x.
      return x.index > y.index ? -1 : 1;
    }
    return x.index < y.index ? -1 : 1;
  }
  if (x.labels != y.labels) return x.labels < y.labels ? -1 : 1;
  return compare_strings(x.display, y.display);
}

std::size_t interned_atom_count() { return interner().size(); }

}  // namespace entropik
