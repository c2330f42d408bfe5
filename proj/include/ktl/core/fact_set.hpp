#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ktl/core/triple.hpp"
#include "ktl/util/error.hpp"
#include "ktl/util/rng.hpp"

namespace ktl {

// Deduplicated set of fact triples with per-field phrase pools. Pools keep
// first-seen order so sampling is reproducible.
class FactSet {
 public:
  // Returns true when the triple was new.
  bool insert(const Triple& triple) {
    triple.validate();
    if (!members_.insert(triple).second) return false;
    order_.push_back(triple);
    for (auto d : kAllDirections) {
      const auto i = index_of(d);
      const Phrase& p = triple.field(d);
      if (pool_index_[i].emplace(p.text(), pools_[i].size()).second) pools_[i].push_back(p);
    }
    return true;
  }

  bool contains(const Triple& triple) const { return members_.count(triple) > 0; }
  std::size_t size() const noexcept { return order_.size(); }
  bool empty() const noexcept { return order_.empty(); }

  // Triples in insertion order.
  const std::vector<Triple>& triples() const noexcept { return order_; }

  // Distinct values observed in the field generated by `d`.
  const std::vector<Phrase>& pool(Direction d) const noexcept { return pools_[index_of(d)]; }

  friend bool operator==(const FactSet& a, const FactSet& b) {
    if (a.size() != b.size()) return false;
    return std::all_of(a.order_.begin(), a.order_.end(), [&](const Triple& t) { return b.contains(t); });
  }

 private:
  std::unordered_set<Triple, TripleHash> members_;
  std::vector<Triple> order_;
  std::array<std::vector<Phrase>, 3> pools_;
  std::array<std::unordered_map<std::string, std::size_t>, 3> pool_index_;
};

// Draws k corruption phrases for the field generated by `direction`,
// uniformly without replacement from that field's pool, such that every
// substitution is a non-member of `facts`. Rejection sampling runs for at
// most 100*k draws; any shortfall is filled from an exhaustive scan of the
// remaining valid candidates. Throws kInsufficientNegatives when fewer than
// k valid candidates exist.
inline std::vector<Phrase> sample_negatives(const FactSet& facts, const Triple& triple, Direction direction,
                                            std::size_t k, std::uint64_t seed) {
  if (k == 0) fail(ErrorKind::kValidation, "sample_negatives: k must be >= 1");
  const auto& pool = facts.pool(direction);
  const Phrase& truth = triple.field(direction);

  auto valid = [&](std::size_t idx) {
    const Phrase& p = pool[idx];
    return !(p == truth) && !facts.contains(triple.with_field(direction, p));
  };

  Rng rng(seed);
  std::vector<Phrase> out;
  out.reserve(k);
  std::unordered_set<std::size_t> taken;
  const std::size_t budget = 100 * k;
  for (std::size_t attempt = 0; attempt < budget && out.size() < k && !pool.empty(); ++attempt) {
    const auto idx = static_cast<std::size_t>(uniform_index(rng, pool.size()));
    if (taken.count(idx) || !valid(idx)) continue;
    taken.insert(idx);
    out.push_back(pool[idx]);
  }
  if (out.size() < k) {
    std::vector<std::size_t> remaining;
    for (std::size_t idx = 0; idx < pool.size(); ++idx) {
      if (!taken.count(idx) && valid(idx)) remaining.push_back(idx);
    }
    if (out.size() + remaining.size() < k) {
      fail(ErrorKind::kInsufficientNegatives,
           "insufficient negatives: need " + std::to_string(k) + " corruptions of the " +
               std::string(to_string(direction)) + " field, only " + std::to_string(out.size() + remaining.size()) +
               " valid candidates");
    }
    // Partial Fisher-Yates over the remaining candidates.
    for (std::size_t i = 0; out.size() < k; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng, remaining.size() - i));
      std::swap(remaining[i], remaining[j]);
      out.push_back(pool[remaining[i]]);
    }
  }
  return out;
}

}  // namespace ktl
