#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ktl/util/error.hpp"
#include "ktl/util/rng.hpp"

namespace ktl::graph {

struct SampleConfig {
  std::size_t cap = 1'000'000;
  std::uint64_t seed = 0;
};

// Single-pass uniform sampling without replacement (Algorithm R).
// Memory is O(cap) regardless of stream length.
template <class T>
class ReservoirSampler {
 public:
  explicit ReservoirSampler(const SampleConfig& config) : cap_(config.cap), rng_(config.seed) {
    if (cap_ < 1) fail(ErrorKind::kValidation, "sample cap must be >= 1");
    slots_.reserve(std::min<std::size_t>(cap_, 1 << 16));
  }

  void observe(T item) {
    if (slots_.size() < cap_) {
      slots_.emplace_back(seen_, std::move(item));
    } else {
      const auto j = static_cast<std::size_t>(uniform_index(rng_, seen_ + 1));
      if (j < cap_) slots_[j] = {seen_, std::move(item)};
    }
    ++seen_;
  }

  std::size_t seen() const noexcept { return seen_; }

  // The sample in stream order.
  std::vector<T> take() && {
    std::sort(slots_.begin(), slots_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<T> out;
    out.reserve(slots_.size());
    for (auto& s : slots_) out.push_back(std::move(s.second));
    return out;
  }

 private:
  std::size_t cap_;
  std::size_t seen_ = 0;
  Rng rng_;
  std::vector<std::pair<std::size_t, T>> slots_;
};

template <class T>
std::vector<T> random_sample(const std::vector<T>& items, const SampleConfig& config) {
  ReservoirSampler<T> sampler(config);
  for (const auto& x : items) sampler.observe(x);
  return std::move(sampler).take();
}

}  // namespace ktl::graph
