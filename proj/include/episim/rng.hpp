#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace episim {

/// Seeded random stream owned by a world.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The conversions to reals and bounded integers are done here
/// rather than through <random> distributions, which are allowed to differ
/// between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi). Returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi] (inclusive), unbiased by rejection.
  /// Always consumes at least one draw, even when lo == hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1u;
    if (span == 0) {
      return static_cast<std::int64_t>(engine_());
    }
    const std::uint64_t threshold = (0u - span) % span;
    std::uint64_t x = engine_();
    while (x < threshold) {
      x = engine_();
    }
    return lo + static_cast<std::int64_t>(x % span);
  }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::mt19937_64 engine_;
};

/// Picks min(k, pool.size()) distinct elements by a partial Fisher-Yates
/// shuffle: for i in [0, m), swap pool[i] with pool[uniform_int(i, n - 1)].
/// Returns the picks in selection order. Consumes exactly m draws.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::int64_t k, Rng& rng) {
  const auto n = static_cast<std::int64_t>(pool.size());
  const auto m = k < n ? (k < 0 ? 0 : k) : n;
  for (std::int64_t i = 0; i < m; ++i) {
    const auto j = rng.uniform_int(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  return pool;
}

}  // namespace episim
