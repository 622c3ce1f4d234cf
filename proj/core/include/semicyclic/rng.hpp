#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace semicyclic {

/// Seeded, splittable pseudo-random stream.
///
/// All sampling in the library goes through this type so that every run is
/// reproducible from a single recorded seed. `split` derives an independent
/// child stream from the *seed* (not the current state), so child streams are
/// stable no matter how much the parent has been consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n-1}; unbiased.
  std::size_t uniform_index(std::size_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = uniform_index(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace semicyclic
