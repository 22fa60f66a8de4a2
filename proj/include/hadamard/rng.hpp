#pragma once

#include <cstdint>

namespace hadamard {

/// Seedable generator used by every stochastic routine in the library.
///
/// xoshiro256** with the state expanded from a 64-bit seed by splitmix64.
/// Uniforms take the top 53 bits; normals use the Box-Muller transform with
/// the second variate cached. The whole stream is a pure function of the
/// seed, independent of the platform's <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal.
  double normal();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Seed for the k-th independent sub-stream derived from `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

}  // namespace hadamard
