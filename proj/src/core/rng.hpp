#pragma once

#include <cstdint>

namespace gda {

/// xoshiro256++ generator seeded through splitmix64.
///
/// Every stochastic routine in the repo draws from this generator so that
/// results are reproducible from a 64-bit seed alone. Real variates use
/// fixed transforms: uniforms take the top 53 bits of the state output,
/// Gaussians come from the Box-Muller transform (no rejection step, no
/// cached spare), so the draw sequence is a pure function of the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform01();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Normal(mean, stddev) via Box-Muller; consumes two uniforms per call.
  double gaussian(double mean, double stddev);

  /// Integer in [0, n), n >= 1, by rejection-free scaling (desk-scale n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

/// Stable stream derivation: child seed for a named sub-task, so parallel
/// trials and grid points get independent, order-free streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gda
