#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace cbamp {

/// Mixes a user seed with a stream index into a decorrelated 64-bit seed
/// (splitmix64). Used to derive per-trial / per-block / per-iteration streams
/// from one base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded random source. Every stochastic operation in the library takes an
/// explicit seed and builds one of these; there is no global RNG state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform draw in [0, 1).
  double uniform01();

  /// Real Gaussian N(mean, variance).
  double gaussian(double mean, double variance);

  /// Circular complex Gaussian CN(mean, variance): independent real and
  /// imaginary parts with variance/2 each.
  std::complex<double> circular_gaussian(std::complex<double> mean,
                                         double variance);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace cbamp
