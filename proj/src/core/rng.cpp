#include "core/rng.hpp"

#include <cmath>

namespace cbamp {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed)
    : engine_(mix_seed(seed, 0)), normal_(0.0, 1.0), uniform_(0.0, 1.0) {}

double Rng::uniform01() { return uniform_(engine_); }

double Rng::gaussian(double mean, double variance) {
  return mean + std::sqrt(variance) * normal_(engine_);
}

std::complex<double> Rng::circular_gaussian(std::complex<double> mean,
                                            double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = s * normal_(engine_);
  const double im = s * normal_(engine_);
  return mean + std::complex<double>(re, im);
}

}  // namespace cbamp
