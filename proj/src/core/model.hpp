#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include "core/errors.hpp"

namespace cbamp {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Bernoulli-Gaussian prior: point mass at zero with weight 1-rho, circular
/// complex Gaussian slab CN(mu, tau) with weight rho.
struct PriorBG {
  double rho = 0.1;
  Complex mu{0.0, 0.0};
  double tau = 1.0;

  /// Throws ParameterError unless 0 <= rho <= 1 and tau > 0 (all finite).
  void validate() const;
};

struct PriorMoments {
  Complex mean;
  double variance;  // E|x - mean|^2
};

/// Mean rho*mu and variance rho*tau + rho*(1-rho)*|mu|^2 of the prior.
PriorMoments prior_moments(const PriorBG& prior);

/// Dense complex measurement matrix with i.i.d. entries of per-entry
/// variance gamma.
struct MeasurementMatrix {
  CMatrix entries;  // M x N
  double gamma = 0.0;

  Index m() const { return entries.rows(); }
  Index n() const { return entries.cols(); }
};

/// One recovery task: y = A x + w with w ~ CN(0, sigma2 I).
struct ProblemInstance {
  MeasurementMatrix A;
  CVector y;
  double sigma2 = 0.0;
  PriorBG prior;
  std::optional<CVector> x_true;

  Index m() const { return A.m(); }
  Index n() const { return A.n(); }

  /// Throws ShapeError / ParameterError on inconsistent dimensions,
  /// nonfinite entries or sigma2 < 0.
  void validate() const;
};

/// Draws n i.i.d. components from the prior. Deterministic given seed.
CVector sample_signal(Index n, const PriorBG& prior, std::uint64_t seed);

/// Draws an M x N matrix of i.i.d. CN(0, gamma) entries. Deterministic given
/// seed; equal seeds give bit-identical matrices.
MeasurementMatrix sample_matrix(Index m, Index n, double gamma,
                                std::uint64_t seed);

/// Returns A x + w with w i.i.d. CN(0, sigma2). sigma2 == 0 returns exactly
/// A x without consuming randomness.
CVector measure(const MeasurementMatrix& A, const CVector& x, double sigma2,
                std::uint64_t seed);

/// (1/N) sum_i |xhat_i - x_i|^2.
double mse(const CVector& x_hat, const CVector& x);

/// Seeded recipe for a full problem instance; matches the JSON wire format
/// {"m","n","gamma","sigma2","prior":{...},"seed_x","seed_a","seed_w"}.
/// Instances are regenerated from seeds, never stored dense.
struct ProblemSpec {
  Index m = 0;
  Index n = 0;
  double gamma = 0.0;  // <= 0 means the 1/n default
  double sigma2 = 0.0;
  PriorBG prior;
  std::uint64_t seed_x = 1;
  std::uint64_t seed_a = 2;
  std::uint64_t seed_w = 3;

  double effective_gamma() const {
    return gamma > 0.0 ? gamma : 1.0 / static_cast<double>(n);
  }
};

ProblemInstance generate_problem(const ProblemSpec& spec);

std::string problem_spec_to_json(const ProblemSpec& spec);
ProblemSpec problem_spec_from_json(const std::string& text);

}  // namespace cbamp
