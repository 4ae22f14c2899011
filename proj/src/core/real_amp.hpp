#pragma once

#include "core/amp.hpp"
#include "core/model.hpp"

namespace cbamp {

/// Real spike-and-slab prior on one coordinate: weight 1-rho at zero, slab
/// N(mean, var).
struct RealPrior {
  double rho = 0.1;
  double mean = 0.0;
  double var = 0.5;
};

struct RealDenoiserResult {
  double mean = 0.0;
  double variance = 0.0;
  double log_evidence = 0.0;
};

/// Posterior mean/variance of u under prior and observation r = u + N(0, q).
/// Log-domain mixture weights, mirroring the complex denoiser.
RealDenoiserResult real_ss_denoise(double r, double q, const RealPrior& prior);

/// The complex problem rewritten over the reals:
/// A_r = [[Re A, -Im A], [Im A, Re A]], y_r = [Re y; Im y], noise sigma2/2
/// per real coordinate. The per-coordinate prior is the marginal
/// spike-and-slab (weight 1-rho, slab N(Re/Im mu, tau/2)); the joint
/// both-zero/both-nonzero structure is deliberately not modeled.
struct RealStackedProblem {
  RMatrix A_r;       // 2M x 2N
  RVector y_r;       // 2M
  double sigma2_r;   // sigma2 / 2
  double rho;
  double slab_var;   // tau / 2
  RVector slab_mean; // 2N
  std::optional<CVector> x_true;  // complex ground truth for MSE reporting

  Index m2() const { return A_r.rows(); }
  Index n2() const { return A_r.cols(); }
};

RVector stack_vector(const CVector& v);
CVector unstack_vector(const RVector& v);
RealStackedProblem stack(const ProblemInstance& problem);

struct RealAmpResult {
  CVector xhat;   // unstacked estimate
  RVector nu_r;   // per-real-coordinate posterior variances, 2N
  Trace trace;
};

/// Algorithm-1 recursions in real arithmetic with the marginal spike-and-slab
/// denoiser. Trace MSE is computed against the complex ground truth.
RealAmpResult real_amp_run(const RealStackedProblem& problem,
                           const SolverConfig& config);

}  // namespace cbamp
