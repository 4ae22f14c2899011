#pragma once

#include "core/model.hpp"

namespace cbamp {

/// Pseudo-observation R with pseudo-variance Sigma: the scalar channel
/// R = x + CN(0, Sigma) whose posterior moments the denoiser computes.
struct DenoiserInput {
  Complex R{0.0, 0.0};
  double Sigma = 1.0;
};

struct DenoiserResult {
  Complex mean{0.0, 0.0};    // posterior mean
  double variance = 0.0;     // posterior variance, >= 0
  double log_evidence = 0.0; // log of the normalizer z(R, Sigma)
};

/// Closed-form posterior mean/variance under the Bernoulli-Gaussian prior.
/// All mixture weights are evaluated in the log domain, so |R|^2/Sigma up to
/// ~1e6 does not overflow. rho = 0 returns (0, 0, -|R|^2/Sigma) exactly.
DenoiserResult bg_denoise(const DenoiserInput& in, const PriorBG& prior);

/// Numerical-quadrature evaluation of the same posterior moments: the point
/// mass is integrated exactly, the slab by a 2-D tensor Gauss-Hermite rule
/// (real x imaginary). Node placement follows the slab-likelihood product so
/// narrow likelihoods (Sigma << tau) stay resolved; atom weights are
/// recomputed from the prior density and the likelihood directly, so the
/// result does not inherit the closed form's mixture algebra. Converges to
/// bg_denoise as nodes grows. Requires nodes >= 16.
DenoiserResult quadrature_denoise(const DenoiserInput& in, const PriorBG& prior,
                                  int nodes);

}  // namespace cbamp
