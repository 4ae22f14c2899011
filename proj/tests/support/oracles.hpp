#pragma once

// Independent reference computations used only by tests. These deliberately
// avoid the library's solver code paths: LMMSE goes through a dense linear
// solve, marginal means through active-set enumeration with closed-form
// Gaussian evidences, and the real denoiser through plain quadrature.

#include "core/model.hpp"
#include "core/real_amp.hpp"

namespace cbamp::oracle {

/// Exact posterior mean for the rho = 1 (pure Gaussian) prior:
/// (sigma2/tau I + A^H A)^-1 (A^H y + sigma2/tau mu 1). Requires sigma2 > 0.
CVector lmmse_complex(const ProblemInstance& problem);

/// Real LMMSE on the stacked system with the rho = 1 marginal prior.
RVector lmmse_real(const RealStackedProblem& problem);

/// Exact marginal posterior means of the Bernoulli-Gaussian linear model by
/// enumeration of the 2^N active sets (closed-form complex Gaussian evidence
/// per set). Practical up to N ~ 16.
CVector bg_marginal_means(const ProblemInstance& problem);

/// Real spike-and-slab posterior moments by brute-force composite
/// Simpson quadrature over a wide bracket (no Gaussian-product algebra).
RealDenoiserResult real_denoise_quadrature(double r, double q,
                                           const RealPrior& prior,
                                           int points = 20001);

}  // namespace cbamp::oracle
