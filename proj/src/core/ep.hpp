#pragma once

#include "core/amp.hpp"
#include "core/model.hpp"

namespace cbamp {

/// Full per-edge message set of the unreduced expectation-propagation solver.
/// Dense N x M arrays; this solver is the correctness oracle for CB-AMP's
/// large-system reduction and targets N*M up to ~1e6.
struct EdgeMessages {
  CMatrix xhat_ia;  // N x M, means of the variable-to-factor messages
  RMatrix nu_ia;    // N x M, variances, > 0
  int t = 0;
  long clamp_count = 0;  // nonpositive cavity variances clamped so far
};

/// Per-iteration beliefs together with the per-variable cavity quantities
/// that produced them (exposed for consistency checks).
struct EpBeliefs {
  CVector xhat;
  RVector nu;
  RVector Sigma;
  CVector Rvec;
};

/// Sigma_i and R_i recomputed from the current messages alone.
void ep_cavity(const EdgeMessages& msgs, const ProblemInstance& problem,
               RVector& Sigma, CVector& Rvec);

/// All edge means set to the prior mean, variances to the prior variance.
EdgeMessages ep_init(const ProblemInstance& problem);

/// One fully parallel sweep: factor messages from the current variable
/// messages, beliefs by denoising, then refreshed variable messages by
/// Gaussian division. Nonpositive edge variances are clamped to
/// variance_floor (the message mean falls back to the belief mean) and
/// counted.
EpBeliefs ep_iterate(EdgeMessages& msgs, const ProblemInstance& problem,
                     double variance_floor = 1e-12);

struct EpResult {
  CVector xhat;
  RVector nu;
  Trace trace;
  long clamp_count = 0;
};

/// Iterates to max_iters or until the relative change of the belief means
/// drops below tol.
EpResult ep_run(const ProblemInstance& problem, int max_iters,
                double tol = 1e-12, double variance_floor = 1e-12);

}  // namespace cbamp
