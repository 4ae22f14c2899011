#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace cbamp {

/// Inputs of the scalar state-evolution recursion. gamma_n is the scaled
/// matrix variance gamma*N (1 when gamma = 1/N).
struct SEParams {
  double alpha = 0.5;
  double gamma_n = 1.0;
  double sigma2 = 0.0;
  PriorBG prior;
  int mc_samples = 100000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = auto

  void validate() const;
};

struct SEPoint {
  int t;
  double E;
  double V;
};
using SETrace = std::vector<SEPoint>;

/// One step of the (E, V) recursion. The effective scalar channel is
/// R = x + sqrt((sigma2 + gamma_n E) / (alpha gamma_n)) z with
/// Sigma = (sigma2 + gamma_n V) / (alpha gamma_n), floored at 1e-12.
/// The point-mass branch of the prior is weighted exactly; the slab branch
/// and z are Monte Carlo. Deterministic given the seed, independent of the
/// worker count (fixed per-block substreams, ordered reduction).
std::pair<double, double> se_step(double E, double V, const SEParams& params);

/// Trace t = 1..iters with E^1 = V^1 = prior variance; iteration t uses the
/// substream mix(seed, t).
SETrace se_run(const SEParams& params, int iters);

struct SEBoundaryConfig {
  double alpha_lo = 0.02;
  double alpha_hi = 1.0;
  int iters = 500;
  double success_mse = 1e-4;
  double gamma_n = 1.0;
  int mc_samples = 50000;
  std::uint64_t seed = 12345;
  int threads = 0;
};

struct SEBoundaryPoint {
  double rho;
  double alpha_star;
};

/// For each rho, bisects on alpha for the smallest measurement rate at which
/// the noiseless SE run reaches E < success_mse within cfg.iters iterations.
/// Throws SearchRangeError when [alpha_lo, alpha_hi] does not bracket the
/// boundary. Bisection tolerance tol on alpha; the reported alpha_star is the
/// smallest succeeding probe.
std::vector<SEBoundaryPoint> se_phase_boundary(const PriorBG& prior,
                                               const std::vector<double>& rho_grid,
                                               double tol,
                                               const SEBoundaryConfig& cfg = {});

}  // namespace cbamp
