#include "core/state_evolution.hpp"

#include <cmath>

#include "core/denoiser.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace cbamp {

void SEParams::validate() const {
  prior.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("se: alpha must be positive");
  }
  if (!(gamma_n > 0.0) || !std::isfinite(gamma_n)) {
    throw ParameterError("se: gamma_n must be positive");
  }
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw ParameterError("se: sigma2 must be >= 0");
  }
  if (mc_samples < 1000) throw ParameterError("se: mc_samples must be >= 1000");
}

std::pair<double, double> se_step(double E, double V, const SEParams& params) {
  params.validate();
  if (!(E >= 0.0) || !(V >= 0.0)) {
    throw ParameterError("se_step: E, V must be >= 0");
  }

  const double denom = params.alpha * params.gamma_n;
  const double sigma = std::max((params.sigma2 + params.gamma_n * V) / denom, 1e-12);
  const double noise_sd = std::sqrt((params.sigma2 + params.gamma_n * E) / denom);
  const double rho = params.prior.rho;

  constexpr std::size_t kBlock = 8192;
  const std::size_t n = static_cast<std::size_t>(params.mc_samples);
  const std::size_t blocks = (n + kBlock - 1) / kBlock;

  struct Partial {
    double e_spike = 0, e_slab = 0, v_spike = 0, v_slab = 0;
  };
  std::vector<Partial> partials(blocks);

  parallel_for(blocks, resolve_threads(params.threads), [&](std::size_t b) {
    Rng rng(mix_seed(params.seed, 0x5e5e5e5eULL + b));
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(lo + kBlock, n);
    Partial p;
    for (std::size_t k = lo; k < hi; ++k) {
      const Complex z = rng.circular_gaussian(Complex(0, 0), 1.0);
      if (rho < 1.0) {
        const DenoiserResult d0 = bg_denoise({noise_sd * z, sigma}, params.prior);
        p.e_spike += std::norm(d0.mean);
        p.v_spike += d0.variance;
      }
      if (rho > 0.0) {
        const Complex xs =
            rng.circular_gaussian(params.prior.mu, params.prior.tau);
        const DenoiserResult d1 =
            bg_denoise({xs + noise_sd * z, sigma}, params.prior);
        p.e_slab += std::norm(d1.mean - xs);
        p.v_slab += d1.variance;
      }
    }
    partials[b] = p;
  });

  Partial total;
  for (const Partial& p : partials) {
    total.e_spike += p.e_spike;
    total.e_slab += p.e_slab;
    total.v_spike += p.v_spike;
    total.v_slab += p.v_slab;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double e_next =
      (1.0 - rho) * total.e_spike * inv_n + rho * total.e_slab * inv_n;
  const double v_next =
      (1.0 - rho) * total.v_spike * inv_n + rho * total.v_slab * inv_n;
  return {e_next, v_next};
}

SETrace se_run(const SEParams& params, int iters) {
  params.validate();
  if (iters < 1) throw ParameterError("se_run: iters must be >= 1");
  const double v0 = prior_moments(params.prior).variance;
  SETrace trace;
  trace.reserve(iters);
  trace.push_back({1, v0, v0});
  double e = v0, v = v0;
  for (int t = 2; t <= iters; ++t) {
    SEParams step_params = params;
    step_params.seed = mix_seed(params.seed, static_cast<std::uint64_t>(t));
    std::tie(e, v) = se_step(e, v, step_params);
    trace.push_back({t, e, v});
  }
  return trace;
}

namespace {

// Noiseless SE run with early exit on success.
bool se_recovers(const PriorBG& prior, double alpha,
                 const SEBoundaryConfig& cfg) {
  SEParams params;
  params.alpha = alpha;
  params.gamma_n = cfg.gamma_n;
  params.sigma2 = 0.0;
  params.prior = prior;
  params.mc_samples = cfg.mc_samples;
  params.seed = cfg.seed;
  params.threads = cfg.threads;

  double e = prior_moments(prior).variance;
  double v = e;
  if (e < cfg.success_mse) return true;
  for (int t = 2; t <= cfg.iters; ++t) {
    SEParams step_params = params;
    step_params.seed = mix_seed(params.seed, static_cast<std::uint64_t>(t));
    std::tie(e, v) = se_step(e, v, step_params);
    if (e < cfg.success_mse) return true;
  }
  return false;
}

}  // namespace

std::vector<SEBoundaryPoint> se_phase_boundary(const PriorBG& prior,
                                               const std::vector<double>& rho_grid,
                                               double tol,
                                               const SEBoundaryConfig& cfg) {
  if (!(tol > 0.0)) throw ParameterError("se_phase_boundary: tol must be > 0");
  std::vector<SEBoundaryPoint> out;
  out.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    if (!(rho > 0.0 && rho < 1.0)) {
      throw ParameterError("se_phase_boundary: rho values must lie in (0, 1)");
    }
    PriorBG p = prior;
    p.rho = rho;
    double lo = cfg.alpha_lo;
    double hi = cfg.alpha_hi;
    if (!se_recovers(p, hi, cfg)) {
      throw SearchRangeError("se_phase_boundary: no success at alpha_hi");
    }
    if (se_recovers(p, lo, cfg)) {
      throw SearchRangeError("se_phase_boundary: success already at alpha_lo");
    }
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (se_recovers(p, mid, cfg)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.push_back({rho, hi});
  }
  return out;
}

}  // namespace cbamp
