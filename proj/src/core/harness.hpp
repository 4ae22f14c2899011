#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/state_evolution.hpp"

namespace cbamp {

/// One experiment description; mirrors the JSON config schema (snake_case
/// keys, "alpha"/"rho" may be scalars or grids).
struct ExperimentConfig {
  std::string experiment = "mse-curve";  // mse-curve | phase | se-compare
  int n = 256;
  std::vector<double> alpha{0.5};
  std::vector<double> rho{0.1};
  double mu_re = 0.0;
  double mu_im = 0.0;
  double tau = 1.0;
  double sigma2 = 0.0;
  double gamma = 0.0;  // <= 0 means 1/n
  int iters = 60;
  int trials = 20;
  std::uint64_t base_seed = 1;
  std::vector<std::string> algos{"cbamp"};
  std::string out;        // output path; empty = stdout (CLI concern)
  int se_samples = 100000;
  int threads = 0;        // 0 = auto, capped by CBAMP_THREADS

  PriorBG prior() const { return PriorBG{rho.front(), {mu_re, mu_im}, tau}; }
  void validate() const;
};

/// "0.05:0.5:0.05" (start:stop:step, stop inclusive up to rounding) or a
/// single number.
std::vector<double> parse_grid(const std::string& text);

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

/// Per-iteration MSE averaged across trials for each requested algorithm
/// (cbamp | real-amp | ep | se). Rows t,algo,mean_mse,stderr,diverged;
/// iteration index 1 is the common prior-mean initialization. Diverged trials
/// are excluded from the means and counted.
std::string run_mse_curve(const ExperimentConfig& config);

struct PhaseCsv {
  std::string grid;      // rho,alpha,algo,success_rate
  std::string boundary;  // rho,algo,alpha_50
};

/// Noiseless success-rate sweep over (rho, alpha) grids; success is final
/// MSE < 1e-4. The 50% crossing is interpolated on the alpha grid after
/// isotonic monotonization of the observed rates.
PhaseCsv run_phase(const ExperimentConfig& config);

std::string run_se_csv(const SEParams& params, int iters);

std::string run_se_boundary_csv(const PriorBG& prior,
                                const std::vector<double>& rho_grid, double tol,
                                const SEBoundaryConfig& cfg);

}  // namespace cbamp
