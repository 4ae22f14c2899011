#pragma once

#include <string>
#include <vector>

#include "core/model.hpp"

namespace cbamp {

struct SolverConfig {
  int max_iters = 200;
  double tol = 1e-12;          // relative-change stop; 0 disables
  double sigma2_floor = 1e-12; // effective sigma^2 (and Sigma) lower bound
  double damping = 0.0;        // 0 = paper-exact
  bool onsager = true;         // false deletes the Onsager reaction term

  void validate() const;
};

/// Per-iteration solver quantities. t indexes the estimate: xhat/nu carry
/// superscript t, Va/Za carry t-1 on entry to factor_update and t after it,
/// Sigma/Rvec are the values that produced xhat.
struct SolverState {
  CVector xhat;  // N
  RVector nu;    // N
  RVector Va;    // M
  CVector Za;    // M
  RVector Sigma; // N
  CVector Rvec;  // N
  int t = 1;
};

struct TraceRow {
  int t;
  double mse;      // NaN when no ground truth is attached
  double mean_nu;
  double mean_Va;
  double residual; // ||y - Z||
};

enum class StopReason { converged, max_iters, diverged };

struct Trace {
  std::vector<TraceRow> rows;
  StopReason stop = StopReason::max_iters;
  int diverged_at = -1;
};

struct SolveResult {
  CVector xhat;
  RVector nu;
  Trace trace;
};

/// CB-AMP with O(M+N) messages per iteration. |A_ai|^2 is precomputed once;
/// a single solve is sequential and deterministic.
class AmpSolver {
 public:
  AmpSolver(const ProblemInstance& problem, const SolverConfig& config);

  /// xhat = prior mean, nu = prior variance, V = 1, Z = y, t = 1.
  SolverState init() const;

  /// Factor node update: V_a^t and the Onsager-corrected residual mean Z_a^t.
  void factor_update(SolverState& state) const;

  /// Variable node update: Sigma_i^t, R_i^t, then the denoised estimate
  /// (xhat, nu) at t+1; advances t.
  void variable_update(SolverState& state) const;

  SolveResult run() const;

 private:
  const ProblemInstance& problem_;
  SolverConfig config_;
  RMatrix abs2_;      // |A_ai|^2, M x N
  double sigma2_eff_;
};

SolveResult amp_run(const ProblemInstance& problem, const SolverConfig& config);

}  // namespace cbamp
