#include "core/amp.hpp"

#include <cmath>
#include <limits>

#include "core/denoiser.hpp"

namespace cbamp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw ParameterError("config: max_iters must be >= 1");
  if (!(tol >= 0.0)) throw ParameterError("config: tol must be >= 0");
  if (!(sigma2_floor > 0.0)) {
    throw ParameterError("config: sigma2_floor must be > 0");
  }
  if (!(damping >= 0.0 && damping < 1.0)) {
    throw ParameterError("config: damping must lie in [0, 1)");
  }
}

AmpSolver::AmpSolver(const ProblemInstance& problem, const SolverConfig& config)
    : problem_(problem), config_(config) {
  config_.validate();
  problem_.validate();
  abs2_ = problem_.A.entries.cwiseAbs2();
  sigma2_eff_ = std::max(problem_.sigma2, config_.sigma2_floor);
  if ((abs2_.colwise().sum().array() <= 0.0).any()) {
    throw ColumnDegeneracyError("amp: measurement matrix has a zero column");
  }
}

SolverState AmpSolver::init() const {
  const PriorMoments pm = prior_moments(problem_.prior);
  SolverState s;
  s.xhat = CVector::Constant(problem_.n(), pm.mean);
  s.nu = RVector::Constant(problem_.n(), pm.variance);
  s.Va = RVector::Ones(problem_.m());
  s.Za = problem_.y;
  s.Sigma = RVector::Constant(problem_.n(), 1.0);
  s.Rvec = s.xhat;
  s.t = 1;
  return s;
}

void AmpSolver::factor_update(SolverState& state) const {
  if (state.t < 1) throw ParameterError("factor_update: t must be >= 1");
  RVector v_new = abs2_ * state.nu;
  CVector z_new = problem_.A.entries * state.xhat;
  if (config_.onsager) {
    const RVector gain = v_new.array() / (sigma2_eff_ + state.Va.array());
    z_new -= gain.cast<Complex>().cwiseProduct(problem_.y - state.Za);
  }
  if (!v_new.allFinite() || !z_new.allFinite()) {
    throw DivergenceError(state.t, "amp: nonfinite factor update");
  }
  state.Va = std::move(v_new);
  state.Za = std::move(z_new);
}

void AmpSolver::variable_update(SolverState& state) const {
  const RVector d = (sigma2_eff_ + state.Va.array()).inverse();
  const RVector precision = abs2_.transpose() * d;
  if (!(precision.array() > 0.0).all() || !precision.allFinite()) {
    throw ColumnDegeneracyError("amp: degenerate column precision");
  }
  state.Sigma = precision.array().inverse().max(config_.sigma2_floor);
  const CVector residual_scaled =
      d.cast<Complex>().cwiseProduct(problem_.y - state.Za);
  state.Rvec = state.xhat +
               state.Sigma.cast<Complex>().cwiseProduct(
                   problem_.A.entries.adjoint() * residual_scaled);
  if (!state.Rvec.allFinite() || !state.Sigma.allFinite()) {
    throw DivergenceError(state.t, "amp: nonfinite variable update");
  }

  CVector x_new(problem_.n());
  RVector nu_new(problem_.n());
  for (Index i = 0; i < problem_.n(); ++i) {
    const DenoiserResult r =
        bg_denoise({state.Rvec[i], state.Sigma[i]}, problem_.prior);
    x_new[i] = r.mean;
    nu_new[i] = r.variance;
  }
  const double d0 = config_.damping;
  if (d0 > 0.0) {
    state.xhat = (1.0 - d0) * x_new + d0 * state.xhat;
    state.nu = (1.0 - d0) * nu_new + d0 * state.nu;
  } else {
    state.xhat = std::move(x_new);
    state.nu = std::move(nu_new);
  }
  if (!state.xhat.allFinite() || !state.nu.allFinite()) {
    throw DivergenceError(state.t, "amp: nonfinite denoised estimate");
  }
  state.t += 1;
}

SolveResult AmpSolver::run() const {
  SolverState state = init();

  Trace trace;
  auto record = [&](const SolverState& s) {
    TraceRow row;
    row.t = s.t;
    row.mse = problem_.x_true ? mse(s.xhat, *problem_.x_true) : kNaN;
    row.mean_nu = s.nu.mean();
    row.mean_Va = s.Va.mean();
    row.residual = (problem_.y - s.Za).norm();
    trace.rows.push_back(row);
  };
  record(state);

  CVector x_prev = state.xhat;
  RVector nu_prev = state.nu;
  for (int sweep = 0; sweep < config_.max_iters; ++sweep) {
    x_prev = state.xhat;
    nu_prev = state.nu;
    try {
      factor_update(state);
      variable_update(state);
    } catch (const DivergenceError& err) {
      trace.stop = StopReason::diverged;
      trace.diverged_at = err.iteration();
      return {std::move(x_prev), std::move(nu_prev), std::move(trace)};
    }
    record(state);
    if (config_.tol > 0.0) {
      const double change = (state.xhat - x_prev).squaredNorm() /
                            std::max(x_prev.squaredNorm(), 1e-30);
      if (change < config_.tol) {
        trace.stop = StopReason::converged;
        return {state.xhat, state.nu, std::move(trace)};
      }
    }
  }
  trace.stop = StopReason::max_iters;
  return {state.xhat, state.nu, std::move(trace)};
}

SolveResult amp_run(const ProblemInstance& problem, const SolverConfig& config) {
  return AmpSolver(problem, config).run();
}

}  // namespace cbamp
