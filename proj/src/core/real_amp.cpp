#include "core/real_amp.hpp"

#include <cmath>
#include <limits>

namespace cbamp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

RealDenoiserResult real_ss_denoise(double r, double q, const RealPrior& prior) {
  if (!std::isfinite(r)) throw ParameterError("real denoise: r must be finite");
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw ParameterError("real denoise: q must be positive and finite");
  }
  const double rho = prior.rho;
  const double s2 = prior.var;
  const double theta = prior.mean;

  const double v = s2 * q / (s2 + q);
  const double m = (s2 * r + q * theta) / (s2 + q);

  const double neg_inf = -std::numeric_limits<double>::infinity();
  const double log_w0 = rho >= 1.0 ? neg_inf : std::log1p(-rho) - r * r / (2.0 * q);
  const double log_w1 =
      rho <= 0.0 ? neg_inf
                 : std::log(rho) + 0.5 * std::log(q / (s2 + q)) -
                       (r - theta) * (r - theta) / (2.0 * (s2 + q));

  double pi1;
  if (rho <= 0.0) {
    pi1 = 0.0;
  } else if (rho >= 1.0) {
    pi1 = 1.0;
  } else {
    pi1 = 1.0 / (1.0 + std::exp(log_w0 - log_w1));
  }

  RealDenoiserResult out;
  out.mean = pi1 * m;
  out.variance = pi1 * v + pi1 * (1.0 - pi1) * m * m;
  if (log_w0 == neg_inf) {
    out.log_evidence = log_w1;
  } else if (log_w1 == neg_inf) {
    out.log_evidence = log_w0;
  } else {
    const double hi = std::max(log_w0, log_w1);
    out.log_evidence = hi + std::log1p(std::exp(std::min(log_w0, log_w1) - hi));
  }
  return out;
}

RVector stack_vector(const CVector& v) {
  RVector out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

CVector unstack_vector(const RVector& v) {
  const Index n = v.size() / 2;
  CVector out(n);
  out.real() = v.head(n);
  out.imag() = v.tail(n);
  return out;
}

RealStackedProblem stack(const ProblemInstance& problem) {
  problem.validate();
  const Index m = problem.m();
  const Index n = problem.n();
  RealStackedProblem out;
  out.A_r.resize(2 * m, 2 * n);
  out.A_r.topLeftCorner(m, n) = problem.A.entries.real();
  out.A_r.topRightCorner(m, n) = -problem.A.entries.imag();
  out.A_r.bottomLeftCorner(m, n) = problem.A.entries.imag();
  out.A_r.bottomRightCorner(m, n) = problem.A.entries.real();
  out.y_r = stack_vector(problem.y);
  out.sigma2_r = problem.sigma2 / 2.0;
  out.rho = problem.prior.rho;
  out.slab_var = problem.prior.tau / 2.0;
  out.slab_mean.resize(2 * n);
  out.slab_mean.head(n).setConstant(problem.prior.mu.real());
  out.slab_mean.tail(n).setConstant(problem.prior.mu.imag());
  out.x_true = problem.x_true;
  return out;
}

RealAmpResult real_amp_run(const RealStackedProblem& problem,
                           const SolverConfig& config) {
  config.validate();
  const Index m2 = problem.m2();
  const Index n2 = problem.n2();
  const RMatrix abs2 = problem.A_r.cwiseAbs2();
  const double sigma2_eff = std::max(problem.sigma2_r, config.sigma2_floor);
  if ((abs2.colwise().sum().array() <= 0.0).any()) {
    throw ColumnDegeneracyError("real amp: stacked matrix has a zero column");
  }

  RVector xhat(n2), nu(n2);
  for (Index j = 0; j < n2; ++j) {
    const double theta = problem.slab_mean[j];
    xhat[j] = problem.rho * theta;
    nu[j] = problem.rho * problem.slab_var +
            problem.rho * (1.0 - problem.rho) * theta * theta;
  }
  RVector va = RVector::Ones(m2);
  RVector za = problem.y_r;
  int t = 1;

  Trace trace;
  auto record = [&]() {
    TraceRow row;
    row.t = t;
    row.mse = problem.x_true ? mse(unstack_vector(xhat), *problem.x_true) : kNaN;
    // complex-equivalent scales: a complex coordinate aggregates two real ones
    row.mean_nu = 2.0 * nu.mean();
    row.mean_Va = 2.0 * va.mean();
    row.residual = (problem.y_r - za).norm();
    trace.rows.push_back(row);
  };
  record();

  RVector x_prev = xhat;
  RVector nu_prev = nu;
  for (int sweep = 0; sweep < config.max_iters; ++sweep) {
    x_prev = xhat;
    nu_prev = nu;

    RVector v_new = abs2 * nu;
    RVector z_new = problem.A_r * xhat;
    if (config.onsager) {
      z_new -= (v_new.array() / (sigma2_eff + va.array()) *
                (problem.y_r - za).array())
                   .matrix();
    }
    if (!v_new.allFinite() || !z_new.allFinite()) {
      trace.stop = StopReason::diverged;
      trace.diverged_at = t;
      return {unstack_vector(x_prev), std::move(nu_prev), std::move(trace)};
    }
    va = std::move(v_new);
    za = std::move(z_new);

    const RVector d = (sigma2_eff + va.array()).inverse();
    const RVector precision = abs2.transpose() * d;
    const RVector sigma = precision.array().inverse().max(config.sigma2_floor);
    const RVector rvec =
        xhat + sigma.cwiseProduct(problem.A_r.transpose() *
                                  d.cwiseProduct(problem.y_r - za));

    bool finite = rvec.allFinite();
    if (finite) {
      RealPrior coord_prior{problem.rho, 0.0, problem.slab_var};
      for (Index j = 0; j < n2; ++j) {
        coord_prior.mean = problem.slab_mean[j];
        const RealDenoiserResult r =
            real_ss_denoise(rvec[j], sigma[j], coord_prior);
        xhat[j] = r.mean;
        nu[j] = r.variance;
      }
      if (config.damping > 0.0) {
        xhat = (1.0 - config.damping) * xhat + config.damping * x_prev;
        nu = (1.0 - config.damping) * nu + config.damping * nu_prev;
      }
      finite = xhat.allFinite() && nu.allFinite();
    }
    if (!finite) {
      trace.stop = StopReason::diverged;
      trace.diverged_at = t;
      return {unstack_vector(x_prev), std::move(nu_prev), std::move(trace)};
    }
    t += 1;
    record();

    if (config.tol > 0.0) {
      const double change =
          (xhat - x_prev).squaredNorm() / std::max(x_prev.squaredNorm(), 1e-30);
      if (change < config.tol) {
        trace.stop = StopReason::converged;
        return {unstack_vector(xhat), std::move(nu), std::move(trace)};
      }
    }
  }
  trace.stop = StopReason::max_iters;
  return {unstack_vector(xhat), std::move(nu), std::move(trace)};
}

}  // namespace cbamp
