#include "core/ep.hpp"

#include <cmath>
#include <limits>

#include "core/denoiser.hpp"

namespace cbamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CavityWork {
  Eigen::RowVectorXcd z_full;  // 1 x M
  Eigen::RowVectorXd v_full;   // 1 x M
  CMatrix z_cav;               // N x M, Z_{a->i}
  RMatrix v_cav;               // N x M, V_{a->i}
  RMatrix p;                   // N x M, 1 / (sigma2 + V_{a->i})
  RVector sigma;               // N
  CVector rvec;                // N
};

CavityWork compute_cavity(const EdgeMessages& msgs,
                          const ProblemInstance& problem, double floor) {
  const auto at = problem.A.entries.transpose();  // N x M view
  const RMatrix at2 = at.cwiseAbs2();
  const double sigma2_eff = std::max(problem.sigma2, floor);

  CavityWork w;
  const CMatrix contrib = at.cwiseProduct(msgs.xhat_ia);
  const RMatrix contrib_v = at2.cwiseProduct(msgs.nu_ia);
  w.z_full = contrib.colwise().sum();
  w.v_full = contrib_v.colwise().sum();
  w.z_cav = (-contrib).rowwise() + w.z_full;
  w.v_cav = (-contrib_v).rowwise() + w.v_full;
  w.p = (w.v_cav.array() + sigma2_eff).inverse();

  w.sigma = (at2.cwiseProduct(w.p)).rowwise().sum().array().inverse().max(floor);
  const CMatrix y_minus_z =
      ((-w.z_cav).rowwise() + problem.y.transpose()).cwiseProduct(
          w.p.cast<Complex>());
  w.rvec = w.sigma.cast<Complex>().cwiseProduct(
      at.conjugate().cwiseProduct(y_minus_z).rowwise().sum());
  return w;
}

}  // namespace

void ep_cavity(const EdgeMessages& msgs, const ProblemInstance& problem,
               RVector& Sigma, CVector& Rvec) {
  CavityWork w = compute_cavity(msgs, problem, 1e-12);
  Sigma = std::move(w.sigma);
  Rvec = std::move(w.rvec);
}

EdgeMessages ep_init(const ProblemInstance& problem) {
  problem.validate();
  const PriorMoments pm = prior_moments(problem.prior);
  EdgeMessages msgs;
  msgs.xhat_ia = CMatrix::Constant(problem.n(), problem.m(), pm.mean);
  // a zero prior variance (rho = 0, or tau -> 0 with rho = 1) still needs a
  // positive message variance
  msgs.nu_ia = RMatrix::Constant(problem.n(), problem.m(),
                                 std::max(pm.variance, 1e-12));
  msgs.t = 0;
  return msgs;
}

EpBeliefs ep_iterate(EdgeMessages& msgs, const ProblemInstance& problem,
                     double variance_floor) {
  const Index n = problem.n();
  const Index m = problem.m();
  if (msgs.xhat_ia.rows() != n || msgs.xhat_ia.cols() != m ||
      msgs.nu_ia.rows() != n || msgs.nu_ia.cols() != m) {
    throw ShapeError("ep_iterate: message shape mismatch");
  }

  const CavityWork w = compute_cavity(msgs, problem, variance_floor);

  EpBeliefs beliefs;
  beliefs.Sigma = w.sigma;
  beliefs.Rvec = w.rvec;
  beliefs.xhat.resize(n);
  beliefs.nu.resize(n);
  for (Index i = 0; i < n; ++i) {
    const DenoiserResult r = bg_denoise({w.rvec[i], w.sigma[i]}, problem.prior);
    beliefs.xhat[i] = r.mean;
    beliefs.nu[i] = r.variance;
  }

  // Gaussian division: belief / incoming factor message, per edge.
  const auto at = problem.A.entries.transpose();
  for (Index i = 0; i < n; ++i) {
    const double nu_i = beliefs.nu[i];
    const Complex x_i = beliefs.xhat[i];
    if (nu_i < 1e-300) {
      // point belief; the cavity correction is negligible
      for (Index a = 0; a < m; ++a) {
        msgs.xhat_ia(i, a) = x_i;
        msgs.nu_ia(i, a) = variance_floor;
      }
      msgs.clamp_count += m;
      continue;
    }
    const double inv_nu = 1.0 / nu_i;
    for (Index a = 0; a < m; ++a) {
      const Complex a_ia = at(i, a);
      const double pa = w.p(i, a);
      const double lam = inv_nu - std::norm(a_ia) * pa;
      if (lam > 0.0 && std::isfinite(lam)) {
        const Complex eta =
            x_i * inv_nu -
            std::conj(a_ia) * (problem.y[a] - w.z_cav(i, a)) * pa;
        msgs.xhat_ia(i, a) = eta / lam;
        msgs.nu_ia(i, a) = std::max(1.0 / lam, variance_floor);
      } else {
        msgs.xhat_ia(i, a) = x_i;
        msgs.nu_ia(i, a) = variance_floor;
        msgs.clamp_count += 1;
      }
    }
  }
  msgs.t += 1;
  return beliefs;
}

EpResult ep_run(const ProblemInstance& problem, int max_iters, double tol,
                double variance_floor) {
  if (max_iters < 1) throw ParameterError("ep_run: max_iters must be >= 1");
  problem.validate();

  EdgeMessages msgs = ep_init(problem);
  EpResult out;
  CVector x_prev = CVector::Constant(problem.n(), prior_moments(problem.prior).mean);
  for (int sweep = 0; sweep < max_iters; ++sweep) {
    const EpBeliefs beliefs = ep_iterate(msgs, problem, variance_floor);

    const auto at = problem.A.entries.transpose();
    TraceRow row;
    row.t = msgs.t;
    row.mse = problem.x_true ? mse(beliefs.xhat, *problem.x_true) : kNaN;
    row.mean_nu = beliefs.nu.mean();
    row.mean_Va = at.cwiseAbs2().cwiseProduct(msgs.nu_ia).colwise().sum().mean();
    row.residual =
        (problem.y.transpose() - at.cwiseProduct(msgs.xhat_ia).colwise().sum())
            .norm();
    out.trace.rows.push_back(row);

    const double change = (beliefs.xhat - x_prev).squaredNorm() /
                          std::max(x_prev.squaredNorm(), 1e-30);
    x_prev = beliefs.xhat;
    out.xhat = beliefs.xhat;
    out.nu = beliefs.nu;
    if (tol > 0.0 && change < tol) {
      out.trace.stop = StopReason::converged;
      out.clamp_count = msgs.clamp_count;
      return out;
    }
  }
  out.trace.stop = StopReason::max_iters;
  out.clamp_count = msgs.clamp_count;
  return out;
}

}  // namespace cbamp
