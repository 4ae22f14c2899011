#include "core/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core/quadrature.hpp"

namespace cbamp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_input(const DenoiserInput& in) {
  if (!std::isfinite(in.R.real()) || !std::isfinite(in.R.imag())) {
    throw ParameterError("denoise: R must be finite");
  }
  if (!(in.Sigma > 0.0) || !std::isfinite(in.Sigma)) {
    throw ParameterError("denoise: Sigma must be positive and finite");
  }
}

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

DenoiserResult bg_denoise(const DenoiserInput& in, const PriorBG& prior) {
  check_input(in);
  prior.validate();
  const double rho = prior.rho;
  const double tau = prior.tau;
  const double sigma = in.Sigma;

  const double V = tau * sigma / (sigma + tau);
  const Complex m = (tau * in.R + sigma * prior.mu) / (sigma + tau);

  // log weights of the two posterior mixture components
  const double log_w0 =
      rho >= 1.0 ? kNegInf : std::log1p(-rho) - std::norm(in.R) / sigma;
  const double log_w1 = rho <= 0.0
                            ? kNegInf
                            : std::log(rho) + std::log(sigma / (sigma + tau)) -
                                  std::norm(in.R - prior.mu) / (sigma + tau);

  double pi1;  // slab responsibility
  if (rho <= 0.0) {
    pi1 = 0.0;
  } else if (rho >= 1.0) {
    pi1 = 1.0;
  } else {
    // logistic in the log-weight gap; exp saturates to 0/inf harmlessly
    pi1 = 1.0 / (1.0 + std::exp(log_w0 - log_w1));
  }

  DenoiserResult out;
  out.mean = pi1 * m;
  out.variance = pi1 * V + pi1 * (1.0 - pi1) * std::norm(m);
  out.log_evidence = log_sum_exp(log_w0, log_w1);
  return out;
}

DenoiserResult quadrature_denoise(const DenoiserInput& in, const PriorBG& prior,
                                  int nodes) {
  check_input(in);
  prior.validate();
  if (nodes < 16) throw ParameterError("quadrature_denoise: nodes must be >= 16");

  const double rho = prior.rho;
  const double tau = prior.tau;
  const double sigma = in.Sigma;

  struct Atom {
    double logw;
    Complex x;
  };
  std::vector<Atom> atoms;
  atoms.reserve(1 + static_cast<std::size_t>(nodes) * nodes);

  // exact point-mass component
  if (rho < 1.0) {
    atoms.push_back({std::log1p(-rho) - std::norm(in.R) / sigma, Complex(0, 0)});
  }

  if (rho > 0.0) {
    const auto& rule = hermite_rule(nodes);
    // Nodes are placed on the slab-likelihood product (center m, per-axis
    // scale sqrt(1.5 V)); weights below re-evaluate the integrand exactly at
    // each node, so placement affects efficiency only.
    const double V = tau * sigma / (sigma + tau);
    const Complex center = (tau * in.R + sigma * prior.mu) / (sigma + tau);
    const double scale = std::sqrt(1.5 * V);
    const double log_scale2 = 2.0 * std::log(scale);
    const double log_rho = std::log(rho);
    const double log_pi_tau = std::log(M_PI * tau);
    for (int j = 0; j < nodes; ++j) {
      const double tj = rule.nodes[j];
      for (int k = 0; k < nodes; ++k) {
        const double tk = rule.nodes[k];
        const Complex x = center + scale * Complex(tj, tk);
        const double logw = log_scale2 + rule.log_weights[j] +
                            rule.log_weights[k] + tj * tj + tk * tk + log_rho -
                            log_pi_tau - std::norm(x - prior.mu) / tau -
                            std::norm(x - in.R) / sigma;
        atoms.push_back({logw, x});
      }
    }
  }

  double lmax = kNegInf;
  for (const Atom& a : atoms) lmax = std::max(lmax, a.logw);

  double wsum = 0.0;
  Complex mean_num(0.0, 0.0);
  double second_num = 0.0;
  for (const Atom& a : atoms) {
    const double w = std::exp(a.logw - lmax);
    wsum += w;
    mean_num += w * a.x;
    second_num += w * std::norm(a.x);
  }

  DenoiserResult out;
  out.mean = mean_num / wsum;
  out.variance = std::max(second_num / wsum - std::norm(out.mean), 0.0);
  out.log_evidence = lmax + std::log(wsum);
  return out;
}

}  // namespace cbamp
