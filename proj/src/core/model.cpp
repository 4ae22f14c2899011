#include "core/model.hpp"

#include <cmath>

#include "core/rng.hpp"
#include "json.hpp"

namespace cbamp {

void PriorBG::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ParameterError("prior: rho must lie in [0, 1]");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ParameterError("prior: tau must be positive and finite");
  }
  if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag())) {
    throw ParameterError("prior: mu must be finite");
  }
}

PriorMoments prior_moments(const PriorBG& prior) {
  prior.validate();
  const double rho = prior.rho;
  PriorMoments out;
  out.mean = rho * prior.mu;
  out.variance = rho * prior.tau + rho * (1.0 - rho) * std::norm(prior.mu);
  return out;
}

void ProblemInstance::validate() const {
  prior.validate();
  if (m() < 1 || n() < 1) throw ShapeError("problem: M, N must be >= 1");
  if (y.size() != m()) throw ShapeError("problem: len(y) != M");
  if (x_true && x_true->size() != n()) {
    throw ShapeError("problem: len(x_true) != N");
  }
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw ParameterError("problem: sigma2 must be >= 0 and finite");
  }
  if (!A.entries.allFinite()) throw ParameterError("problem: A has nonfinite entries");
  if (!y.allFinite()) throw ParameterError("problem: y has nonfinite entries");
}

CVector sample_signal(Index n, const PriorBG& prior, std::uint64_t seed) {
  prior.validate();
  if (n < 1) throw ParameterError("sample_signal: n must be >= 1");
  Rng rng(seed);
  CVector x(n);
  for (Index i = 0; i < n; ++i) {
    if (rng.uniform01() < prior.rho) {
      x[i] = rng.circular_gaussian(prior.mu, prior.tau);
    } else {
      x[i] = Complex(0.0, 0.0);
    }
  }
  return x;
}

MeasurementMatrix sample_matrix(Index m, Index n, double gamma,
                                std::uint64_t seed) {
  if (m < 1 || n < 1) throw ParameterError("sample_matrix: m, n must be >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("sample_matrix: gamma must be positive and finite");
  }
  Rng rng(seed);
  MeasurementMatrix A;
  A.gamma = gamma;
  A.entries.resize(m, n);
  // column-major fill order, part of the determinism contract
  Complex* p = A.entries.data();
  for (Index k = 0; k < m * n; ++k) {
    p[k] = rng.circular_gaussian(Complex(0.0, 0.0), gamma);
  }
  return A;
}

CVector measure(const MeasurementMatrix& A, const CVector& x, double sigma2,
                std::uint64_t seed) {
  if (x.size() != A.n()) throw ShapeError("measure: len(x) != N");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw ParameterError("measure: sigma2 must be >= 0 and finite");
  }
  CVector y = A.entries * x;
  if (sigma2 > 0.0) {
    Rng rng(seed);
    for (Index a = 0; a < y.size(); ++a) {
      y[a] += rng.circular_gaussian(Complex(0.0, 0.0), sigma2);
    }
  }
  return y;
}

double mse(const CVector& x_hat, const CVector& x) {
  if (x_hat.size() != x.size()) throw ShapeError("mse: length mismatch");
  return (x_hat - x).squaredNorm() / static_cast<double>(x.size());
}

ProblemInstance generate_problem(const ProblemSpec& spec) {
  if (spec.m < 1 || spec.n < 1) {
    throw ParameterError("problem spec: m, n must be >= 1");
  }
  spec.prior.validate();
  ProblemInstance p;
  p.A = sample_matrix(spec.m, spec.n, spec.effective_gamma(), spec.seed_a);
  p.prior = spec.prior;
  p.sigma2 = spec.sigma2;
  CVector x = sample_signal(spec.n, spec.prior, spec.seed_x);
  p.y = measure(p.A, x, spec.sigma2, spec.seed_w);
  p.x_true = std::move(x);
  return p;
}

std::string problem_spec_to_json(const ProblemSpec& spec) {
  nlohmann::json j;
  j["m"] = spec.m;
  j["n"] = spec.n;
  j["gamma"] = spec.effective_gamma();
  j["sigma2"] = spec.sigma2;
  j["prior"] = {{"rho", spec.prior.rho},
                {"mu_re", spec.prior.mu.real()},
                {"mu_im", spec.prior.mu.imag()},
                {"tau", spec.prior.tau}};
  j["seed_x"] = spec.seed_x;
  j["seed_a"] = spec.seed_a;
  j["seed_w"] = spec.seed_w;
  return j.dump(2);
}

ProblemSpec problem_spec_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ProblemSpec spec;
  spec.m = j.at("m").get<Index>();
  spec.n = j.at("n").get<Index>();
  spec.gamma = j.value("gamma", 0.0);
  spec.sigma2 = j.value("sigma2", 0.0);
  const auto& pj = j.at("prior");
  spec.prior.rho = pj.at("rho").get<double>();
  spec.prior.mu = Complex(pj.value("mu_re", 0.0), pj.value("mu_im", 0.0));
  spec.prior.tau = pj.at("tau").get<double>();
  spec.seed_x = j.value("seed_x", std::uint64_t{1});
  spec.seed_a = j.value("seed_a", std::uint64_t{2});
  spec.seed_w = j.value("seed_w", std::uint64_t{3});
  return spec;
}

}  // namespace cbamp
