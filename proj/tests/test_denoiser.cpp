#include <cmath>
#include <complex>

#include "core/denoiser.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace cbamp;

TEST_SUITE_BEGIN("denoiser");

TEST_CASE("hermite rule against tabulated 5-point values") {
  // Abramowitz & Stegun table 25.10
  const auto& rule = hermite_rule(5);
  const double nodes[5] = {-2.020182870456086, -0.958572464613819, 0.0,
                           0.958572464613819, 2.020182870456086};
  const double weights[5] = {0.019953242059046, 0.393619323152241,
                             0.945308720482942, 0.393619323152241,
                             0.019953242059046};
  for (int j = 0; j < 5; ++j) {
    CHECK(rule.nodes[j] == doctest::Approx(nodes[j]).epsilon(1e-12));
    CHECK(std::exp(rule.log_weights[j]) ==
          doctest::Approx(weights[j]).epsilon(1e-12));
  }
}

TEST_CASE("hermite rule integrates moments") {
  const auto& rule = hermite_rule(64);
  double total = 0.0, second = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double w = std::exp(rule.log_weights[j]);
    total += w;
    second += w * rule.nodes[j] * rule.nodes[j];
  }
  CHECK(total == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  CHECK(second == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-13));
}

TEST_CASE("bg_denoise pure Gaussian prior") {
  const DenoiserResult r = bg_denoise({Complex(1, 0), 1.0}, {1.0, {0, 0}, 1.0});
  CHECK(r.mean.real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.mean.imag() == 0.0);
  CHECK(r.variance == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("bg_denoise symmetry at R = 0") {
  const DenoiserResult r = bg_denoise({Complex(0, 0), 0.7}, {0.1, {0, 0}, 1.0});
  CHECK(r.mean == Complex(0, 0));
}

TEST_CASE("bg_denoise rho = 0 exact contract") {
  const Complex R(3, -2);
  const double sigma = 0.25;
  const DenoiserResult r = bg_denoise({R, sigma}, {0.0, {0, 0}, 1.0});
  CHECK(r.mean == Complex(0, 0));
  CHECK(r.variance == 0.0);
  CHECK(r.log_evidence == doctest::Approx(-std::norm(R) / sigma).epsilon(1e-15));
}

TEST_CASE("bg_denoise domain errors") {
  CHECK_THROWS_AS(bg_denoise({Complex(0, 0), 0.0}, {0.1, {0, 0}, 1.0}),
                  ParameterError);
  CHECK_THROWS_AS(bg_denoise({Complex(0, 0), -1.0}, {0.1, {0, 0}, 1.0}),
                  ParameterError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bg_denoise({Complex(inf, 0), 1.0}, {0.1, {0, 0}, 1.0}),
                  ParameterError);
  CHECK_THROWS_AS(
      bg_denoise({Complex(0, 0), std::numeric_limits<double>::quiet_NaN()},
                 {0.1, {0, 0}, 1.0}),
      ParameterError);
}

TEST_CASE("bg_denoise survives extreme exponents") {
  // |R|^2 / Sigma up to 1e6 and a strongly informative slab
  const DenoiserResult a =
      bg_denoise({Complex(1000, 0), 1.0}, {0.1, {0, 0}, 1.0});
  CHECK(std::isfinite(a.mean.real()));
  CHECK(std::isfinite(a.variance));
  CHECK(std::isfinite(a.log_evidence));
  CHECK(a.variance >= 0.0);

  const DenoiserResult b =
      bg_denoise({Complex(-3000, 10), 1e-3}, {0.9, {5, 5}, 10.0});
  CHECK(std::isfinite(b.mean.real()));
  CHECK(std::isfinite(b.variance));
  CHECK(b.variance >= 0.0);
}

TEST_CASE("quadrature_denoise point mass only") {
  const DenoiserResult r =
      quadrature_denoise({Complex(2, 1), 0.5}, {0.0, {0, 0}, 1.0}, 32);
  CHECK(r.mean == Complex(0, 0));
  CHECK(r.variance == 0.0);
}

TEST_CASE("quadrature_denoise Gaussian case high accuracy") {
  const DenoiserResult r =
      quadrature_denoise({Complex(1, 0), 1.0}, {1.0, {0, 0}, 1.0}, 64);
  CHECK(std::abs(r.mean - Complex(0.5, 0)) < 1e-10);
  CHECK(r.variance == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("quadrature_denoise nodes precondition") {
  CHECK_THROWS_AS(quadrature_denoise({Complex(0, 0), 1.0}, {0.1, {0, 0}, 1.0}, 8),
                  ParameterError);
}

TEST_CASE("closed form vs quadrature spot checks") {
  {
    const PriorBG prior{0.1, {0, 0}, 1.0};
    const DenoiserInput in{Complex(2, 1), 0.5};
    const DenoiserResult cf = bg_denoise(in, prior);
    const DenoiserResult q = quadrature_denoise(in, prior, 128);
    CHECK(std::abs(cf.mean - q.mean) < 1e-8);
    CHECK(std::abs(cf.variance - q.variance) < 1e-8);
  }
  {
    const PriorBG prior{0.5, {1, 1}, 2.0};
    const DenoiserInput in{Complex(-1, 0), 0.3};
    const DenoiserResult cf = bg_denoise(in, prior);
    const DenoiserResult q = quadrature_denoise(in, prior, 96);
    CHECK(std::abs(cf.mean - q.mean) < 1e-8);
    CHECK(std::abs(cf.variance - q.variance) < 1e-8);
    CHECK(cf.log_evidence == doctest::Approx(q.log_evidence).epsilon(1e-8));
  }
}

TEST_CASE("oracle equivalence over a random input grid") {
  Rng rng(314159);
  const double rhos[] = {0.05, 0.1, 0.5, 0.9, 1.0};
  double max_mean_err = 0.0, max_var_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    PriorBG prior;
    prior.rho = rhos[k % 5];
    prior.mu = Complex(4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0);
    prior.tau = std::pow(10.0, 1.2 * rng.uniform01() - 0.6);
    DenoiserInput in;
    in.R = Complex(20.0 * rng.uniform01() - 10.0, 20.0 * rng.uniform01() - 10.0);
    in.Sigma = std::pow(10.0, 6.0 * rng.uniform01() - 3.0);
    const DenoiserResult cf = bg_denoise(in, prior);
    const DenoiserResult q = quadrature_denoise(in, prior, 128);
    max_mean_err = std::max(max_mean_err, std::abs(cf.mean - q.mean));
    max_var_err = std::max(max_var_err, std::abs(cf.variance - q.variance));
  }
  CHECK(max_mean_err < 1e-8);
  CHECK(max_var_err < 1e-8);
}

TEST_CASE("variance nonnegative over random inputs") {
  Rng rng(2718);
  for (int k = 0; k < 1000; ++k) {
    PriorBG prior;
    prior.rho = rng.uniform01();
    prior.mu = Complex(6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0);
    prior.tau = std::pow(10.0, 2.0 * rng.uniform01() - 1.0);
    DenoiserInput in;
    in.R = Complex(30.0 * rng.uniform01() - 15.0, 30.0 * rng.uniform01() - 15.0);
    in.Sigma = std::pow(10.0, 6.0 * rng.uniform01() - 3.0);
    const DenoiserResult r = bg_denoise(in, prior);
    CHECK(r.variance >= 0.0);
    CHECK(std::isfinite(r.variance));
    CHECK(std::isfinite(r.mean.real()));
  }
}

TEST_CASE("phase equivariance at mu = 0") {
  const PriorBG prior{0.2, {0, 0}, 1.5};
  Rng rng(55);
  for (int k = 0; k < 50; ++k) {
    const Complex R(4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0);
    const double sigma = std::pow(10.0, 2.0 * rng.uniform01() - 1.0);
    const double theta = 6.28 * rng.uniform01();
    const Complex phase = std::polar(1.0, theta);
    const DenoiserResult base = bg_denoise({R, sigma}, prior);
    const DenoiserResult rot = bg_denoise({phase * R, sigma}, prior);
    CHECK(std::abs(rot.mean - phase * base.mean) <=
          1e-12 * std::max(1.0, std::abs(base.mean)));
    CHECK(rot.variance ==
          doctest::Approx(base.variance).epsilon(1e-12));
  }
}

TEST_CASE("shrinkage at mu = 0") {
  const PriorBG prior{0.3, {0, 0}, 2.0};
  Rng rng(66);
  for (int k = 0; k < 200; ++k) {
    const Complex R(8.0 * rng.uniform01() - 4.0, 8.0 * rng.uniform01() - 4.0);
    const double sigma = std::pow(10.0, 4.0 * rng.uniform01() - 2.0);
    const DenoiserResult r = bg_denoise({R, sigma}, prior);
    const double m_abs = prior.tau * std::abs(R) / (sigma + prior.tau);
    CHECK(std::abs(r.mean) <= m_abs * (1.0 + 1e-12));
  }
}

TEST_CASE("limits") {
  const PriorBG prior{0.4, {1, -1}, 2.0};

  // Sigma -> infinity recovers the prior moments
  const PriorMoments pm = prior_moments(prior);
  const DenoiserResult wide = bg_denoise({Complex(0.5, 0.5), 1e12}, prior);
  CHECK(std::abs(wide.mean - pm.mean) < 1e-6);
  CHECK(wide.variance == doctest::Approx(pm.variance).epsilon(1e-6));

  // rho = 1 gives the Gaussian product exactly
  const PriorBG gauss{1.0, {1, -1}, 2.0};
  const Complex R(0.3, 0.9);
  const double sigma = 0.7;
  const DenoiserResult g = bg_denoise({R, sigma}, gauss);
  const Complex m = (gauss.tau * R + sigma * gauss.mu) / (sigma + gauss.tau);
  CHECK(g.mean == m);
  CHECK(g.variance == gauss.tau * sigma / (sigma + gauss.tau));
}

TEST_SUITE_END();
