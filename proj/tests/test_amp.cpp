#include <chrono>
#include <cmath>

#include "core/amp.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace cbamp;

namespace {

ProblemInstance make_instance(Index n, Index m, const PriorBG& prior,
                              double sigma2, std::uint64_t seed) {
  ProblemSpec spec;
  spec.n = n;
  spec.m = m;
  spec.sigma2 = sigma2;
  spec.prior = prior;
  spec.seed_x = mix_seed(seed, 1);
  spec.seed_a = mix_seed(seed, 2);
  spec.seed_w = mix_seed(seed, 3);
  return generate_problem(spec);
}

}  // namespace

TEST_SUITE_BEGIN("amp");

TEST_CASE("amp_init") {
  const ProblemInstance p = make_instance(16, 8, {0.1, {0, 0}, 1.0}, 0.01, 1);
  const SolverState s = AmpSolver(p, SolverConfig{}).init();
  CHECK(s.xhat.size() == 16);
  CHECK(s.Va.size() == 8);
  CHECK(s.xhat.norm() == 0.0);
  CHECK(s.nu[0] == doctest::Approx(0.1));
  CHECK(s.Va[0] == 1.0);
  CHECK(s.Za == p.y);
  CHECK(s.t == 1);

  const ProblemInstance q = make_instance(8, 4, {1.0, {1, 1}, 2.0}, 0.01, 2);
  const SolverState sq = AmpSolver(q, SolverConfig{}).init();
  CHECK(sq.xhat[3] == Complex(1, 1));
  CHECK(sq.nu[2] == doctest::Approx(2.0));
}

TEST_CASE("factor_update hand example") {
  // N=2, M=1, A=[1, i], xhat=(1,1), nu=(.5,.5), sigma2=1, V0=1, Z0=y=2
  ProblemInstance p;
  p.A.gamma = 1.0;
  p.A.entries.resize(1, 2);
  p.A.entries << Complex(1, 0), Complex(0, 1);
  p.y = CVector::Constant(1, Complex(2, 0));
  p.sigma2 = 1.0;
  p.prior = {1.0, {0, 0}, 1.0};
  p.x_true.reset();

  SolverConfig cfg;
  cfg.sigma2_floor = 1e-12;
  AmpSolver solver(p, cfg);
  SolverState s = solver.init();
  s.xhat = CVector::Constant(2, Complex(1, 0));
  s.nu = RVector::Constant(2, 0.5);
  s.Va = RVector::Constant(1, 1.0);
  s.Za = CVector::Constant(1, Complex(2, 0));

  solver.factor_update(s);
  CHECK(s.Va[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.Za[0].real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.Za[0].imag() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("factor_update zero-variance limit") {
  const ProblemInstance p = make_instance(8, 4, {0.5, {1, 0}, 1.0}, 0.1, 3);
  AmpSolver solver(p, SolverConfig{});
  SolverState s = solver.init();
  s.nu.setZero();
  s.Za.setRandom();
  solver.factor_update(s);
  CHECK(s.Va.norm() == 0.0);
  CHECK((s.Za - p.A.entries * s.xhat).norm() == 0.0);
}

TEST_CASE("first iteration Onsager term vanishes") {
  const ProblemInstance p = make_instance(12, 6, {0.2, {0, 0}, 1.0}, 0.05, 4);
  AmpSolver solver(p, SolverConfig{});
  SolverState s = solver.init();
  solver.factor_update(s);
  CHECK((s.Za - p.A.entries * s.xhat).norm() == 0.0);  // Z0 = y exactly
}

TEST_CASE("variable_update hand example") {
  ProblemInstance p;
  p.A.gamma = 1.0;
  p.A.entries = CMatrix::Identity(1, 1);
  p.y = CVector::Constant(1, Complex(1, 0));
  p.sigma2 = 1.0;
  p.prior = {1.0, {0, 0}, 1.0};

  AmpSolver solver(p, SolverConfig{});
  SolverState s = solver.init();
  s.xhat = CVector::Zero(1);
  s.nu = RVector::Constant(1, 1.0);
  s.Va = RVector::Zero(1);  // V^1 = 0
  s.Za = CVector::Zero(1);  // y - Z^1 = 1
  s.t = 1;

  solver.variable_update(s);
  CHECK(s.Sigma[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.Rvec[0].real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.xhat[0].real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.t == 2);
}

TEST_CASE("residual zero means pure re-denoising") {
  const ProblemInstance p = make_instance(8, 4, {0.3, {0, 0}, 1.0}, 0.1, 5);
  AmpSolver solver(p, SolverConfig{});
  SolverState s = solver.init();
  solver.factor_update(s);
  s.Za = p.y;  // force zero residual
  const CVector xhat_before = s.xhat;
  solver.variable_update(s);
  CHECK((s.Rvec - xhat_before).norm() == 0.0);
}

TEST_CASE("Sigma positive for generic matrices") {
  const ProblemInstance p = make_instance(32, 16, {0.2, {0, 0}, 1.0}, 0.01, 6);
  AmpSolver solver(p, SolverConfig{});
  SolverState s = solver.init();
  solver.factor_update(s);
  solver.variable_update(s);
  CHECK((s.Sigma.array() > 0.0).all());
}

TEST_CASE("gaussian prior fixed point equals LMMSE") {
  const PriorBG prior{1.0, {0.3, -0.2}, 1.0};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemInstance p = make_instance(64, 32, prior, 0.25, 100 + seed);
    SolverConfig cfg;
    cfg.max_iters = 3000;
    cfg.tol = 1e-16;
    const SolveResult res = amp_run(p, cfg);
    const CVector exact = oracle::lmmse_complex(p);
    CHECK((res.xhat - exact).norm() / exact.norm() < 1e-4);
  }
}

TEST_CASE("zero measurement keeps the symmetric fixed point") {
  ProblemInstance p = make_instance(32, 16, {0.2, {0, 0}, 1.0}, 0.0, 8);
  p.y.setZero();
  SolverConfig cfg;
  cfg.max_iters = 10;
  cfg.tol = 0.0;
  const SolveResult res = amp_run(p, cfg);
  CHECK(res.xhat.norm() == 0.0);
  const double power = p.x_true->squaredNorm() / p.n();
  for (const TraceRow& row : res.trace.rows) {
    CHECK(row.mse == doctest::Approx(power).epsilon(1e-14));
  }
}

TEST_CASE("phase covariance on noiseless instances") {
  ProblemInstance p = make_instance(48, 24, {0.2, {0, 0}, 1.0}, 0.0, 9);
  const Complex phase = std::polar(1.0, 1.234);
  ProblemInstance rotated = p;
  rotated.y = phase * p.y;
  *rotated.x_true = phase * *p.x_true;

  for (int iters : {1, 4, 9}) {
    SolverConfig cfg;
    cfg.max_iters = iters;
    cfg.tol = 0.0;
    const SolveResult a = amp_run(p, cfg);
    const SolveResult b = amp_run(rotated, cfg);
    const double scale = std::max(1.0, a.xhat.norm());
    CHECK((b.xhat - phase * a.xhat).norm() / scale < 1e-12);
  }
}

TEST_CASE("permutation equivariance") {
  const ProblemInstance p = make_instance(32, 16, {0.25, {0, 0}, 1.0}, 1e-4, 10);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(32);
  perm.setIdentity();
  Rng rng(123);
  for (Index i = 31; i > 0; --i) {
    const Index j = static_cast<Index>(rng.uniform01() * (i + 1));
    std::swap(perm.indices()[i], perm.indices()[j]);
  }
  ProblemInstance permuted = p;
  permuted.A.entries = p.A.entries * perm;
  *permuted.x_true = perm.transpose() * *p.x_true;

  SolverConfig cfg;
  cfg.max_iters = 200;
  const SolveResult a = amp_run(p, cfg);
  const SolveResult b = amp_run(permuted, cfg);
  const CVector unpermuted = perm * b.xhat;
  CHECK((unpermuted - a.xhat).norm() / a.xhat.norm() < 1e-8);
}

TEST_CASE("onsager term improves the fixed point") {
  int better = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemInstance p =
        make_instance(256, 128, {0.1, {0, 0}, 1.0}, 1e-4, 200 + seed);
    SolverConfig with;
    with.max_iters = 60;
    SolverConfig without = with;
    without.onsager = false;
    const double mse_with = mse(amp_run(p, with).xhat, *p.x_true);
    const double mse_without = mse(amp_run(p, without).xhat, *p.x_true);
    if (mse_with < mse_without) better++;
  }
  CHECK(better >= 4);
}

TEST_CASE("trace contracts and stop reasons") {
  const ProblemInstance p = make_instance(32, 16, {0.2, {0, 0}, 1.0}, 1e-4, 11);

  SolverConfig fixed;
  fixed.max_iters = 7;
  fixed.tol = 0.0;
  const SolveResult full = amp_run(p, fixed);
  CHECK(full.trace.rows.size() == 8);  // init row + one per sweep
  CHECK(full.trace.stop == StopReason::max_iters);
  for (std::size_t k = 0; k < full.trace.rows.size(); ++k) {
    CHECK(full.trace.rows[k].t == static_cast<int>(k + 1));
  }

  SolverConfig tolcfg;
  tolcfg.max_iters = 500;
  tolcfg.tol = 1e-10;
  const SolveResult conv = amp_run(p, tolcfg);
  CHECK(conv.trace.stop == StopReason::converged);
  CHECK(conv.trace.rows.size() < 500);
}

TEST_CASE("config validation") {
  SolverConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = SolverConfig{};
  bad.damping = 1.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = SolverConfig{};
  bad.sigma2_floor = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = SolverConfig{};
  bad.tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("zero column raises degeneracy error") {
  ProblemInstance p = make_instance(8, 4, {0.2, {0, 0}, 1.0}, 0.01, 12);
  p.A.entries.col(3).setZero();
  CHECK_THROWS_AS(AmpSolver(p, SolverConfig{}), ColumnDegeneracyError);
}

TEST_CASE("divergence carries the iteration index") {
  const ProblemInstance p = make_instance(8, 4, {0.2, {0, 0}, 1.0}, 0.01, 13);
  AmpSolver solver(p, SolverConfig{});
  SolverState s = solver.init();
  s.t = 5;
  s.nu[0] = std::numeric_limits<double>::infinity();
  try {
    solver.factor_update(s);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& err) {
    CHECK(err.iteration() == 5);
  }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("bench");

TEST_CASE("per-iteration cost scales linearly in MN") {
  auto per_sweep_seconds = [](Index n) {
    const ProblemInstance p =
        make_instance(n, n / 2, {0.1, {0, 0}, 1.0}, 1e-4, 777);
    const AmpSolver solver(p, SolverConfig{});
    auto time_sweeps = [&](int sweeps) {
      SolverState s = solver.init();
      const auto start = std::chrono::steady_clock::now();
      for (int k = 0; k < sweeps; ++k) {
        solver.factor_update(s);
        solver.variable_update(s);
      }
      return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                           start)
          .count();
    };
    time_sweeps(2);  // warm up
    double best = 1e100;
    for (int rep = 0; rep < 5; ++rep) {
      const double t12 = time_sweeps(12);
      const double t2 = time_sweeps(2);
      best = std::min(best, (t12 - t2) / 10.0);
    }
    return best;
  };

  const double small = per_sweep_seconds(1024);
  const double large = per_sweep_seconds(2048);
  const double ratio = large / small;  // MN grows 4x
  CHECK(ratio > 4.0 * 0.7);
  CHECK(ratio < 4.0 * 1.3);
}

TEST_SUITE_END();
