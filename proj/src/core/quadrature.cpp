#include "core/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "core/errors.hpp"

namespace cbamp {

namespace {

HermiteRule build_rule(int n) {
  // Golub-Welsch: Jacobi matrix of the Hermite recurrence has zero diagonal
  // and off-diagonal sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  HermiteRule rule;
  rule.nodes = es.eigenvalues();
  rule.log_weights.resize(n);
  const double log_sqrt_pi = 0.5 * std::log(M_PI);
  for (int j = 0; j < n; ++j) {
    // w_j = sqrt(pi) * v0^2 with v0 the first component of the normalized
    // eigenvector
    const double v0 = es.eigenvectors()(0, j);
    rule.log_weights[j] = log_sqrt_pi + 2.0 * std::log(std::abs(v0));
  }
  return rule;
}

}  // namespace

const HermiteRule& hermite_rule(int n) {
  if (n < 1) throw ParameterError("hermite_rule: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<HermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<HermiteRule>(build_rule(n))).first;
  }
  return *it->second;
}

}  // namespace cbamp
