#pragma once

#include <Eigen/Dense>

namespace cbamp {

/// Gauss-Hermite rule for the weight exp(-t^2): sum_j w_j f(t_j)
/// approximates the integral of exp(-t^2) f(t) over the real line.
/// Weights are kept in log form; at high order the edge weights underflow
/// long before their logs do.
struct HermiteRule {
  Eigen::VectorXd nodes;        // ascending
  Eigen::VectorXd log_weights;  // log w_j
};

/// Returns the cached n-point rule (Golub-Welsch). Thread-safe.
const HermiteRule& hermite_rule(int n);

}  // namespace cbamp
