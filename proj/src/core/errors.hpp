#pragma once

#include <stdexcept>
#include <string>

namespace cbamp {

// A parameter is outside its documented domain (rho not in [0,1], tau <= 0,
// nonfinite denoiser input, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Inconsistent vector/matrix dimensions.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A zero column of the measurement matrix makes Sigma_i infinite.
struct ColumnDegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nonfinite solver state; carries the iteration at which it was detected.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

// A bisection search range that does not bracket the sought boundary.
struct SearchRangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cbamp
