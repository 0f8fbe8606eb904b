#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plab {

// A solver produced a non-finite value.  step is the grid index at which the
// blow-up was first seen.
struct NumericalError : std::runtime_error {
  std::size_t step;
  NumericalError(const std::string& what, std::size_t step_)
      : std::runtime_error(what + " at step " + std::to_string(step_)), step(step_) {}
};

// An iterative scheme ran out of its iteration budget.
struct ConvergenceError : std::runtime_error {
  std::size_t iterations;
  ConvergenceError(const std::string& what, std::size_t iterations_)
      : std::runtime_error(what + " after " + std::to_string(iterations_) + " iterations"),
        iterations(iterations_) {}
};

}  // namespace plab
