#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "plab/coefficients.hpp"
#include "plab/noise.hpp"

namespace plab {

// Equation solved on the grid, started at zero and kept nonnegative by a
// minimal local time l:
//   x_k = g_k + alpha * max_{j<=k} x_j + l_k,   0 <= alpha < 1/2,
//   g_{k+1} = g_k + sigma(x_k) dB_k + b(x_k) dt,
//   l_k = max_{j<=k} v_j,  v_j = max(0, -(g_j + alpha * m_j)).
struct ReflectedSpec {
  double alpha = 0.0;
  CoefficientField coeffs;
};

struct ReflectedPath {
  TimeGrid grid;
  std::vector<double> x;   // solution values, x_0 = 0
  std::vector<double> g;   // Euler cumulative integrator
  std::vector<double> m;   // running max of x
  std::vector<double> l;   // local time, nondecreasing from 0
  std::vector<double> v;   // reflection driver (-(g + alpha m)) clipped at 0
  std::vector<std::size_t> argmax_x;  // last j <= k attaining m_k
  std::vector<std::size_t> argmax_v;  // last j <= k attaining l_k
  std::vector<double> increments;     // copy of the driving dB
};

// Skorokhod reflection of a deterministic driver g (g[0] must be 0):
//   l_k = max(0, max_{j<=k} -g_j),  x_k = g_k + l_k.
// Returns (x, l).
std::pair<std::vector<double>, std::vector<double>> skorokhod_map(
    const std::vector<double>& g);

// Direct solver.  Each step resolves the pair (m, l) by the inner iteration
//   m <- max(m_k, G + alpha m + l),  l <- max(l_k, max(0, -(G + alpha m)))
// until the change drops below tol (throws ConvergenceError past max_inner).
ReflectedPath solve_stepwise(const ReflectedSpec& spec, const BrownianGrid& w,
                             double tol = 1e-12, std::size_t max_inner = 500);

// Picard sequence with the lagged running max: iterate 0 is identically 0;
// iterate m+1 freezes both the coefficients and the alpha-term at iterate m
// and applies the reflection principle to the resulting driver.  The stored
// m array of each iterate is the running max of its own x.
std::vector<ReflectedPath> solve_picard_reflected(const ReflectedSpec& spec,
                                                  const BrownianGrid& w,
                                                  std::size_t n_iter);

// Measured invariants.  Residual is relative to 1 + |x_k|.  complementarity
// is sum_k x_k (l_{k+1} - l_k), evaluated at the pre-push value, so its
// natural size on a correct path is sqrt(dt) * l_n; the default tolerance is
// 10 * sqrt(dt) * max(1, max|x|) * max(sqrt(dt), l_n).
// Picard iterates satisfy everything except the equation
// residual, which they only approach in the limit (their alpha-term uses the
// previous iterate's max); use ok_structural for them.
struct ReflectedDiagnostics {
  double min_x = 0.0;
  bool local_time_monotone = false;  // l nondecreasing, l_0 = 0
  double complementarity = 0.0;
  double complementarity_tol = 0.0;
  double max_reflection_identity_error = 0.0;  // l vs running max of v
  double max_equation_residual = 0.0;          // x - (g + alpha m + l)
  bool running_max_consistent = false;

  bool ok_structural(double tol = 1e-10) const {
    return min_x >= -1e-12 && local_time_monotone && running_max_consistent &&
           complementarity <= complementarity_tol &&
           max_reflection_identity_error <= tol;
  }
  bool ok(double tol = 1e-10) const {
    return ok_structural(tol) && max_equation_residual <= tol;
  }
};

ReflectedDiagnostics check_reflected_path(const ReflectedPath& path,
                                          const ReflectedSpec& spec,
                                          double comp_tol_multiplier = 10.0);

}  // namespace plab
