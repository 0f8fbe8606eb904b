#pragma once

#include <cstddef>
#include <vector>

#include "plab/coefficients.hpp"
#include "plab/noise.hpp"

namespace plab {

// Equation solved on the grid:
//   y_k = y0 + C_k + alpha * max_{j<=k} y_j,        alpha < 1,
// where C is the Euler cumulative integrator
//   C_{k+1} = C_k + sigma(y_k) dB_k + b(y_k) dt.
struct PerturbedSpec {
  double y0 = 0.0;
  double alpha = 0.0;
  CoefficientField coeffs;
};

// Discrete trajectory together with the running-max bookkeeping the
// derivative propagation needs.  All arrays run over grid points 0..n except
// increments, which holds the driving noise (one entry per step).
struct ProcessPath {
  TimeGrid grid;
  std::vector<double> y;                // solution values
  std::vector<double> cumulative;       // C_k
  std::vector<double> running_max_cum;  // F_k = max_{j<=k} C_j
  std::vector<std::size_t> argmax_index;  // last j <= k attaining F_k
  std::vector<double> m;                // running max of y
  std::vector<double> increments;       // copy of the driving dB
};

// Direct solver.  Uses the running-max identity
//   y_k = y0/(1-alpha) + C_k + (alpha/(1-alpha)) F_k,
//   m_k = (y0 + F_k)/(1-alpha),
// with coefficients evaluated along the solution itself.
ProcessPath solve_closed_form(const PerturbedSpec& spec, const BrownianGrid& w);

// Independent oracle: iterates the defining equation directly,
//   y^{new}_k = y0 + C_k(y^{new}) + alpha * max_{j<=k} y^{old}_j,
// lagging only the running max, until the sup change drops below tol.
// Shares no code path with solve_closed_form beyond the data types.
ProcessPath solve_fixed_point_oracle(const PerturbedSpec& spec, const BrownianGrid& w,
                                     double tol, std::size_t max_iter,
                                     std::size_t* iterations_out = nullptr);

// Picard sequence: iterate 0 is the constant path y0/(1-alpha); iterate m+1
// rebuilds C with coefficients frozen along iterate m and applies the
// running-max identity.  Returns iterates 0..n_iter.
std::vector<ProcessPath> solve_picard(const PerturbedSpec& spec, const BrownianGrid& w,
                                      std::size_t n_iter);

// Measured invariants of a returned path, all maxima over grid points.
// Residuals are relative to 1 + |y_k|.
struct PathDiagnostics {
  double max_equation_residual = 0.0;   // y - (y0 + C + alpha m)
  double max_closed_form_error = 0.0;   // y - (y0/(1-a) + C + a/(1-a) F)
  double max_identity_error = 0.0;      // m - (y0 + F)/(1-a)
  bool running_max_consistent = false;  // F/argmax/m really are running maxima
  bool initial_value_ok = false;        // y_0 = y0/(1-alpha)

  bool ok(double tol = 1e-12) const {
    return running_max_consistent && initial_value_ok && max_equation_residual <= tol &&
           max_closed_form_error <= tol && max_identity_error <= tol;
  }
};

PathDiagnostics check_process_path(const ProcessPath& path, const PerturbedSpec& spec);

}  // namespace plab
