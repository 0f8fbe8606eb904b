#pragma once
// Pathwise sensitivity fields: the derivative of the solution at every grid
// time with respect to a Brownian perturbation at every earlier grid time,
// propagated along one simulated path. The running-max feedback enters through
// the stored argmax indices: the derivative of a running max is the derivative
// at its (last) argmax.
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "plab/noise.hpp"
#include "plab/perturbed.hpp"
#include "plab/reflected.hpp"

namespace plab {

// Lower-triangular sensitivity array. Row i (1 <= i <= n) starts at column
// j = i, where the integrator sensitivity is initialized to the diffusion
// coefficient at t_i, and is propagated forward to column n. Entries with
// j < i are identically zero (a perturbation at t_i cannot move the path
// before t_i) and are not stored.
struct DerivativeField {
  TimeGrid grid;
  std::vector<double> u;   // solution sensitivity
  std::vector<double> v;   // integrator sensitivity (dC, or dG when reflected)
  std::vector<double> dm;  // running-max sensitivity; reflected fields only
  std::vector<double> dl;  // local-time sensitivity; reflected fields only

  std::size_t n() const { return grid.n_steps; }
  // packed offset of (i, j); requires 1 <= i <= j <= n
  std::size_t index(std::size_t i, std::size_t j) const;
  // accessors return 0 for j < i or i == 0, the unstored zero region
  double u_at(std::size_t i, std::size_t j) const;
  double v_at(std::size_t i, std::size_t j) const;

  // Row over perturbation times at fixed column j: entry k (0 <= k < j) is
  // u(k+1, j), aligned with increment k so it pairs directly against a shift
  // density h via pair_h.
  std::vector<double> row_at(std::size_t j) const;
  std::vector<double> terminal_row() const;  // row_at(n)
};

// Monte Carlo aggregate of squared H-norms. For a single-path computation
// only value is meaningful (the aggregates are set equal to it). For the
// reflected reports, paths whose terminal value sits exactly on the boundary
// carry an identically zero sensitivity row on the discrete grid; they are
// counted in n_boundary/boundary_fraction and left out of the statistics.
struct HNormStat {
  double value = 0.0;
  double min_over_paths = 0.0;
  double q01 = 0.0;  // lower empirical 1% quantile
  double q50 = 0.0;  // median
  double fraction_zero = 0.0;  // fraction of retained paths below 1e-10
  double boundary_fraction = 0.0;
  std::size_t n_paths = 0;    // paths entering the statistics
  std::size_t n_boundary = 0;
};

// Full lower-triangular propagation, O(n^2) time and memory. Guarded to
// n <= 4096; use the terminal_row_* functions on larger grids.
DerivativeField propagate_perturbed(const ProcessPath& path, const PerturbedSpec& spec);
DerivativeField propagate_reflected(const ReflectedPath& path, const ReflectedSpec& spec);

// Terminal sensitivity row (the column at j = n, indexed by increment) in
// O(n^2) time but O(n) memory.
std::vector<double> terminal_row_perturbed(const ProcessPath& path, const PerturbedSpec& spec);
std::vector<double> terminal_row_reflected(const ReflectedPath& path, const ReflectedSpec& spec);

// dt * sum of squares over rows 1..t_index at column t_index: the quadrature
// of the squared H-norm of the sensitivity of the value at t_index.
HNormStat h_norm_squared(const DerivativeField& field, std::size_t t_index);
double h_norm_from_row(const std::vector<double>& row, double dt);

// Central-difference directional derivative of a path functional along the
// shift direction h: (F(w + eps h) - F(w - eps h)) / (2 eps).
double directional_fd(const std::function<double(const BrownianGrid&)>& functional,
                      const BrownianGrid& w, const CameronMartinShift& h, double eps);
// Terminal-value conveniences for the two equations.
double directional_fd(const PerturbedSpec& spec, const BrownianGrid& w,
                      const CameronMartinShift& h, double eps);
double directional_fd(const ReflectedSpec& spec, const BrownianGrid& w,
                      const CameronMartinShift& h, double eps);

// Finite-difference comparisons are meaningless across renewal switches: the
// map w -> x_n is piecewise smooth and a path is rejected when a switch could
// flip inside the difference stencil. Window widths scale with sqrt(dt):
// rejection when the last renewal of the max or of the local time lies within
// window_mult*sqrt(dt) of the horizon, when the terminal point is that close
// to renewing either one, when a competitor separated by more than the window
// in time approaches the final max (of x, or of v) within
// window_mult*sigma_hat*sqrt(dt), or when a never-reflected path approaches
// the boundary that closely after the initial window.
bool fd_exclude_reflected(const ReflectedPath& path, const ReflectedSpec& spec,
                          double window_mult = 3.0);

// Monte Carlo sweep of squared H-norms at the horizon; seeds are
// base_seed + path index. Requires uniformly elliptic coefficients.
HNormStat nondegeneracy_report(const PerturbedSpec& spec, const TimeGrid& grid,
                               std::size_t n_paths, std::uint64_t base_seed);
HNormStat nondegeneracy_report(const ReflectedSpec& spec, const TimeGrid& grid,
                               std::size_t n_paths, std::uint64_t base_seed);

}  // namespace plab
