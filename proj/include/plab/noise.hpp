#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace plab {

// Uniform grid 0 = t_0 < t_1 < ... < t_n = horizon with t_k = k * dt.
struct TimeGrid {
  double horizon = 1.0;
  std::size_t n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double horizon_, std::size_t n_steps_);

  double dt() const { return horizon / static_cast<double>(n_steps); }
  double t(std::size_t k) const { return static_cast<double>(k) * dt(); }

  bool operator==(const TimeGrid&) const = default;
};

// One Brownian path, stored as its n_steps increments.  increments[k] is
// B_{t_{k+1}} - B_{t_k} ~ N(0, dt), drawn i.i.d. from the seed.
struct BrownianGrid {
  TimeGrid grid;
  std::vector<double> increments;
  std::uint64_t seed = 0;

  // B_{t_0}, ..., B_{t_n} with B_0 = 0.
  std::vector<double> cumulative() const;
};

// Deterministic function of (grid, seed): equal arguments give bitwise equal
// increments.  Different paths of a Monte Carlo run use base_seed + path index.
BrownianGrid sample_brownian(const TimeGrid& grid, std::uint64_t seed);

// Piecewise constant Cameron-Martin direction: h[k] is dH/dt on [t_k, t_{k+1}).
struct CameronMartinShift {
  TimeGrid grid;
  std::vector<double> h;

  double norm_squared() const;  // sum h_k^2 dt
};

// Deterministic standard-normal direction for finite-difference probes.
CameronMartinShift sample_shift_direction(const TimeGrid& grid, std::uint64_t seed);

// Returns a copy of w with increments[k] += eps * h_k * dt; w is unchanged.
// Throws std::invalid_argument if the grids differ.
BrownianGrid shift(const BrownianGrid& w, const CameronMartinShift& h, double eps);

// Discrete H-pairing sum u_k h_k dt (left-endpoint quadrature).  u must have
// exactly one entry per grid step.
double pair_h(const std::vector<double>& u, const CameronMartinShift& h);

}  // namespace plab
