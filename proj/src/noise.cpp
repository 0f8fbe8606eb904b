#include "plab/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace plab {

TimeGrid::TimeGrid(double horizon_, std::size_t n_steps_)
    : horizon(horizon_), n_steps(n_steps_) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("TimeGrid: horizon must be positive and finite");
  if (n_steps == 0) throw std::invalid_argument("TimeGrid: need at least one step");
}

std::vector<double> BrownianGrid::cumulative() const {
  std::vector<double> b(increments.size() + 1);
  b[0] = 0.0;
  for (std::size_t k = 0; k < increments.size(); ++k) b[k + 1] = b[k] + increments[k];
  return b;
}

BrownianGrid sample_brownian(const TimeGrid& grid, std::uint64_t seed) {
  BrownianGrid w;
  w.grid = grid;
  w.seed = seed;
  w.increments.resize(grid.n_steps);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sqrt_dt = std::sqrt(grid.dt());
  for (double& dB : w.increments) dB = sqrt_dt * normal(gen);
  return w;
}

double CameronMartinShift::norm_squared() const {
  double s = 0.0;
  for (double hk : h) s += hk * hk;
  return s * grid.dt();
}

CameronMartinShift sample_shift_direction(const TimeGrid& grid, std::uint64_t seed) {
  CameronMartinShift dir;
  dir.grid = grid;
  dir.h.resize(grid.n_steps);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& hk : dir.h) hk = normal(gen);
  return dir;
}

BrownianGrid shift(const BrownianGrid& w, const CameronMartinShift& h, double eps) {
  if (!(w.grid == h.grid))
    throw std::invalid_argument("shift: Brownian path and direction live on different grids");
  if (h.h.size() != w.increments.size())
    throw std::invalid_argument("shift: direction has wrong length");
  BrownianGrid out = w;
  const double dt = w.grid.dt();
  for (std::size_t k = 0; k < out.increments.size(); ++k)
    out.increments[k] += eps * h.h[k] * dt;
  return out;
}

double pair_h(const std::vector<double>& u, const CameronMartinShift& h) {
  if (u.size() != h.h.size())
    throw std::invalid_argument("pair_h: length mismatch between integrand and direction");
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * h.h[k];
  return s * h.grid.dt();
}

}  // namespace plab
