#include "plab/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "plab/errors.hpp"
#include "plab/parallel.hpp"

namespace plab {

namespace {

constexpr std::size_t kMaxFullField = 4096;
constexpr double kZeroCut = 1e-10;

void require_derivatives(const CoefficientField& c) {
  if (!c.sigma || !c.b || !c.sigma_prime || !c.b_prime)
    throw std::invalid_argument(
        "sensitivity propagation needs sigma, b and their derivatives");
}

// sigma'(state_j) dB_j + b'(state_j) dt for every step, the shared linear
// factor of the integrator recursion.
std::vector<double> step_factors(const CoefficientField& coeffs,
                                 const std::vector<double>& state,
                                 const std::vector<double>& increments, double dt) {
  std::vector<double> c(increments.size());
  for (std::size_t j = 0; j < increments.size(); ++j)
    c[j] = coeffs.sigma_prime(state[j]) * increments[j] + coeffs.b_prime(state[j]) * dt;
  return c;
}

// Row i of the perturbed field, columns j = i..n. The integrator sensitivity V
// starts at sigma(y_i) on the diagonal; the solution sensitivity adds
// gamma * V(at the argmax) once the stored argmax index reaches i. The argmax
// index is nondecreasing and only ever jumps to the current column, so one
// scalar holds V at the argmax. emit(j, V, U) runs for every column.
template <typename Emit>
void run_row_perturbed(const ProcessPath& path, const PerturbedSpec& spec,
                       const std::vector<double>& c, std::size_t i, Emit&& emit) {
  const std::size_t n = path.grid.n_steps;
  const double gamma = spec.alpha / (1.0 - spec.alpha);
  double V = spec.coeffs.sigma(path.y[i]);
  bool sensitive = path.argmax_index[i] == i;
  double v_theta = sensitive ? V : 0.0;
  double U = sensitive ? V + gamma * v_theta : V;
  emit(i, V, U);
  for (std::size_t j = i; j < n; ++j) {
    V += c[j] * U;
    if (path.argmax_index[j + 1] == j + 1) {
      sensitive = true;
      v_theta = V;
    }
    U = sensitive ? V + gamma * v_theta : V;
    if (!std::isfinite(U))
      throw NumericalError("non-finite sensitivity in row " + std::to_string(i), j + 1);
    emit(j + 1, V, U);
  }
}

// Row i of the reflected field, columns j = i..n. W is the integrator
// sensitivity; DM and DL stay frozen except when the path renews its running
// max (DM follows the solution sensitivity) or grows its local time with a
// strictly positive reflection driver (DL follows -(W + alpha DM), which
// cancels U to an exact zero). A simultaneous renewal forces the solution to
// sit at a zero running max, where all sensitivity drains into DL.
template <typename Emit>
void run_row_reflected(const ReflectedPath& path, const ReflectedSpec& spec,
                       const std::vector<double>& c, std::size_t i, Emit&& emit) {
  const std::size_t n = path.grid.n_steps;
  const double alpha = spec.alpha;
  double W = spec.coeffs.sigma(path.x[i]);
  double DM = 0.0, DL = 0.0, U = 0.0;
  const auto apply = [&](std::size_t col) {
    const bool x_renew = path.argmax_x[col] == col;
    const bool v_renew = path.argmax_v[col] == col && path.v[col] > 0.0;
    if (x_renew && v_renew) {
      U = 0.0;
      DM = 0.0;
      DL = -W;
    } else if (x_renew) {
      U = (W + DL) / (1.0 - alpha);
      DM = U;
    } else if (v_renew) {
      const double s = W + alpha * DM;
      DL = -s;
      U = s + DL;  // exact zero: the step reflects, the value is pinned
    } else {
      U = W + alpha * DM + DL;
    }
  };
  apply(i);
  emit(i, W, U, DM, DL);
  for (std::size_t j = i; j < n; ++j) {
    W += c[j] * U;
    apply(j + 1);
    if (!std::isfinite(U) || !std::isfinite(W))
      throw NumericalError("non-finite sensitivity in row " + std::to_string(i), j + 1);
    emit(j + 1, W, U, DM, DL);
  }
}

void check_field_size(std::size_t n) {
  if (n > kMaxFullField)
    throw std::invalid_argument(
        "full sensitivity field is limited to 4096 steps; use the terminal row "
        "functions on larger grids");
}

HNormStat aggregate_values(std::vector<double> vals, std::size_t n_boundary,
                           std::size_t n_total) {
  HNormStat s;
  s.n_paths = vals.size();
  s.n_boundary = n_boundary;
  s.boundary_fraction = n_total > 0 ? static_cast<double>(n_boundary) / n_total : 0.0;
  if (vals.empty()) return s;
  std::sort(vals.begin(), vals.end());
  s.min_over_paths = vals.front();
  s.q01 = vals[static_cast<std::size_t>(0.01 * (vals.size() - 1))];
  s.q50 = vals[static_cast<std::size_t>(0.50 * (vals.size() - 1))];
  s.value = s.q50;
  std::size_t zeros = 0;
  for (double x : vals)
    if (x < kZeroCut) ++zeros;
  s.fraction_zero = static_cast<double>(zeros) / vals.size();
  return s;
}

}  // namespace

std::size_t DerivativeField::index(std::size_t i, std::size_t j) const {
  const std::size_t steps = grid.n_steps;
  return (i - 1) * (steps + 1) - (i - 1) * i / 2 + (j - i);
}

double DerivativeField::u_at(std::size_t i, std::size_t j) const {
  if (i == 0 || j < i) return 0.0;
  return u[index(i, j)];
}

double DerivativeField::v_at(std::size_t i, std::size_t j) const {
  if (i == 0 || j < i) return 0.0;
  return v[index(i, j)];
}

std::vector<double> DerivativeField::row_at(std::size_t j) const {
  std::vector<double> out(j);
  for (std::size_t k = 0; k < j; ++k) out[k] = u[index(k + 1, j)];
  return out;
}

std::vector<double> DerivativeField::terminal_row() const { return row_at(n()); }

DerivativeField propagate_perturbed(const ProcessPath& path, const PerturbedSpec& spec) {
  require_derivatives(spec.coeffs);
  const std::size_t n = path.grid.n_steps;
  check_field_size(n);
  DerivativeField f;
  f.grid = path.grid;
  f.u.resize(n * (n + 1) / 2);
  f.v.resize(f.u.size());
  const auto c = step_factors(spec.coeffs, path.y, path.increments, path.grid.dt());
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t base = f.index(i, i);
    run_row_perturbed(path, spec, c, i, [&](std::size_t j, double V, double U) {
      f.v[base + (j - i)] = V;
      f.u[base + (j - i)] = U;
    });
  }
  return f;
}

DerivativeField propagate_reflected(const ReflectedPath& path, const ReflectedSpec& spec) {
  require_derivatives(spec.coeffs);
  const std::size_t n = path.grid.n_steps;
  check_field_size(n);
  DerivativeField f;
  f.grid = path.grid;
  f.u.resize(n * (n + 1) / 2);
  f.v.resize(f.u.size());
  f.dm.resize(f.u.size());
  f.dl.resize(f.u.size());
  const auto c = step_factors(spec.coeffs, path.x, path.increments, path.grid.dt());
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t base = f.index(i, i);
    run_row_reflected(path, spec, c, i,
                      [&](std::size_t j, double W, double U, double DM, double DL) {
                        f.v[base + (j - i)] = W;
                        f.u[base + (j - i)] = U;
                        f.dm[base + (j - i)] = DM;
                        f.dl[base + (j - i)] = DL;
                      });
  }
  return f;
}

std::vector<double> terminal_row_perturbed(const ProcessPath& path,
                                           const PerturbedSpec& spec) {
  require_derivatives(spec.coeffs);
  const std::size_t n = path.grid.n_steps;
  const auto c = step_factors(spec.coeffs, path.y, path.increments, path.grid.dt());
  std::vector<double> row(n);
  for (std::size_t i = 1; i <= n; ++i) {
    double last = 0.0;
    run_row_perturbed(path, spec, c, i,
                      [&](std::size_t, double, double U) { last = U; });
    row[i - 1] = last;
  }
  return row;
}

std::vector<double> terminal_row_reflected(const ReflectedPath& path,
                                           const ReflectedSpec& spec) {
  require_derivatives(spec.coeffs);
  const std::size_t n = path.grid.n_steps;
  const auto c = step_factors(spec.coeffs, path.x, path.increments, path.grid.dt());
  std::vector<double> row(n);
  for (std::size_t i = 1; i <= n; ++i) {
    double last = 0.0;
    run_row_reflected(path, spec, c, i,
                      [&](std::size_t, double, double U, double, double) { last = U; });
    row[i - 1] = last;
  }
  return row;
}

HNormStat h_norm_squared(const DerivativeField& field, std::size_t t_index) {
  if (t_index > field.n())
    throw std::invalid_argument("h_norm_squared: index beyond the grid");
  double acc = 0.0;
  for (std::size_t i = 1; i <= t_index; ++i) {
    const double u = field.u_at(i, t_index);
    acc += u * u;
  }
  HNormStat s;
  s.value = acc * field.grid.dt();
  s.min_over_paths = s.value;
  s.q01 = s.value;
  s.q50 = s.value;
  s.fraction_zero = s.value < kZeroCut ? 1.0 : 0.0;
  s.n_paths = 1;
  return s;
}

double h_norm_from_row(const std::vector<double>& row, double dt) {
  double acc = 0.0;
  for (double u : row) acc += u * u;
  return acc * dt;
}

double directional_fd(const std::function<double(const BrownianGrid&)>& functional,
                      const BrownianGrid& w, const CameronMartinShift& h, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("directional_fd: eps must be positive");
  const double up = functional(shift(w, h, eps));
  const double down = functional(shift(w, h, -eps));
  return (up - down) / (2.0 * eps);
}

double directional_fd(const PerturbedSpec& spec, const BrownianGrid& w,
                      const CameronMartinShift& h, double eps) {
  return directional_fd(
      [&spec](const BrownianGrid& noise) {
        return solve_closed_form(spec, noise).y.back();
      },
      w, h, eps);
}

double directional_fd(const ReflectedSpec& spec, const BrownianGrid& w,
                      const CameronMartinShift& h, double eps) {
  return directional_fd(
      [&spec](const BrownianGrid& noise) {
        return solve_stepwise(spec, noise).x.back();
      },
      w, h, eps);
}

bool fd_exclude_reflected(const ReflectedPath& path, const ReflectedSpec& spec,
                          double window_mult) {
  const std::size_t n = path.grid.n_steps;
  const double dt = path.grid.dt();
  const double sdt = std::sqrt(dt);
  const double tw = window_mult * sdt;
  const double T = path.grid.horizon;

  double sigma_hat = 0.0;
  for (std::size_t k = 0; k <= n; ++k)
    sigma_hat = std::max(sigma_hat, std::abs(spec.coeffs.sigma(path.x[k])));
  const double level_tol = window_mult * sigma_hat * sdt;

  const std::size_t rho_x = path.argmax_x[n];
  const std::size_t rho_v = path.argmax_v[n];
  const double m_n = path.m[n];
  const double l_n = path.l[n];
  const bool reflected = l_n > 0.0;

  if (T - path.grid.t(rho_x) < tw) return true;
  if (rho_x != n && m_n - path.x[n] < level_tol) return true;
  if (reflected) {
    if (T - path.grid.t(rho_v) < tw) return true;
    if (rho_v != n && l_n - path.v[n] < level_tol) return true;
  }
  for (std::size_t k = 0; k <= n; ++k) {
    const double tk = path.grid.t(k);
    if (m_n > 0.0 && std::abs(tk - path.grid.t(rho_x)) > tw &&
        path.x[k] > m_n - level_tol)
      return true;
    if (reflected && std::abs(tk - path.grid.t(rho_v)) > tw &&
        path.v[k] > l_n - level_tol)
      return true;
  }
  if (!reflected) {
    for (std::size_t k = 0; k <= n; ++k)
      if (path.grid.t(k) > tw && path.x[k] < level_tol) return true;
  }
  return false;
}

HNormStat nondegeneracy_report(const PerturbedSpec& spec, const TimeGrid& grid,
                               std::size_t n_paths, std::uint64_t base_seed) {
  if (!spec.coeffs.uniformly_elliptic)
    throw std::invalid_argument(
        "nondegeneracy report needs a uniformly elliptic diffusion coefficient");
  require_derivatives(spec.coeffs);
  std::vector<double> vals(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    const BrownianGrid w = sample_brownian(grid, base_seed + p);
    const ProcessPath path = solve_closed_form(spec, w);
    vals[p] = h_norm_from_row(terminal_row_perturbed(path, spec), grid.dt());
  });
  return aggregate_values(std::move(vals), 0, n_paths);
}

HNormStat nondegeneracy_report(const ReflectedSpec& spec, const TimeGrid& grid,
                               std::size_t n_paths, std::uint64_t base_seed) {
  if (!spec.coeffs.uniformly_elliptic)
    throw std::invalid_argument(
        "nondegeneracy report needs a uniformly elliptic diffusion coefficient");
  require_derivatives(spec.coeffs);
  std::vector<double> vals(n_paths);
  std::vector<char> boundary(n_paths, 0);
  parallel_for(n_paths, [&](std::size_t p) {
    const BrownianGrid w = sample_brownian(grid, base_seed + p);
    const ReflectedPath path = solve_stepwise(spec, w);
    if (path.x.back() == 0.0) {
      boundary[p] = 1;
      vals[p] = 0.0;
      return;
    }
    vals[p] = h_norm_from_row(terminal_row_reflected(path, spec), grid.dt());
  });
  std::vector<double> kept;
  kept.reserve(n_paths);
  std::size_t n_boundary = 0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    if (boundary[p])
      ++n_boundary;
    else
      kept.push_back(vals[p]);
  }
  return aggregate_values(std::move(kept), n_boundary, n_paths);
}

}  // namespace plab
