#include "plab/perturbed.hpp"

#include <cmath>
#include <stdexcept>

#include "plab/errors.hpp"

namespace plab {

namespace {

void validate(const PerturbedSpec& spec) {
  if (!(spec.alpha < 1.0))
    throw std::invalid_argument("perturbed solver requires alpha < 1");
  if (!std::isfinite(spec.y0)) throw std::invalid_argument("y0 must be finite");
  if (!spec.coeffs.sigma || !spec.coeffs.b)
    throw std::invalid_argument("coefficient field is incomplete");
}

void resize(ProcessPath& p, const BrownianGrid& w) {
  const std::size_t n = w.grid.n_steps;
  p.grid = w.grid;
  p.y.resize(n + 1);
  p.cumulative.resize(n + 1);
  p.running_max_cum.resize(n + 1);
  p.argmax_index.resize(n + 1);
  p.m.resize(n + 1);
  p.increments = w.increments;
}

}  // namespace

ProcessPath solve_closed_form(const PerturbedSpec& spec, const BrownianGrid& w) {
  validate(spec);
  const double alpha = spec.alpha;
  const double base = spec.y0 / (1.0 - alpha);
  const double gamma = alpha / (1.0 - alpha);
  const double dt = w.grid.dt();
  const std::size_t n = w.grid.n_steps;

  ProcessPath p;
  resize(p, w);
  p.cumulative[0] = 0.0;
  p.running_max_cum[0] = 0.0;
  p.argmax_index[0] = 0;
  p.y[0] = base;
  p.m[0] = base;

  for (std::size_t k = 0; k < n; ++k) {
    const double yk = p.y[k];
    const double c =
        p.cumulative[k] + spec.coeffs.sigma(yk) * w.increments[k] + spec.coeffs.b(yk) * dt;
    p.cumulative[k + 1] = c;
    if (c >= p.running_max_cum[k]) {  // ties go to the later index
      p.running_max_cum[k + 1] = c;
      p.argmax_index[k + 1] = k + 1;
    } else {
      p.running_max_cum[k + 1] = p.running_max_cum[k];
      p.argmax_index[k + 1] = p.argmax_index[k];
    }
    const double y = base + c + gamma * p.running_max_cum[k + 1];
    if (!std::isfinite(y)) throw NumericalError("non-finite value in perturbed solve", k + 1);
    p.y[k + 1] = y;
    p.m[k + 1] = std::max(p.m[k], y);
  }
  return p;
}

ProcessPath solve_fixed_point_oracle(const PerturbedSpec& spec, const BrownianGrid& w,
                                     double tol, std::size_t max_iter,
                                     std::size_t* iterations_out) {
  validate(spec);
  if (!(tol > 0.0)) throw std::invalid_argument("oracle tolerance must be positive");
  const double alpha = spec.alpha;
  const double dt = w.grid.dt();
  const std::size_t n = w.grid.n_steps;

  std::vector<double> y_prev(n + 1, spec.y0 / (1.0 - alpha));
  std::vector<double> y(n + 1), c(n + 1);

  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter)
      throw ConvergenceError("fixed-point oracle did not converge", max_iter);
    // Rebuild the path stepwise; only the running max is lagged one sweep.
    double m_prev = y_prev[0];  // max_{j<=k} y_prev_j, updated as k advances
    c[0] = 0.0;
    y[0] = spec.y0 + alpha * m_prev;
    double change = std::abs(y[0] - y_prev[0]);
    for (std::size_t k = 0; k < n; ++k) {
      c[k + 1] = c[k] + spec.coeffs.sigma(y[k]) * w.increments[k] + spec.coeffs.b(y[k]) * dt;
      m_prev = std::max(m_prev, y_prev[k + 1]);
      const double yk = spec.y0 + c[k + 1] + alpha * m_prev;
      if (!std::isfinite(yk))
        throw NumericalError("non-finite value in fixed-point oracle", k + 1);
      y[k + 1] = yk;
      change = std::max(change, std::abs(yk - y_prev[k + 1]));
    }
    y_prev = y;
    if (change <= tol) break;
  }
  // iter counts the sweeps that moved the iterate; the final certifying
  // sweep (change <= tol) is not one of them.
  if (iterations_out) *iterations_out = iter;

  ProcessPath p;
  resize(p, w);
  p.y = y;
  p.cumulative = c;
  p.running_max_cum[0] = c[0];
  p.argmax_index[0] = 0;
  p.m[0] = y[0];
  for (std::size_t k = 0; k < n; ++k) {
    if (c[k + 1] >= p.running_max_cum[k]) {
      p.running_max_cum[k + 1] = c[k + 1];
      p.argmax_index[k + 1] = k + 1;
    } else {
      p.running_max_cum[k + 1] = p.running_max_cum[k];
      p.argmax_index[k + 1] = p.argmax_index[k];
    }
    p.m[k + 1] = std::max(p.m[k], y[k + 1]);
  }
  return p;
}

std::vector<ProcessPath> solve_picard(const PerturbedSpec& spec, const BrownianGrid& w,
                                      std::size_t n_iter) {
  validate(spec);
  const double alpha = spec.alpha;
  const double base = spec.y0 / (1.0 - alpha);
  const double gamma = alpha / (1.0 - alpha);
  const double dt = w.grid.dt();
  const std::size_t n = w.grid.n_steps;

  std::vector<ProcessPath> iterates;
  iterates.reserve(n_iter + 1);

  ProcessPath cur;
  resize(cur, w);
  for (std::size_t k = 0; k <= n; ++k) {
    cur.y[k] = base;
    cur.cumulative[k] = 0.0;
    cur.running_max_cum[k] = 0.0;
    cur.argmax_index[k] = k;  // all-zero C ties; the last index attains
    cur.m[k] = base;
  }
  iterates.push_back(cur);

  for (std::size_t it = 0; it < n_iter; ++it) {
    const ProcessPath& prev = iterates.back();
    ProcessPath next;
    resize(next, w);
    next.cumulative[0] = 0.0;
    next.running_max_cum[0] = 0.0;
    next.argmax_index[0] = 0;
    next.y[0] = base;
    next.m[0] = base;
    for (std::size_t k = 0; k < n; ++k) {
      const double yp = prev.y[k];  // coefficients frozen along the previous iterate
      const double c = next.cumulative[k] + spec.coeffs.sigma(yp) * w.increments[k] +
                       spec.coeffs.b(yp) * dt;
      next.cumulative[k + 1] = c;
      if (c >= next.running_max_cum[k]) {
        next.running_max_cum[k + 1] = c;
        next.argmax_index[k + 1] = k + 1;
      } else {
        next.running_max_cum[k + 1] = next.running_max_cum[k];
        next.argmax_index[k + 1] = next.argmax_index[k];
      }
      const double y = base + c + gamma * next.running_max_cum[k + 1];
      if (!std::isfinite(y))
        throw NumericalError("non-finite value in Picard iterate", k + 1);
      next.y[k + 1] = y;
      next.m[k + 1] = std::max(next.m[k], y);
    }
    iterates.push_back(std::move(next));
  }
  return iterates;
}

PathDiagnostics check_process_path(const ProcessPath& path, const PerturbedSpec& spec) {
  const double alpha = spec.alpha;
  const double base = spec.y0 / (1.0 - alpha);
  const double gamma = alpha / (1.0 - alpha);
  const std::size_t n = path.grid.n_steps;

  PathDiagnostics d;
  d.running_max_consistent = true;
  d.initial_value_ok = std::abs(path.y[0] - base) <= 1e-12 * (1.0 + std::abs(base));

  double fmax = path.cumulative[0];
  std::size_t arg = 0;
  double ymax = path.y[0];
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0 && path.cumulative[k] >= fmax) {
      fmax = path.cumulative[k];
      arg = k;
    }
    ymax = std::max(ymax, path.y[k]);
    if (path.running_max_cum[k] != fmax || path.argmax_index[k] != arg ||
        path.m[k] != ymax)
      d.running_max_consistent = false;

    const double scale = 1.0 + std::abs(path.y[k]);
    d.max_equation_residual =
        std::max(d.max_equation_residual,
                 std::abs(path.y[k] - (spec.y0 + path.cumulative[k] + alpha * path.m[k])) /
                     scale);
    d.max_closed_form_error =
        std::max(d.max_closed_form_error,
                 std::abs(path.y[k] - (base + path.cumulative[k] +
                                       gamma * path.running_max_cum[k])) /
                     scale);
    d.max_identity_error =
        std::max(d.max_identity_error,
                 std::abs(path.m[k] - (spec.y0 + path.running_max_cum[k]) / (1.0 - alpha)) /
                     scale);
  }
  return d;
}

}  // namespace plab
