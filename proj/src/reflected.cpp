#include "plab/reflected.hpp"

#include <cmath>
#include <stdexcept>

#include "plab/errors.hpp"

namespace plab {

namespace {

void validate(const ReflectedSpec& spec) {
  if (!(spec.alpha >= 0.0 && spec.alpha < 0.5))
    throw std::invalid_argument("reflected solver requires 0 <= alpha < 1/2");
  if (!spec.coeffs.sigma || !spec.coeffs.b)
    throw std::invalid_argument("coefficient field is incomplete");
}

void resize(ReflectedPath& p, const BrownianGrid& w) {
  const std::size_t n = w.grid.n_steps;
  p.grid = w.grid;
  p.x.resize(n + 1);
  p.g.resize(n + 1);
  p.m.resize(n + 1);
  p.l.resize(n + 1);
  p.v.resize(n + 1);
  p.argmax_x.resize(n + 1);
  p.argmax_v.resize(n + 1);
  p.increments = w.increments;
}

// Canonical store of step k from the converged pair (m_fin, l_fin): recompute
// v, l, x once so that l is exactly the running max of the stored v and x is
// exactly 0 on reflecting steps.
void store_step(ReflectedPath& p, std::size_t k, double alpha, double m_fin) {
  const double s = p.g[k] + alpha * m_fin;
  p.v[k] = std::max(0.0, -s);
  p.l[k] = std::max(p.l[k - 1], p.v[k]);
  p.x[k] = s + p.l[k];
  if (p.v[k] >= p.l[k - 1]) {
    p.argmax_v[k] = k;
  } else {
    p.argmax_v[k] = p.argmax_v[k - 1];
  }
  if (p.x[k] >= p.m[k - 1]) {
    p.m[k] = p.x[k];
    p.argmax_x[k] = k;
  } else {
    p.m[k] = p.m[k - 1];
    p.argmax_x[k] = p.argmax_x[k - 1];
  }
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> skorokhod_map(
    const std::vector<double>& g) {
  if (g.empty() || g[0] != 0.0)
    throw std::invalid_argument("skorokhod_map: driver must start at 0");
  std::vector<double> x(g.size()), l(g.size());
  double lmax = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    lmax = std::max(lmax, std::max(0.0, -g[k]));
    l[k] = lmax;
    x[k] = g[k] + lmax;
  }
  return {std::move(x), std::move(l)};
}

ReflectedPath solve_stepwise(const ReflectedSpec& spec, const BrownianGrid& w, double tol,
                             std::size_t max_inner) {
  validate(spec);
  if (!(tol > 0.0)) throw std::invalid_argument("inner tolerance must be positive");
  const double alpha = spec.alpha;
  const double dt = w.grid.dt();
  const std::size_t n = w.grid.n_steps;

  ReflectedPath p;
  resize(p, w);
  p.x[0] = 0.0;
  p.g[0] = 0.0;
  p.m[0] = 0.0;
  p.l[0] = 0.0;
  p.v[0] = 0.0;
  p.argmax_x[0] = 0;
  p.argmax_v[0] = 0;

  for (std::size_t k = 0; k < n; ++k) {
    const double xk = p.x[k];
    const double G =
        p.g[k] + spec.coeffs.sigma(xk) * w.increments[k] + spec.coeffs.b(xk) * dt;
    if (!std::isfinite(G)) throw NumericalError("non-finite value in reflected solve", k + 1);
    p.g[k + 1] = G;

    double m_cur = p.m[k], l_cur = p.l[k];
    std::size_t it = 0;
    for (;; ++it) {
      if (it >= max_inner)
        throw ConvergenceError("reflected inner fixed point stalled", max_inner);
      const double m_new = std::max(p.m[k], G + alpha * m_cur + l_cur);
      const double l_new = std::max(p.l[k], std::max(0.0, -(G + alpha * m_new)));
      const double change = std::abs(m_new - m_cur) + std::abs(l_new - l_cur);
      m_cur = m_new;
      l_cur = l_new;
      if (change <= tol) break;
    }
    store_step(p, k + 1, alpha, m_cur);
  }
  return p;
}

std::vector<ReflectedPath> solve_picard_reflected(const ReflectedSpec& spec,
                                                  const BrownianGrid& w,
                                                  std::size_t n_iter) {
  validate(spec);
  const double alpha = spec.alpha;
  const double dt = w.grid.dt();
  const std::size_t n = w.grid.n_steps;

  std::vector<ReflectedPath> iterates;
  iterates.reserve(n_iter + 1);

  ReflectedPath zero;
  resize(zero, w);
  for (std::size_t k = 0; k <= n; ++k) {
    zero.x[k] = 0.0;
    zero.g[k] = 0.0;
    zero.m[k] = 0.0;
    zero.l[k] = 0.0;
    zero.v[k] = 0.0;
    zero.argmax_x[k] = k;  // everything ties at zero; last index attains
    zero.argmax_v[k] = k;
  }
  iterates.push_back(zero);

  for (std::size_t it = 0; it < n_iter; ++it) {
    const ReflectedPath& prev = iterates.back();
    ReflectedPath next;
    resize(next, w);
    next.g[0] = 0.0;
    next.v[0] = 0.0;
    next.l[0] = 0.0;
    next.x[0] = 0.0;
    next.m[0] = 0.0;
    next.argmax_x[0] = 0;
    next.argmax_v[0] = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double xp = prev.x[k];
      const double G =
          next.g[k] + spec.coeffs.sigma(xp) * w.increments[k] + spec.coeffs.b(xp) * dt;
      if (!std::isfinite(G))
        throw NumericalError("non-finite value in reflected Picard iterate", k + 1);
      next.g[k + 1] = G;
      const double s = G + alpha * prev.m[k + 1];  // alpha-term lagged one iterate
      next.v[k + 1] = std::max(0.0, -s);
      next.l[k + 1] = std::max(next.l[k], next.v[k + 1]);
      next.argmax_v[k + 1] = next.v[k + 1] >= next.l[k] ? k + 1 : next.argmax_v[k];
      next.x[k + 1] = s + next.l[k + 1];
      if (next.x[k + 1] >= next.m[k]) {
        next.m[k + 1] = next.x[k + 1];
        next.argmax_x[k + 1] = k + 1;
      } else {
        next.m[k + 1] = next.m[k];
        next.argmax_x[k + 1] = next.argmax_x[k];
      }
    }
    iterates.push_back(std::move(next));
  }
  return iterates;
}

ReflectedDiagnostics check_reflected_path(const ReflectedPath& path,
                                          const ReflectedSpec& spec,
                                          double comp_tol_multiplier) {
  const double alpha = spec.alpha;
  const std::size_t n = path.grid.n_steps;

  ReflectedDiagnostics d;
  d.min_x = path.x[0];
  d.local_time_monotone = path.l[0] == 0.0;
  d.running_max_consistent = true;

  double vmax = path.v[0];
  std::size_t argv = 0;
  double xmax = path.x[0];
  std::size_t argx = 0;
  double max_abs_x = 0.0;

  for (std::size_t k = 0; k <= n; ++k) {
    d.min_x = std::min(d.min_x, path.x[k]);
    max_abs_x = std::max(max_abs_x, std::abs(path.x[k]));
    if (k > 0) {
      if (path.l[k] < path.l[k - 1]) d.local_time_monotone = false;
      d.complementarity += path.x[k - 1] * (path.l[k] - path.l[k - 1]);
      if (path.v[k] >= vmax) {
        vmax = path.v[k];
        argv = k;
      }
      if (path.x[k] >= xmax) {
        xmax = path.x[k];
        argx = k;
      }
    }
    if (path.m[k] != xmax || path.argmax_x[k] != argx || path.argmax_v[k] != argv)
      d.running_max_consistent = false;
    d.max_reflection_identity_error =
        std::max(d.max_reflection_identity_error, std::abs(path.l[k] - vmax));
    const double scale = 1.0 + std::abs(path.x[k]);
    d.max_equation_residual =
        std::max(d.max_equation_residual,
                 std::abs(path.x[k] - (path.g[k] + alpha * path.m[k] + path.l[k])) / scale);
  }
  // The sum uses x before each push, which sits O(sqrt(dt)) above zero on a
  // correct path, and the push sizes total l_n.  So the natural scale of the
  // sum is sqrt(dt) * l_n, not dt * max|x|; a dt-proportional bound is
  // violated by exact solutions once the grid is fine enough.
  const double root_dt = std::sqrt(path.grid.dt());
  d.complementarity_tol = comp_tol_multiplier * root_dt * std::max(1.0, max_abs_x) *
                          std::max(root_dt, path.l[n]);
  return d;
}

}  // namespace plab
