#include "plab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "plab/errors.hpp"
#include "plab/parallel.hpp"

namespace plab {

namespace {

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

PicardReport report_from(const std::vector<std::vector<double>>& iterates,
                         const std::vector<double>& reference) {
  PicardReport r;
  r.distances.reserve(iterates.size() - 1);
  for (std::size_t m = 1; m < iterates.size(); ++m)
    r.distances.push_back(sup_distance(iterates[m], reference));
  r.ratios.resize(r.distances.size(), 0.0);
  for (std::size_t m = 1; m < r.distances.size(); ++m)
    r.ratios[m] = r.distances[m - 1] > 0.0 ? r.distances[m] / r.distances[m - 1] : 0.0;
  return r;
}

}  // namespace

ComparisonReport comparison_test(const CoefficientField& coeffs, double alpha,
                                 std::size_t n_paths, const TimeGrid& grid,
                                 std::uint64_t base_seed, double tolerance) {
  if (n_paths == 0) throw std::invalid_argument("comparison_test needs paths");
  const ReflectedSpec perturbed{alpha, coeffs};
  const ReflectedSpec baseline{0.0, coeffs};

  std::vector<double> worst(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    BrownianGrid w;
    try {
      w = sample_brownian(grid, base_seed + p);
      const ReflectedPath upper = solve_stepwise(perturbed, w);
      const ReflectedPath lower = solve_stepwise(baseline, w);
      double excess = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k <= grid.n_steps; ++k)
        excess = std::max(excess, lower.x[k] - upper.x[k]);
      worst[p] = excess;
    } catch (const std::runtime_error& e) {
      throw NumericalError(std::string(e.what()) + " (path seed " +
                               std::to_string(base_seed + p) + ")",
                           p);
    }
  });

  ComparisonReport rep;
  rep.n_paths = n_paths;
  rep.tolerance = tolerance;
  rep.max_violation = worst[0];
  for (std::size_t p = 0; p < n_paths; ++p) {
    rep.max_violation = std::max(rep.max_violation, worst[p]);
    if (worst[p] > tolerance) ++rep.n_violating_paths;
  }
  return rep;
}

PicardReport picard_convergence_report(const PerturbedSpec& spec, const BrownianGrid& w,
                                       std::size_t n_iter) {
  if (n_iter < 2) throw std::invalid_argument("picard report needs n_iter >= 2");
  const auto iterates = solve_picard(spec, w, n_iter);
  const auto reference = solve_closed_form(spec, w);
  std::vector<std::vector<double>> ys;
  ys.reserve(iterates.size());
  for (const auto& it : iterates) ys.push_back(it.y);
  return report_from(ys, reference.y);
}

PicardReport picard_convergence_report(const ReflectedSpec& spec, const BrownianGrid& w,
                                       std::size_t n_iter) {
  if (n_iter < 2) throw std::invalid_argument("picard report needs n_iter >= 2");
  const auto iterates = solve_picard_reflected(spec, w, n_iter);
  const auto reference = solve_stepwise(spec, w);
  std::vector<std::vector<double>> xs;
  xs.reserve(iterates.size());
  for (const auto& it : iterates) xs.push_back(it.x);
  return report_from(xs, reference.x);
}

ZeroHitReport zero_hit_probability(const ReflectedSpec& spec, double t,
                                   std::size_t n_steps, double delta,
                                   std::size_t n_paths, std::uint64_t base_seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("zero_hit_probability needs delta > 0");
  if (n_paths == 0) throw std::invalid_argument("zero_hit_probability needs paths");
  const TimeGrid grid(t, n_steps);

  std::vector<char> hit(n_paths, 0);
  std::vector<char> hit_half(n_paths, 0);
  parallel_for(n_paths, [&](std::size_t p) {
    const BrownianGrid w = sample_brownian(grid, base_seed + p);
    const double terminal = solve_stepwise(spec, w).x.back();
    hit[p] = terminal <= delta ? 1 : 0;
    hit_half[p] = terminal <= 0.5 * delta ? 1 : 0;
  });

  ZeroHitReport rep;
  rep.delta = delta;
  rep.n_paths = n_paths;
  std::size_t a = 0, b = 0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    a += hit[p];
    b += hit_half[p];
  }
  rep.fraction = static_cast<double>(a) / static_cast<double>(n_paths);
  rep.fraction_half = static_cast<double>(b) / static_cast<double>(n_paths);
  rep.ratio = rep.fraction > 0.0 ? rep.fraction_half / rep.fraction : 0.0;
  return rep;
}

}  // namespace plab
