#include "plab/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace plab {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double sample_std(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double acc = 0.0;
  for (double s : samples) acc += (s - mean) * (s - mean);
  return std::sqrt(acc / (n - 1.0));
}

}  // namespace

double DensityEstimate::integral() const {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid_points.size(); ++i)
    acc += 0.5 * (values[i] + values[i + 1]) * (grid_points[i + 1] - grid_points[i]);
  return acc;
}

DensityEstimate kde(const std::vector<double>& samples, double bandwidth,
                    std::size_t grid_points) {
  if (samples.size() < 2)
    throw std::invalid_argument("kde needs at least two samples");
  if (grid_points < 2)
    throw std::invalid_argument("kde needs at least two grid points");

  double h = bandwidth;
  if (!(h > 0.0)) {
    const double sd = sample_std(samples);
    if (!(sd > 0.0))
      throw std::invalid_argument(
          "identical samples: automatic bandwidth is degenerate, run an atom "
          "scan instead");
    h = 1.06 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
  }

  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 3.0 * h;
  const double hi = *hi_it + 3.0 * h;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);

  DensityEstimate est;
  est.bandwidth = h;
  est.n_samples = samples.size();
  est.grid_points.resize(grid_points);
  est.values.resize(grid_points);
  const double scale = kInvSqrt2Pi / (h * static_cast<double>(samples.size()));
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = lo + step * static_cast<double>(g);
    est.grid_points[g] = x;
    double acc = 0.0;
    for (double s : samples) {
      const double z = (x - s) / h;
      acc += std::exp(-0.5 * z * z);
    }
    est.values[g] = acc * scale;
  }
  return est;
}

std::vector<AtomScanEntry> atom_scan(const std::vector<double>& samples,
                                     const std::vector<double>& deltas) {
  if (deltas.empty()) throw std::invalid_argument("atom_scan needs at least one delta");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0))
      throw std::invalid_argument("atom_scan deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw std::invalid_argument("atom_scan deltas must be decreasing");
  }
  std::vector<AtomScanEntry> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    std::unordered_map<long long, std::size_t> bins;
    std::size_t peak = 0;
    for (double s : samples) {
      const long long bin = static_cast<long long>(std::floor(s / delta));
      peak = std::max(peak, ++bins[bin]);
    }
    const double mass =
        samples.empty() ? 0.0
                        : static_cast<double>(peak) / static_cast<double>(samples.size());
    out.push_back({delta, mass});
  }
  return out;
}

double ks_distance(const std::vector<double>& samples,
                   const std::function<double(double)>& reference_cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance needs samples");
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = reference_cdf(sorted[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace plab
