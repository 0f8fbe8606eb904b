#pragma once
// Terminal-sample diagnostics: kernel density estimates, bin-mass atom scans,
// and a Kolmogorov-Smirnov distance against a reference law.
#include <cstddef>
#include <functional>
#include <vector>

namespace plab {

struct DensityEstimate {
  std::vector<double> grid_points;
  std::vector<double> values;
  double bandwidth = 0.0;
  std::size_t n_samples = 0;

  double integral() const;  // trapezoid over the grid
};

// Gaussian-kernel estimate on an equispaced grid spanning
// [min - 3 bandwidth, max + 3 bandwidth]. A nonpositive bandwidth selects
// Silverman's rule 1.06 sigma_hat n^{-1/5}; identical samples make that rule
// degenerate and are rejected (an atom scan is the right tool there).
DensityEstimate kde(const std::vector<double>& samples, double bandwidth,
                    std::size_t grid_points);

struct AtomScanEntry {
  double delta;
  double max_mass;  // largest fraction of samples falling into one delta-bin
};

// Bins are [k delta, (k+1) delta). An absolutely continuous law drives
// max_mass to zero linearly in delta; an atom of mass p keeps it >= p.
std::vector<AtomScanEntry> atom_scan(const std::vector<double>& samples,
                                     const std::vector<double>& deltas);

// sup_x |empirical CDF - reference_cdf| over the sample points.
double ks_distance(const std::vector<double>& samples,
                   const std::function<double(double)>& reference_cdf);

double normal_cdf(double x);  // standard normal

}  // namespace plab
