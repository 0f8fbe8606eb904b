#pragma once
// Experiment harness: pathwise comparison under shared noise, Picard
// convergence measurement against the direct solvers, and boundary-mass
// scaling of the reflected terminal value.
#include <cstddef>
#include <cstdint>
#include <vector>

#include "plab/coefficients.hpp"
#include "plab/noise.hpp"
#include "plab/perturbed.hpp"
#include "plab/reflected.hpp"

namespace plab {

struct ComparisonReport {
  double max_violation = 0.0;  // max over paths and grid points of (baseline - perturbed)
  std::size_t n_violating_paths = 0;
  std::size_t n_paths = 0;
  double tolerance = 0.0;
  bool pass() const { return n_violating_paths == 0; }
};

// Solves the reflected equation with the given alpha and with alpha = 0 on the
// same increments, path by path, and measures how far the unperturbed solution
// ever rises above the perturbed one. A path counts as violating when that
// excess exceeds the tolerance anywhere on the grid.
ComparisonReport comparison_test(const CoefficientField& coeffs, double alpha,
                                 std::size_t n_paths, const TimeGrid& grid,
                                 std::uint64_t base_seed, double tolerance = 1e-9);

struct PicardReport {
  std::vector<double> distances;  // sup distance of iterate m to the direct solve, m = 1..
  std::vector<double> ratios;     // distances[m] / distances[m-1], 0 where undefined
};

PicardReport picard_convergence_report(const PerturbedSpec& spec, const BrownianGrid& w,
                                       std::size_t n_iter);
PicardReport picard_convergence_report(const ReflectedSpec& spec, const BrownianGrid& w,
                                       std::size_t n_iter);

struct ZeroHitReport {
  double delta = 0.0;
  double fraction = 0.0;       // fraction of paths with terminal value <= delta
  double fraction_half = 0.0;  // same at delta / 2
  double ratio = 0.0;          // fraction_half / fraction, 0 when fraction is 0
  std::size_t n_paths = 0;
};

// An absolutely continuous terminal law with bounded density near 0 makes the
// boundary mass scale linearly, so fraction_half / fraction sits near 1/2.
ZeroHitReport zero_hit_probability(const ReflectedSpec& spec, double t,
                                   std::size_t n_steps, double delta,
                                   std::size_t n_paths, std::uint64_t base_seed);

}  // namespace plab
