#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "plab/coefficients.hpp"
#include "plab/errors.hpp"
#include "plab/noise.hpp"
#include "plab/perturbed.hpp"
#include "plab/reflected.hpp"
#include "plab/verify.hpp"

using namespace plab;

namespace {

CoefficientField coeffs_of(const std::string& sigma, const std::string& drift = "") {
  CoefficientField c = parse_coefficient(sigma);
  if (!drift.empty()) c = with_drift(std::move(c), drift);
  return c;
}

// Remainder of the truncated binomial expansion of (1 + dt)^n: the distance
// of the m-th functional iterate of the explicit scheme for y' = y, y(0)=1,
// from its fixed point at the final grid index.  Computed by a term
// recurrence, independent of the solver code.
double binomial_tail(std::size_t n, std::size_t m) {
  const double dtn = 1.0 / static_cast<double>(n);
  double term = 1.0;  // C(n,1) * dt^1 with dt = 1/n
  double tail = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    if (j > m) tail += term;
    term *= static_cast<double>(n - j) * dtn / static_cast<double>(j + 1);
    if (term == 0.0 && j > m) break;
  }
  return tail;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("comparison without feedback is an exact tie") {
  const TimeGrid grid(1.0, 128);
  const ComparisonReport rep =
      comparison_test(coeffs_of("sin_perturbed:1.0:0.3"), 0.0, 50, grid, 11);
  CHECK(rep.n_paths == 50);
  CHECK(rep.n_violating_paths == 0);
  CHECK(rep.max_violation == 0.0);
  CHECK(rep.pass());
  CHECK(rep.tolerance == 1e-9);
}

TEST_CASE("comparison with deterministic drift: feedback strictly dominates") {
  const TimeGrid grid(1.0, 64);
  BrownianGrid w;
  w.grid = grid;
  w.increments.assign(64, 0.0);
  const CoefficientField c = coeffs_of("constant:0", "constant:1");
  const ReflectedPath base = solve_stepwise(ReflectedSpec{0.0, c}, w);
  const ReflectedPath fed = solve_stepwise(ReflectedSpec{0.25, c}, w);
  for (std::size_t k = 1; k <= 64; ++k) {
    CHECK(base.x[k] == doctest::Approx(grid.t(k)).epsilon(1e-12));
    CHECK(fed.x[k] == doctest::Approx((4.0 / 3.0) * grid.t(k)).epsilon(1e-10));
    CHECK(base.x[k] < fed.x[k]);
  }
  const ComparisonReport rep = comparison_test(c, 0.25, 10, grid, 3);
  CHECK(rep.n_violating_paths == 0);
  CHECK(rep.max_violation <= 0.0);
}

TEST_CASE("comparison across noise-driven paths never sees a violation") {
  const TimeGrid grid(1.0, 512);
  const ComparisonReport rep =
      comparison_test(coeffs_of("sin_perturbed:1.0:0.3"), 0.4, 200, grid, 21);
  CHECK(rep.n_violating_paths == 0);
  CHECK(rep.max_violation <= 1e-9);
}

TEST_CASE("comparison reports are deterministic in the base seed") {
  const TimeGrid grid(1.0, 64);
  const CoefficientField c = coeffs_of("tanh_bounded:1.0:0.3");
  const ComparisonReport a = comparison_test(c, 0.3, 25, grid, 77);
  const ComparisonReport b = comparison_test(c, 0.3, 25, grid, 77);
  CHECK(a.max_violation == b.max_violation);
  CHECK(a.n_violating_paths == b.n_violating_paths);
}

TEST_CASE("comparison propagates solver failures with the path seed") {
  const TimeGrid grid(1.0, 8);
  CoefficientField c = coeffs_of("constant:1");
  c.sigma = [](double) { return std::nan(""); };
  try {
    comparison_test(c, 0.2, 3, grid, 123);
    FAIL("expected a numerical failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
}

TEST_CASE("iteration distances: state-free cases collapse immediately") {
  const TimeGrid grid(1.0, 64);
  const BrownianGrid w = sample_brownian(grid, 31);

  const PerturbedSpec ps{0.5, 0.5, coeffs_of("constant:1", "constant:0.5")};
  const PicardReport pr = picard_convergence_report(ps, w, 4);
  REQUIRE(pr.distances.size() == 4);
  for (double d : pr.distances) CHECK(d == 0.0);

  const ReflectedSpec rs{0.3, coeffs_of("constant:0", "constant:-1")};
  const PicardReport rr = picard_convergence_report(rs, w, 4);
  for (double d : rr.distances) CHECK(d == 0.0);
}

TEST_CASE("iteration distances match the truncated-series remainder") {
  const std::size_t n = 1024;
  const TimeGrid grid(1.0, n);
  BrownianGrid w;
  w.grid = grid;
  w.increments.assign(n, 0.0);
  const PerturbedSpec spec{1.0, 0.0, coeffs_of("constant:0", "affine:0:1")};
  const PicardReport rep = picard_convergence_report(spec, w, 8);
  REQUIRE(rep.distances.size() == 8);
  for (std::size_t m = 1; m <= 8; ++m) {
    const double expected = binomial_tail(n, m);
    CAPTURE(m);
    CHECK(std::abs(rep.distances[m - 1] - expected) <= 1e-9);
  }
  // sanity: the same remainders approach the exponential tail as n grows
  CHECK(binomial_tail(100000, 4) ==
        doctest::Approx(std::exp(1.0) - (1.0 + 1.0 + 0.5 + 1.0 / 6.0 + 1.0 / 24.0))
            .epsilon(1e-3));
}

TEST_CASE("iteration distances contract for the reflected equation") {
  const TimeGrid grid(1.0, 128);
  std::vector<double> ratios;
  for (std::uint64_t seed = 400; seed < 408; ++seed) {
    const BrownianGrid w = sample_brownian(grid, seed);
    const ReflectedSpec spec{0.4, coeffs_of("sin_perturbed:1.0:0.3")};
    const PicardReport rep = picard_convergence_report(spec, w, 8);
    if (rep.distances[3] > 0.0) ratios.push_back(rep.distances[7] / rep.distances[3]);
  }
  REQUIRE(!ratios.empty());
  std::sort(ratios.begin(), ratios.end());
  CHECK(ratios[ratios.size() / 2] < 0.5);
  CHECK_THROWS_AS(picard_convergence_report(
                      ReflectedSpec{0.4, coeffs_of("constant:1")},
                      sample_brownian(grid, 1), 1),
                  std::invalid_argument);
}

TEST_CASE("boundary occupation of the pinned degenerate case is total") {
  const ZeroHitReport rep = zero_hit_probability(
      ReflectedSpec{0.3, coeffs_of("constant:0", "constant:-1")}, 1.0, 64, 0.04, 200, 5);
  CHECK(rep.fraction == 1.0);
  CHECK(rep.fraction_half == 1.0);
  CHECK(rep.ratio == 1.0);
  CHECK(rep.n_paths == 200);
}

TEST_CASE("boundary mass of the reflected unit diffusion scales with the width") {
  const ZeroHitReport rep = zero_hit_probability(
      ReflectedSpec{0.0, coeffs_of("constant:1")}, 1.0, 4096, 0.04, 20000, 9);
  CHECK(rep.fraction > 0.0);
  // linear scaling: the half-width fraction sits near half the full one,
  // so the per-width slopes agree within 25%
  const double slope_ratio = 2.0 * rep.ratio;
  CHECK(slope_ratio >= 0.75);
  CHECK(slope_ratio <= 1.25);
}

}  // TEST_SUITE
