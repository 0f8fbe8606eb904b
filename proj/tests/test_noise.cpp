#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "plab/noise.hpp"

using namespace plab;

TEST_SUITE("noise") {

TEST_CASE("time grid arithmetic") {
  const TimeGrid g(2.0, 8);
  CHECK(g.dt() == 0.25);
  CHECK(g.t(0) == 0.0);
  CHECK(g.t(8) == 2.0);
  CHECK(std::abs(g.dt() * 8 - g.horizon) <= 1e-15 * g.horizon);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(-1.0, 4), std::invalid_argument);
}

TEST_CASE("sampling is a pure function of grid and seed") {
  const TimeGrid g(1.0, 64);
  const BrownianGrid a = sample_brownian(g, 9001);
  const BrownianGrid b = sample_brownian(g, 9001);
  REQUIRE(a.increments.size() == 64);
  CHECK(a.increments == b.increments);  // bitwise
  const BrownianGrid c = sample_brownian(g, 9002);
  CHECK(a.increments != c.increments);
}

TEST_CASE("single-step path reconstructs to its one increment") {
  const TimeGrid g(1.0, 1);
  const BrownianGrid w = sample_brownian(g, 5);
  const std::vector<double> path = w.cumulative();
  REQUIRE(path.size() == 2);
  CHECK(path[0] == 0.0);
  CHECK(path[1] == w.increments[0]);
}

TEST_CASE("increment variance matches dt") {
  // 1e5 first increments on a dt = 0.01 grid; the exact sampling variance of
  // the empirical variance puts it inside [0.0097, 0.0103] at 99% confidence.
  const TimeGrid g(0.01, 1);
  const std::size_t n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double x = sample_brownian(g, s).increments[0];
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = (sumsq - static_cast<double>(n) * mean * mean) /
                     static_cast<double>(n - 1);
  CHECK(var > 0.0097);
  CHECK(var < 0.0103);
  CHECK(std::abs(mean) < 4.0 * std::sqrt(0.01 / static_cast<double>(n)));
}

TEST_CASE("shift adds eps * h * dt and leaves the input alone") {
  const TimeGrid g(1.0, 10);  // dt = 0.1
  const BrownianGrid w = sample_brownian(g, 3);
  const std::vector<double> original = w.increments;

  CameronMartinShift h{g, std::vector<double>(10, 1.0)};
  const BrownianGrid unchanged = shift(w, h, 0.0);
  CHECK(unchanged.increments == original);

  const BrownianGrid up = shift(w, h, 1.0);
  for (std::size_t k = 0; k < 10; ++k)
    CHECK(up.increments[k] == doctest::Approx(original[k] + 0.1).epsilon(1e-15));
  CHECK(w.increments == original);  // source untouched

  const BrownianGrid back = shift(shift(w, h, 0.37), h, -0.37);
  for (std::size_t k = 0; k < 10; ++k)
    CHECK(back.increments[k] == doctest::Approx(original[k]).epsilon(1e-15));

  CameronMartinShift wrong{TimeGrid(1.0, 4), std::vector<double>(4, 1.0)};
  CHECK_THROWS_AS(shift(w, wrong, 1.0), std::invalid_argument);
}

TEST_CASE("h-pairing is left-endpoint quadrature") {
  const TimeGrid g(2.0, 8);
  CameronMartinShift ones{g, std::vector<double>(8, 1.0)};
  CHECK(pair_h(std::vector<double>(8, 0.0), ones) == 0.0);
  CHECK(pair_h(std::vector<double>(8, 1.0), ones) == 2.0);

  const TimeGrid unit(1.0, 8);
  CameronMartinShift half{unit, std::vector<double>(8, 0.0)};
  std::vector<double> u(8, 0.0);
  for (std::size_t k = 0; k < 4; ++k) {
    half.h[k] = 1.0;  // indicator of the first half of [0, 1]
    u[k] = 1.0;
  }
  CHECK(pair_h(u, half) == 0.5);
  CHECK(half.norm_squared() == 0.5);

  CHECK_THROWS_AS(pair_h(std::vector<double>(7, 1.0), ones), std::invalid_argument);
}

TEST_CASE("sampled shift directions are deterministic and finite") {
  const TimeGrid g(1.0, 32);
  const CameronMartinShift h1 = sample_shift_direction(g, 11);
  const CameronMartinShift h2 = sample_shift_direction(g, 11);
  REQUIRE(h1.h.size() == 32);
  CHECK(h1.h == h2.h);
  CHECK(std::isfinite(h1.norm_squared()));
  CHECK(h1.norm_squared() > 0.0);
}

}  // TEST_SUITE
