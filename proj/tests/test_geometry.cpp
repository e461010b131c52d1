#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ghcm/error.hpp"
#include "ghcm/geometry.hpp"
#include "support.hpp"

using namespace ghcm;

TEST_CASE("toroidal distance wraps around the shorter way") {
  CHECK(toroidal_distance({{1.0}}, {{9.0}}, 10.0) == doctest::Approx(2.0));
  CHECK(toroidal_distance({{4.5, 0.0}}, {{-4.5, 0.0}}, 10.0) == doctest::Approx(1.0));
  const TorusPoint a{{0.3, -2.0, 4.9}};
  CHECK(toroidal_distance(a, a, 10.0) == 0.0);
}

TEST_CASE("toroidal distance rejects mixed dimensions") {
  CHECK_THROWS_AS(toroidal_distance({{1.0}}, {{1.0, 2.0}}, 10.0), ContractViolation);
}

TEST_CASE("toroidal distance is symmetric and bounded by half the diagonal") {
  Rng rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const TorusPoint a{{u(rng), u(rng), u(rng)}};
    const TorusPoint b{{u(rng), u(rng), u(rng)}};
    const double ab = toroidal_distance(a, b, 10.0);
    CHECK(ab == doctest::Approx(toroidal_distance(b, a, 10.0)));
    CHECK(ab <= 5.0 * std::sqrt(3.0) + 1e-12);
  }
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}

TEST_CASE("poisson point count has the right mean") {
  // Mean 10000, standard deviation 100; the mean of 1000 counts has sd 100 / sqrt(1000).
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    total += static_cast<double>(sample_poisson_points(1.0, 10000.0, 2, rng).size());
  }
  CHECK(std::abs(total / 1000.0 - 10000.0) <= 3.0 * 100.0 / std::sqrt(1000.0));
}

TEST_CASE("poisson points lie in the centred cube") {
  Rng rng(3);
  const auto pts = sample_poisson_points(1.0, 1000.0, 3, rng);
  const double half = torus_side(1000.0, 3) / 2.0;
  for (const auto& p : pts) {
    REQUIRE(p.dim() == 3);
    for (double c : p.coords) {
      CHECK(c >= -half);
      CHECK(c < half);
    }
  }
}

TEST_CASE("tiny intensity almost always gives no points") {
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    if (sample_poisson_points(0.0001, 1.0, 1, rng).empty()) ++empty;
  }
  CHECK(empty >= 195);
}

TEST_CASE("poisson sampling is deterministic per seed") {
  Rng a(99), b(99);
  CHECK(sample_poisson_points(2.0, 500.0, 2, a) == sample_poisson_points(2.0, 500.0, 2, b));
}

TEST_CASE("poisson sampling rejects absurd means") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_poisson_points(1.0, 1e16, 1, rng), ConfigError);
  CHECK_THROWS_AS(sample_poisson_points(-1.0, 10.0, 1, rng), ConfigError);
}

TEST_CASE("visible pairs on a line") {
  const std::vector<TorusPoint> pts{{{0.0}}, {{1.0}}, {{5.0}}};
  const auto grid = SpatialGrid::build(pts, 100.0, 2.0);
  const auto pairs = visible_pairs(pts, 2.0, grid);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].u == 0);
  CHECK(pairs[0].v == 1);
  CHECK(pairs[0].distance == doctest::Approx(1.0));
}

TEST_CASE("radius below the minimum spacing gives no pairs") {
  const std::vector<TorusPoint> pts{{{0.0, 0.0}}, {{3.0, 0.0}}, {{0.0, 3.0}}};
  const auto grid = SpatialGrid::build(pts, 20.0, 1.0);
  CHECK(visible_pairs(pts, 1.0, grid).empty());
}

TEST_CASE("visible pairs match a brute-force scan") {
  for (int d = 1; d <= 3; ++d) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed * 31 + static_cast<std::uint64_t>(d));
      const double n = 500.0;
      const auto pts = sample_poisson_points(1.0, n, d, rng);
      const double L = torus_side(n, d);
      for (double radius : {0.3, 1.0, 0.49 * L}) {
        const auto grid = SpatialGrid::build(pts, L, radius);
        const auto fast = visible_pairs(pts, radius, grid);
        const auto slow = testing::brute_force_pairs(pts, L, radius);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
          CHECK(fast[i].u == slow[i].u);
          CHECK(fast[i].v == slow[i].v);
          CHECK(fast[i].distance == doctest::Approx(slow[i].distance));
        }
      }
    }
  }
}

TEST_CASE("visible pairs reject radii beyond half the side") {
  const std::vector<TorusPoint> pts{{{0.0}}, {{1.0}}};
  const auto grid = SpatialGrid::build(pts, 10.0, 4.0);
  CHECK_THROWS_AS(visible_pairs(pts, 6.0, grid), DomainError);
}

TEST_CASE("spatial grid buckets every point exactly once") {
  Rng rng(5);
  const auto pts = sample_poisson_points(1.0, 2000.0, 2, rng);
  const double L = torus_side(2000.0, 2);
  const auto grid = SpatialGrid::build(pts, L, 2.0);
  CHECK(grid.cell_side() >= 2.0);
  std::vector<int> seen(pts.size(), 0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    for (VertexId id : grid.bucket(c)) {
      ++seen[id];
      CHECK(grid.cell_of(pts[id]) == c);
    }
  }
  for (int s : seen) CHECK(s == 1);
}
