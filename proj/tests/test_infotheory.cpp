#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ghcm/infotheory.hpp"
#include "ghcm/numerics.hpp"
#include "support.hpp"

using namespace ghcm;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto& rule = numerics::cached_gauss_legendre(8);
  const auto cubic = [](double x) { return 4 * x * x * x - x + 2; };
  CHECK(numerics::integrate_gauss_legendre(cubic, 0.0, 2.0, rule) == doctest::Approx(18.0));
  double wsum = 0.0;
  for (double w : numerics::gauss_legendre(64).weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("golden section finds interior and boundary minima") {
  const auto inner = numerics::golden_section_minimize(
      [](double t) { return (t - 0.3) * (t - 0.3); }, 0.0, 1.0, 1e-10);
  CHECK(inner.argmin == doctest::Approx(0.3).epsilon(1e-8));
  const auto edge = numerics::golden_section_minimize([](double t) { return t; }, 0.0, 1.0, 1e-10);
  CHECK(edge.argmin == 0.0);
}

TEST_CASE("distance-averaged coefficient of identical laws is one") {
  const auto fam = symmetric_bernoulli(0.9, 0.1, 1.0);
  for (int d = 1; d <= 3; ++d) {
    CHECK(phibar_t(fam, {0, 1}, {0, 1}, 0.37, d) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("distance-independent laws average to their pointwise coefficient") {
  const auto fam = symmetric_gaussian(1.5, 0.8, 2.0);
  const double pointwise = phi_t(fam, {0, 0}, {0, 1}, 0.4, 1.0);
  for (int d = 1; d <= 3; ++d) {
    CHECK(phibar_t(fam, {0, 0}, {0, 1}, 0.4, d) == doctest::Approx(pointwise).epsilon(1e-12));
  }
}

TEST_CASE("piecewise-constant gate against a fair coin") {
  BernoulliGate g;
  g.f = {PiecewisePolynomial::steps({0.0, 0.5, 1.0}, {0.9, 0.5}),
         PiecewisePolynomial::constant(0.5, 1.0), PiecewisePolynomial::constant(0.5, 1.0)};
  const DistributionFamily fam(2, 1.0, g);
  const double expected = 0.5 * (std::sqrt(0.45) + std::sqrt(0.05)) + 0.5;
  CHECK(expected == doctest::Approx(0.947213).epsilon(1e-6));
  CHECK(phibar_t(fam, {0, 0}, {0, 1}, 0.5, 1) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("divergence of identical rows is zero") {
  const auto fam = symmetric_bernoulli(0.4, 0.4, 1.0);
  const std::vector<double> pi{0.5, 0.5};
  CHECK(ch_divergence(fam, pi, 0, 1, 2).d_plus == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("divergence of the symmetric 0.9/0.1 gate") {
  const auto fam = symmetric_bernoulli(0.9, 0.1, 1.0);
  const std::vector<double> pi{0.5, 0.5};
  const auto div = ch_divergence(fam, pi, 0, 1, 2);
  CHECK(std::abs(div.d_plus - 0.4) < 1e-6);
  CHECK(div.t_star == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("divergence of the unit-gap gaussian pair") {
  const auto fam = symmetric_gaussian(2.0, 1.0, 1.0);
  const std::vector<double> pi{0.5, 0.5};
  const auto div = ch_divergence(fam, pi, 0, 1, 2);
  CHECK(std::abs(div.d_plus - (1.0 - std::exp(-0.5))) < 1e-6);
  CHECK(div.d_plus == doctest::Approx(0.393469).epsilon(1e-6));
}

TEST_CASE("golden section result is the global minimum on a fine t grid") {
  BernoulliGate g;
  g.f = {PiecewisePolynomial::steps({0.0, 0.5, 1.0}, {0.9, 0.3}),
         PiecewisePolynomial::steps({0.0, 0.5, 1.0}, {0.1, 0.5}),
         PiecewisePolynomial::constant(0.6, 1.0)};
  const DistributionFamily fam(2, 1.0, g);
  const std::vector<double> pi{0.3, 0.7};
  for (int d = 1; d <= 3; ++d) {
    for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 0}}) {
      const auto div = ch_divergence(fam, pi, i, j, d);
      double grid_min = 1.0;
      for (int s = 0; s <= 1000; ++s) {
        grid_min = std::min(grid_min, ch_objective(fam, pi, i, j, s / 1000.0, d));
      }
      CHECK(1.0 - div.d_plus <= grid_min + 1e-12);
      CHECK(1.0 - div.d_plus >= grid_min - 1e-5);
    }
  }
}

TEST_CASE("doubling the quadrature order barely moves the averaged coefficient") {
  BernoulliGate g;
  g.f = {PiecewisePolynomial{{0.0, 0.4, 1.0}, {{0.95, -0.5, 0.1}, {0.8, -0.6}}},
         PiecewisePolynomial{{0.0, 1.0}, {{0.05, 0.3}}},
         PiecewisePolynomial::constant(0.7, 1.0)};
  const std::vector<DistributionFamily> families{
      DistributionFamily(2, 1.0, g), symmetric_bernoulli(0.9, 0.1, 1.0),
      symmetric_gaussian(2.0, 1.0, 1.5, 3)};
  for (const auto& fam : families) {
    for (int d = 1; d <= 3; ++d) {
      for (double t : {0.1, 0.5, 0.8}) {
        const double a = phibar_t(fam, {0, 0}, {0, 1}, t, d, 64);
        const double b = phibar_t(fam, {0, 0}, {0, 1}, t, d, 128);
        CHECK(std::abs(a - b) < 1e-8);
      }
    }
  }
}

TEST_CASE("threshold report of the planar 0.9/0.1 example") {
  const auto config = testing::symmetric_bernoulli_config(0.9, 0.1, 1.0, 1e4, 1.0, 2);
  const auto report = threshold_report(config);
  CHECK(report.capacity == doctest::Approx(std::numbers::pi * 0.4).epsilon(1e-6));
  CHECK(report.capacity == doctest::Approx(1.2566).epsilon(1e-4));
  CHECK(report.omega_count == 2);
  CHECK(report.regime == Regime::AchievableAboveThreshold);
  const auto text = format_report(report);
  CHECK(text.find("AchievableAboveThreshold") != std::string::npos);
}

TEST_CASE("halving the radius drops below the threshold") {
  const auto config = testing::symmetric_bernoulli_config(0.9, 0.1, 1.0, 1e4, 0.5, 2);
  const auto report = threshold_report(config);
  CHECK(report.capacity == doctest::Approx(std::numbers::pi * 0.25 * 0.4).epsilon(1e-6));
  CHECK(report.regime == Regime::ImpossibleBelowThreshold);
}

TEST_CASE("sparse line with a swap symmetry is impossible regardless of divergence") {
  const auto config = testing::symmetric_bernoulli_config(0.999, 0.001, 0.5, 1e4, 1.0, 1);
  CHECK(threshold_report(config).regime == Regime::Impossible1D);
  CHECK(classify_regime(50.0, 1, 0.5, 1.0, 2) == Regime::Impossible1D);
  CHECK(classify_regime(50.0, 1, 0.5, 1.0, 1) == Regime::AchievableAboveThreshold);
}

TEST_CASE("capacity within the band around one is a boundary case") {
  CHECK(classify_regime(1.0 + 1e-7, 2, 1.0, 1.0, 2) == Regime::Boundary);
  CHECK(classify_regime(1.0 - 1e-7, 2, 1.0, 1.0, 2) == Regime::Boundary);
  CHECK(classify_regime(1.01, 2, 1.0, 1.0, 2) == Regime::AchievableAboveThreshold);
  CHECK(classify_regime(0.99, 2, 1.0, 1.0, 2) == Regime::ImpossibleBelowThreshold);
}

TEST_CASE("capacity scales linearly in intensity and as r^d in radius") {
  const auto base = threshold_report(testing::symmetric_bernoulli_config(0.8, 0.2, 1.0, 1e4, 1.0, 3));
  const auto dense = threshold_report(testing::symmetric_bernoulli_config(0.8, 0.2, 2.5, 1e4, 1.0, 3));
  CHECK(dense.capacity == doctest::Approx(2.5 * base.capacity).epsilon(1e-9));
  const auto wide = threshold_report(testing::symmetric_bernoulli_config(0.8, 0.2, 1.0, 1e6, 1.5, 3));
  CHECK(wide.capacity == doctest::Approx(1.5 * 1.5 * 1.5 * base.capacity).epsilon(1e-9));
}
