#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ghcm/distributions.hpp"
#include "ghcm/error.hpp"

using namespace ghcm;

namespace {

DistributionFamily uniform_table(double r) {
  TablePMF t;
  t.alphabet = {0.0, 1.0, 2.0, 3.0};
  t.bins = {0.0, r};
  t.pmf.assign(3, {{0.25, 0.25, 0.25, 0.25}});
  return DistributionFamily(2, r, t);
}

DistributionFamily skewed_table(double r) {
  TablePMF t;
  t.alphabet = {0.0, 1.0, 2.0};
  t.bins = {0.0, r / 2, r};
  t.pmf = {{{0.7, 0.2, 0.1}, {0.5, 0.3, 0.2}},
           {{0.1, 0.2, 0.7}, {0.2, 0.3, 0.5}},
           {{0.3, 0.4, 0.3}, {0.2, 0.6, 0.2}}};
  return DistributionFamily(2, r, t);
}

DistributionFamily piecewise_bernoulli(double r) {
  BernoulliGate g;
  g.f = {PiecewisePolynomial::steps({0.0, r / 2, r}, {0.9, 0.3}),
         PiecewisePolynomial::steps({0.0, r / 2, r}, {0.1, 0.5}),
         PiecewisePolynomial{{0.0, r}, {{0.8, -0.2}}}};
  return DistributionFamily(2, r, g);
}

}  // namespace

TEST_CASE("piecewise polynomial evaluation") {
  const auto p = PiecewisePolynomial{{0.0, 1.0, 2.0}, {{1.0, 2.0}, {0.0, 0.0, 1.0}}};
  CHECK(p(0.5) == doctest::Approx(2.0));
  CHECK(p(1.0) == doctest::Approx(1.0));  // right piece owns its left breakpoint
  CHECK(p(2.0) == doctest::Approx(4.0));  // last piece is closed
}

TEST_CASE("log density of built-in kinds") {
  const auto bern = symmetric_bernoulli(0.9, 0.1, 1.0);
  CHECK(log_density(bern, 0, 1, 1.0, 0.3) == doctest::Approx(std::log(0.1)));
  CHECK(log_density(bern, 1, 0, 1.0, 1.0) == doctest::Approx(-2.302585).epsilon(1e-6));
  CHECK(log_density(bern, 0, 0, 0.0, 0.0) == doctest::Approx(std::log(0.1)));

  const auto gauss = symmetric_gaussian(0.0, 1.0, 1.0);
  CHECK(log_density(gauss, 0, 1, 0.0, 0.5) ==
        doctest::Approx(-0.918939).epsilon(1e-6));
  // Outside the truncation window the density vanishes.
  CHECK(std::isinf(log_density(gauss, 0, 1, 9.0, 0.5)));

  const auto table = uniform_table(1.0);
  for (double x : {0.0, 1.0, 2.0, 3.0}) {
    CHECK(log_density(table, 0, 1, x, 0.7) == doctest::Approx(std::log(0.25)));
  }
}

TEST_CASE("log density rejects out-of-range arguments") {
  const auto bern = symmetric_bernoulli(0.9, 0.1, 1.0);
  CHECK_THROWS_AS(log_density(bern, 0, 1, 1.0, 1.5), DomainError);
  CHECK_THROWS_AS(log_density(bern, 0, 1, 0.5, 0.2), DomainError);
  CHECK_THROWS_AS(log_density(uniform_table(1.0), 0, 0, 7.0, 0.2), DomainError);
}

TEST_CASE("family construction validates parameters") {
  CHECK_THROWS_AS(symmetric_bernoulli(1.2, 0.1, 1.0), ConfigError);
  BernoulliGate short_gate;
  short_gate.f = {PiecewisePolynomial::constant(0.5, 1.0)};
  CHECK_THROWS_AS(DistributionFamily(2, 1.0, short_gate), ConfigError);
  TablePMF bad = std::get<TablePMF>(uniform_table(1.0).payload());
  bad.pmf[1][0] = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(DistributionFamily(2, 1.0, bad), ConfigError);
}

TEST_CASE("degenerate gate always fires") {
  BernoulliGate g;
  g.f.assign(3, PiecewisePolynomial::constant(1.0, 1.0));
  const DistributionFamily fam(2, 1.0, g);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(sample_edge_weight(fam, 0, 1, 0.4, rng) == 1.0);
}

TEST_CASE("gaussian sample mean") {
  GaussianShift g;
  g.mu.assign(3, PiecewisePolynomial::constant(5.0, 1.0));
  g.sigma = 1.0;
  const DistributionFamily fam(2, 1.0, g);
  Rng rng(11);
  double sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) sum += sample_edge_weight(fam, 0, 1, 0.2, rng);
  CHECK(std::abs(sum / draws - 5.0) <= 0.02);
}

TEST_CASE("table sample frequencies sit inside multinomial bands") {
  const auto fam = skewed_table(1.0);
  Rng rng(13);
  const int draws = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < draws; ++i) {
    counts[static_cast<std::size_t>(sample_edge_weight(fam, 0, 1, 0.8, rng))]++;
  }
  const std::vector<double> expected{0.2, 0.3, 0.5};  // pair (0,1), second bin
  for (std::size_t s = 0; s < 3; ++s) {
    const double sd = std::sqrt(draws * expected[s] * (1 - expected[s]));
    CHECK(std::abs(counts[s] - draws * expected[s]) <= 3.0 * sd);
  }
}

TEST_CASE("chernoff coefficient closed forms") {
  const auto bern = symmetric_bernoulli(0.9, 0.1, 1.0);
  for (double t : {0.0, 0.3, 0.5, 1.0}) {
    CHECK(phi_t(bern, {0, 0}, {0, 0}, t, 0.4) == doctest::Approx(1.0));
  }
  CHECK(phi_t(bern, {0, 0}, {0, 1}, 0.5, 0.4) == doctest::Approx(0.6));

  const auto gauss = symmetric_gaussian(2.0, 1.0, 1.0);
  CHECK(phi_t(gauss, {0, 0}, {0, 1}, 0.5, 0.1) == doctest::Approx(std::exp(-0.5)));
  CHECK(phi_t(gauss, {0, 0}, {0, 1}, 0.5, 0.1) == doctest::Approx(0.606531).epsilon(1e-6));
  const double t = 0.3;
  CHECK(phi_t(gauss, {0, 0}, {0, 1}, t, 0.1) ==
        doctest::Approx(std::exp(-t * (1 - t) * 4.0 / 2.0)));
}

TEST_CASE("closed-form chernoff coefficient agrees with direct summation and integration") {
  const std::vector<DistributionFamily> families{
      symmetric_bernoulli(0.8, 0.3, 1.5, 3), symmetric_gaussian(1.3, 0.7, 1.0, 3),
      piecewise_bernoulli(1.0), skewed_table(2.0), uniform_table(1.0)};
  for (const auto& fam : families) {
    for (Community a = 0; a < fam.k(); ++a) {
      for (Community b = a; b < fam.k(); ++b) {
        for (double t : {0.0, 0.2, 0.5, 0.9}) {
          for (double frac : {0.0, 0.3, 0.5, 0.75, 1.0}) {
            const double y = frac * fam.r();
            CHECK(phi_t(fam, {0, 0}, {a, b}, t, y) ==
                  doctest::Approx(phi_t_numeric(fam, {0, 0}, {a, b}, t, y)).epsilon(1e-8));
          }
        }
      }
    }
  }
}

TEST_CASE("every law integrates to one") {
  const std::vector<DistributionFamily> families{symmetric_gaussian(3.0, 0.5, 1.0),
                                                 piecewise_bernoulli(1.0), skewed_table(1.0)};
  for (const auto& fam : families) {
    for (double y : {0.0, 0.25, 0.5, 0.9}) {
      CHECK(total_mass(fam, 0, 1, y) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(total_mass(fam, 1, 1, y) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("validation of the symmetric assortative family") {
  const auto report = validate_family(symmetric_bernoulli(0.9, 0.1, 1.0));
  CHECK(report.identifiable);
  CHECK(report.distinct);
  CHECK_FALSE(report.strongly_distinct);  // P_11 and P_22 coincide
  CHECK(report.bounded_likelihood);
  CHECK(report.eta_estimate == doctest::Approx(std::log(9.0)));
  CHECK(report.supports_standard());
  CHECK_FALSE(report.supports_segmented());
}

TEST_CASE("identical pairs violate distinctness") {
  const auto report = validate_family(symmetric_bernoulli(0.4, 0.4, 1.0));
  CHECK_FALSE(report.distinct);
  CHECK_FALSE(report.supports_standard());
}

TEST_CASE("laws equal on half the range are flagged as mixed") {
  GaussianShift g;
  g.sigma = 1.0;
  g.mu = {PiecewisePolynomial::constant(1.0, 1.0),
          PiecewisePolynomial::steps({0.0, 0.5, 1.0}, {1.0, 0.0}),
          PiecewisePolynomial::constant(-1.0, 1.0)};
  const DistributionFamily fam(2, 1.0, g);
  CHECK(relation(fam, {0, 0}, {0, 1}) == PairRelation::Mixed);
  CHECK(relation_by_log_density(fam, {0, 0}, {0, 1}) == PairRelation::Mixed);
  const auto report = validate_family(fam);
  CHECK_FALSE(report.identifiable);
  CHECK_FALSE(report.supports_standard());
}

TEST_CASE("crossing laws that meet at a single distance stay distinct") {
  BernoulliGate g;
  g.f = {PiecewisePolynomial{{0.0, 1.0}, {{0.9, -0.8}}},  // 0.9 -> 0.1
         PiecewisePolynomial{{0.0, 1.0}, {{0.1, 0.8}}},   // 0.1 -> 0.9, equal at y = 0.5
         PiecewisePolynomial::constant(0.7, 1.0)};
  const DistributionFamily fam(2, 1.0, g);
  CHECK(relation(fam, {0, 0}, {0, 1}) == PairRelation::Distinct);
  CHECK(relation_by_log_density(fam, {0, 0}, {0, 1}) == PairRelation::Distinct);
}

TEST_CASE("grid relations agree between parameter and density routes") {
  const std::vector<DistributionFamily> families{
      symmetric_bernoulli(0.8, 0.3, 1.0, 3), symmetric_gaussian(1.0, 1.0, 1.0),
      piecewise_bernoulli(1.0), skewed_table(1.0), uniform_table(1.0)};
  for (const auto& fam : families) {
    for (Community a = 0; a < fam.k(); ++a) {
      for (Community b = a; b < fam.k(); ++b) {
        for (Community c = 0; c < fam.k(); ++c) {
          for (Community e = c; e < fam.k(); ++e) {
            CHECK(relation(fam, {a, b}, {c, e}) == relation_by_log_density(fam, {a, b}, {c, e}));
          }
        }
      }
    }
  }
}

TEST_CASE("declared likelihood-ratio bound is enforced") {
  const auto fam = symmetric_bernoulli(0.9, 0.1, 1.0);
  const DistributionFamily tight(2, 1.0, std::get<BernoulliGate>(fam.payload()), 1.0);
  CHECK_FALSE(validate_family(tight).bounded_likelihood);
  const DistributionFamily loose(2, 1.0, std::get<BernoulliGate>(fam.payload()), 3.0);
  CHECK(validate_family(loose).bounded_likelihood);
}
