#include "ghcm/infotheory.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "ghcm/error.hpp"
#include "ghcm/evaluation.hpp"
#include "ghcm/numerics.hpp"

namespace ghcm {

double phibar_t(const DistributionFamily& fam, CommunityPair p, CommunityPair q, double t, int d,
                int order) {
  if (d < 1) throw ContractViolation("phibar_t: d must be >= 1");
  const double r = fam.r();
  auto cuts = fam.breakpoints(p);
  const auto more = fam.breakpoints(q);
  cuts.insert(cuts.end(), more.begin(), more.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double rd = std::pow(r, d);
  if (fam.kind() == FamilyKind::TablePMF) {
    double total = 0.0;
    for (std::size_t b = 0; b + 1 < cuts.size(); ++b) {
      const double mass = (std::pow(cuts[b + 1], d) - std::pow(cuts[b], d)) / rd;
      total += mass * phi_t(fam, p, q, t, 0.5 * (cuts[b] + cuts[b + 1]));
    }
    return total;
  }
  auto integrand = [&](double y) {
    return phi_t(fam, p, q, t, y) * d * std::pow(y, d - 1) / rd;
  };
  return numerics::integrate_piecewise(integrand, cuts, numerics::cached_gauss_legendre(order));
}

double ch_objective(const DistributionFamily& fam, std::span<const double> pi, Community i,
                    Community j, double t, int d, int order) {
  double total = 0.0;
  for (Community a = 0; a < fam.k(); ++a) {
    const double weight = pi[static_cast<std::size_t>(a)];
    if (weight == 0.0) continue;
    total += weight * phibar_t(fam, {i, a}, {j, a}, t, d, order);
  }
  return total;
}

Divergence ch_divergence(const DistributionFamily& fam, std::span<const double> pi, Community i,
                         Community j, int d) {
  if (i == j) throw ContractViolation("ch_divergence: communities must differ");
  const auto min = numerics::golden_section_minimize(
      [&](double t) { return ch_objective(fam, pi, i, j, t, d); }, 0.0, 1.0, kGoldenTolerance);
  // Both endpoints evaluate to sum_a pi_a = 1, so the minimum can never exceed it.
  const double value = std::min(min.value, 1.0);
  return {std::clamp(1.0 - value, 0.0, 1.0), min.argmin};
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::ImpossibleBelowThreshold: return "ImpossibleBelowThreshold";
    case Regime::AchievableAboveThreshold: return "AchievableAboveThreshold";
    case Regime::Impossible1D: return "Impossible1D";
    case Regime::Boundary: return "Boundary";
  }
  return "Unknown";
}

Regime classify_regime(double capacity, int d, double lambda, double r, std::size_t omega_count) {
  if (d == 1 && lambda * r < 1.0 && omega_count >= 2) return Regime::Impossible1D;
  if (std::abs(capacity - 1.0) < kBoundaryBand) return Regime::Boundary;
  if (capacity < 1.0) return Regime::ImpossibleBelowThreshold;
  if (d >= 2 || lambda * r > 1.0 || omega_count == 1) return Regime::AchievableAboveThreshold;
  // d = 1, lambda r = 1 exactly with a nontrivial symmetry group: neither theorem applies.
  return Regime::Boundary;
}

ThresholdReport threshold_report(const ModelConfig& config) {
  config.validate();
  ThresholdReport report;
  report.nu_d = unit_ball_volume(config.d);
  report.min_divergence = 1.0;
  for (Community i = 0; i < config.k(); ++i) {
    for (Community j = i + 1; j < config.k(); ++j) {
      const auto div = ch_divergence(config.family, config.pi, i, j, config.d);
      report.pairs.push_back({i, j, div});
      report.min_divergence = std::min(report.min_divergence, div.d_plus);
    }
  }
  report.capacity =
      config.lambda * report.nu_d * std::pow(config.r, config.d) * report.min_divergence;
  report.omega_count = permissible_relabelings(config.pi, config.family).size();
  report.regime =
      classify_regime(report.capacity, config.d, config.lambda, config.r, report.omega_count);
  return report;
}

std::string format_report(const ThresholdReport& report) {
  std::string out;
  for (const auto& p : report.pairs) {
    out += fmt::format("pair {} {}: D_plus = {:.10f}, t_star = {:.10f}\n", p.i, p.j,
                       p.divergence.d_plus, p.divergence.t_star);
  }
  out += fmt::format("min_divergence = {:.10f}\n", report.min_divergence);
  out += fmt::format("nu_d = {:.10f}\n", report.nu_d);
  out += fmt::format("capacity = {:.10f}\n", report.capacity);
  out += fmt::format("omega_count = {}\n", report.omega_count);
  out += fmt::format("regime = {}\n", to_string(report.regime));
  return out;
}

}  // namespace ghcm
