#pragma once

#include <string>
#include <vector>

#include "ghcm/model.hpp"

namespace ghcm {

/// Default Gauss-Legendre order per smooth piece of [0, r].
inline constexpr int kQuadratureOrder = 64;

/// Bracket width at which the golden-section search over t stops.
inline constexpr double kGoldenTolerance = 1e-10;

/// Half-width of the band around capacity 1 where no regime is claimed.
inline constexpr double kBoundaryBand = 1e-6;

/// Distance-averaged Chernoff coefficient
///   phibar_t(P, Q) = int_0^r phi_t(P(y), Q(y)) d y^(d-1) / r^d dy.
/// Smooth pieces are integrated with Gauss-Legendre of the given order; table
/// families use exact per-bin integrals of the weight.
double phibar_t(const DistributionFamily& fam, CommunityPair p, CommunityPair q, double t, int d,
                int order = kQuadratureOrder);

/// t -> sum_a pi_a phibar_t(P_ia, P_ja), the objective minimized by the CH-divergence.
double ch_objective(const DistributionFamily& fam, std::span<const double> pi, Community i,
                    Community j, double t, int d, int order = kQuadratureOrder);

struct Divergence {
  double d_plus = 0.0;
  double t_star = 0.5;
};

/// D_+(theta_i || theta_j; pi, g) = 1 - min_t ch_objective(t), with the minimizer t_ij.
Divergence ch_divergence(const DistributionFamily& fam, std::span<const double> pi, Community i,
                         Community j, int d);

enum class Regime { ImpossibleBelowThreshold, AchievableAboveThreshold, Impossible1D, Boundary };

std::string to_string(Regime regime);

struct PairDivergence {
  Community i;
  Community j;
  Divergence divergence;
};

struct ThresholdReport {
  std::vector<PairDivergence> pairs;  // i < j, row-major
  double min_divergence = 0.0;
  double nu_d = 0.0;
  /// lambda nu_d r^d min_{i != j} D_+
  double capacity = 0.0;
  std::size_t omega_count = 1;
  Regime regime = Regime::Boundary;
};

/// Classifies the configuration against the exact-recovery threshold.
Regime classify_regime(double capacity, int d, double lambda, double r, std::size_t omega_count);

ThresholdReport threshold_report(const ModelConfig& config);

/// Human-readable multi-line rendering.
std::string format_report(const ThresholdReport& report);

}  // namespace ghcm
