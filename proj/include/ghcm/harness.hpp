#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ghcm/config.hpp"
#include "ghcm/evaluation.hpp"
#include "ghcm/infotheory.hpp"
#include "ghcm/recovery.hpp"

namespace ghcm {

enum class Algorithm { Standard, Segmented1D, Auto };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

/// Resolves Auto: segmented iff d = 1, lambda r <= 1 and |Omega| = 1. Throws
/// AssumptionViolation when d = 1, lambda r <= 1 and |Omega| >= 2.
Algorithm resolve_algorithm(Algorithm requested, const ModelConfig& config,
                            std::size_t omega_count);

/// Symmetric family parameters swept as one axis: within-community and across-community value.
struct FamilyPoint {
  double within = 0.0;
  double across = 0.0;
};

/// Replaces every diagonal pair law by `within` and every off-diagonal one by `across`
/// (constants in y). Bernoulli: probabilities; Gaussian: means.
DistributionFamily with_symmetric_parameters(const DistributionFamily& fam, FamilyPoint point);

struct SweepPoint {
  std::size_t index = 0;
  ModelConfig config;
  std::optional<FamilyPoint> family_point;
};

struct ExperimentPlan {
  ModelConfig base;
  std::vector<double> n_values;
  std::vector<double> lambda_values;
  std::vector<double> r_values;
  std::vector<FamilyPoint> family_points;  // empty: use the base family
  std::size_t trials_per_point = 1;
  std::uint64_t base_seed = 1;
  Algorithm algorithm = Algorithm::Auto;
  RecoveryOptions recovery;
  std::string csv_path;

  /// Cartesian product in the order family, lambda, r, n (n varies fastest).
  std::vector<SweepPoint> points() const;
  std::uint64_t seed_for(std::size_t point_index, std::size_t trial_index) const {
    return base_seed + point_index * trials_per_point + trial_index;
  }
  void validate() const;
};

/// Reads [model], [family], optional [sweep], [recovery] and [output].
ExperimentPlan plan_from_tree(const ConfigTree& tree);
RecoveryOptions recovery_options_from_tree(const ConfigTree& tree);

struct TrialResult {
  std::size_t point_index = 0;
  double n = 0.0;
  double lambda = 0.0;
  double r = 0.0;
  int d = 1;
  std::optional<FamilyPoint> family_point;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Standard;
  double capacity = 0.0;
  Regime regime = Regime::Boundary;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  bool connected = false;
  bool failed = false;
  bool exact = false;
  double agreement = 0.0;
  std::size_t segments = 0;
  std::size_t seed_size = 0;
  std::size_t seed_mistakes = 0;
  std::size_t max_block_mistakes = 0;
  std::size_t phase_one_unlabeled = 0;
  std::size_t refine_changes = 0;
  std::size_t flip_bad_count = 0;
  double wall_time_s = 0.0;
};

/// Sample, recover, evaluate. Deterministic in (config, seed) apart from wall time.
/// `report` may be supplied to skip recomputing the threshold.
TrialResult run_trial(const ModelConfig& config, std::uint64_t seed, Algorithm algorithm,
                      const RecoveryOptions& options = {},
                      const ThresholdReport* report = nullptr);

struct PointSummary {
  std::size_t point_index = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  double mean_agreement = 0.0;
  double mean_flip_bad = 0.0;
  double connected_rate = 0.0;
};

/// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

PointSummary summarize(std::size_t point_index, const std::vector<TrialResult>& trials);

inline constexpr int kCsvSchemaVersion = 1;

std::string csv_header();
std::string csv_row(const TrialResult& trial);
std::string csv_row(const PointSummary& summary, const TrialResult& first_trial);

struct SweepOutput {
  std::vector<TrialResult> trials;      // sorted by (point, seed)
  std::vector<PointSummary> summaries;  // one per point
};

/// Runs every trial of the plan on `threads` workers (0: hardware concurrency) and
/// returns results in deterministic order.
SweepOutput run_sweep_trials(const ExperimentPlan& plan, unsigned threads = 0);

void write_sweep_csv(std::ostream& out, const SweepOutput& sweep);

/// Opens the CSV first (failing before any compute), then runs and writes.
SweepOutput run_sweep(const ExperimentPlan& plan, unsigned threads = 0);

}  // namespace ghcm
