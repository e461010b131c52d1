#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ghcm/geometry.hpp"

namespace ghcm {

using Community = int;
using Observation = double;

/// Piecewise polynomial on [0, r]. Piece p covers [breakpoints[p], breakpoints[p+1])
/// (the last piece is closed) and evaluates sum_k coefficients[p][k] * y^k.
struct PiecewisePolynomial {
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> coefficients;

  static PiecewisePolynomial constant(double value, double r);
  /// Piecewise-constant function; `cuts` runs from 0 to r and has one more entry than `values`.
  static PiecewisePolynomial steps(std::vector<double> cuts, std::vector<double> values);

  double operator()(double y) const;
  std::size_t piece_count() const { return coefficients.size(); }
  bool operator==(const PiecewisePolynomial&) const = default;
};

/// Observation x in {0, 1}; f(y) is the probability of observing 1.
struct BernoulliGate {
  std::vector<PiecewisePolynomial> f;
};

/// Observation x ~ N(mu(y), sigma^2) truncated to mu(y) +- 8 sigma.
struct GaussianShift {
  std::vector<PiecewisePolynomial> mu;
  double sigma = 1.0;
  static constexpr double kTruncation = 8.0;
};

/// Finite alphabet; pmf[pair][bin][symbol], piecewise constant over distance bins.
struct TablePMF {
  std::vector<double> alphabet;
  std::vector<double> bins;
  std::vector<std::vector<std::vector<double>>> pmf;
};

enum class FamilyKind { BernoulliGate, GaussianShift, TablePMF };

std::string to_string(FamilyKind kind);

/// Unordered community pair (i, j); stored with first <= second.
struct CommunityPair {
  Community first;
  Community second;

  CommunityPair(Community a, Community b) : first(std::min(a, b)), second(std::max(a, b)) {}
  bool operator==(const CommunityPair&) const = default;
};

/// The k x k symmetric matrix of distance-dependent observation laws P_ij(y),
/// evaluated at normalized distance y in [0, r].
class DistributionFamily {
 public:
  using Payload = std::variant<BernoulliGate, GaussianShift, TablePMF>;

  /// Parameter vectors are indexed by pair_index(i, j) and must have k(k+1)/2 entries.
  /// Throws ConfigError on malformed parameters.
  DistributionFamily(int k, double r, Payload payload, std::optional<double> eta_bound = {});

  int k() const { return k_; }
  double r() const { return r_; }
  FamilyKind kind() const { return static_cast<FamilyKind>(payload_.index()); }
  const Payload& payload() const { return payload_; }
  std::optional<double> eta_bound() const { return eta_bound_; }
  bool is_discrete() const { return kind() != FamilyKind::GaussianShift; }

  std::size_t pair_count() const { return static_cast<std::size_t>(k_ * (k_ + 1) / 2); }
  std::size_t pair_index(Community i, Community j) const;
  std::size_t pair_index(CommunityPair p) const { return pair_index(p.first, p.second); }

  /// Distances at which the parameters of pair p may be discontinuous, including 0 and r.
  std::vector<double> breakpoints(CommunityPair p) const;

 private:
  int k_;
  double r_;
  Payload payload_;
  std::optional<double> eta_bound_;
};

/// Every pair shares the same law (constant-in-y helper constructors used by tests and configs).
DistributionFamily symmetric_bernoulli(double within, double across, double r, int k = 2);
DistributionFamily symmetric_gaussian(double mean_gap, double sigma, double r, int k = 2);

/// Natural log of p_ij(x; y). Throws DomainError when y is outside [0, r] or x is not
/// in the observation support.
double log_density(const DistributionFamily& fam, Community i, Community j, Observation x,
                   double y);

Observation sample_edge_weight(const DistributionFamily& fam, Community i, Community j, double y,
                               Rng& rng);

/// phi_t(P, Q; y) = sum_x p(x;y)^t q(x;y)^(1-t), the Chernoff coefficient at y.
/// Closed form for every built-in kind.
double phi_t(const DistributionFamily& fam, CommunityPair p, CommunityPair q, double t, double y);

/// phi_t by direct numerical x-integration (adaptive Simpson, relative tolerance 1e-10)
/// or explicit summation for discrete kinds. Independent route used to check phi_t.
double phi_t_numeric(const DistributionFamily& fam, CommunityPair p, CommunityPair q, double t,
                     double y);

/// Total mass of p_ij(.; y), computed from log_density. Should be 1.
double total_mass(const DistributionFamily& fam, Community i, Community j, double y);

enum class PairRelation { Equivalent, Distinct, Mixed };

std::string to_string(PairRelation relation);

/// Number of y-grid points used for almost-everywhere equality checks.
inline constexpr int kEqualityGridPoints = 1025;

/// Whether P_p(y) and P_q(y) coincide at a single y, by parameter comparison.
bool laws_equal_at(const DistributionFamily& fam, CommunityPair p, CommunityPair q, double y);

/// Grid surrogate for "equal for almost all y" / "different for almost all y".
/// Isolated equal grid points (no two adjacent) count as measure zero.
PairRelation relation(const DistributionFamily& fam, CommunityPair p, CommunityPair q);

/// Same surrogate driven by log-density comparison at tolerance 1e-9 on a (y, x) grid.
/// Kind-agnostic; used to cross-check relation().
PairRelation relation_by_log_density(const DistributionFamily& fam, CommunityPair p,
                                     CommunityPair q);

struct PairComparison {
  CommunityPair p;
  CommunityPair q;
  PairRelation relation;
};

struct ValidationReport {
  std::vector<PairComparison> comparisons;
  bool identifiable = true;         // no Mixed comparisons
  bool distinct = true;             // P_ia != P_ib whenever a != b
  bool strongly_distinct = true;    // all unordered pairs mutually distinct
  double eta_estimate = 0.0;        // grid max of log(p_ij / p_ab)
  std::optional<double> eta_declared;
  bool bounded_likelihood = true;   // estimate finite and below any declared bound

  /// Assumptions needed by the block-propagation algorithm.
  bool supports_standard() const { return identifiable && bounded_likelihood && distinct; }
  /// Assumptions needed by the segmented one-dimensional algorithm.
  bool supports_segmented() const {
    return identifiable && bounded_likelihood && strongly_distinct;
  }
};

ValidationReport validate_family(const DistributionFamily& fam);

}  // namespace ghcm
