#pragma once

#include <span>
#include <vector>

#include "ghcm/labeling.hpp"
#include "ghcm/model.hpp"
#include "ghcm/recovery.hpp"

namespace ghcm {

/// A permutation of communities: omega[i] is the image of i.
using Relabeling = std::vector<Community>;

/// Omega_{pi,P}: the community permutations preserving the prior and every pairwise law.
struct PermissibleSet {
  std::vector<Relabeling> permutations;  // identity first

  std::size_t size() const { return permutations.size(); }
  bool contains(const Relabeling& omega) const;
  /// Identity present, closed under composition and inverse.
  bool is_group() const;
};

inline constexpr int kMaxPermutationCommunities = 10;

/// Enumerates all k! permutations (k <= 10) and keeps the permissible ones.
PermissibleSet permissible_relabelings(std::span<const double> pi, const DistributionFamily& fam);

/// (omega o sigma)(u) = omega[sigma(u)]; Unlabeled entries stay Unlabeled.
std::vector<Community> relabel(std::span<const Community> sigma, const Relabeling& omega);

/// Fraction of vertices labelled correctly, maximized over permissible relabelings of the truth.
double agreement(const Labeling& estimate, std::span<const Community> truth,
                 const PermissibleSet& omega_set);

/// Minimum Hamming distance between estimate and a permissible relabeling of the truth.
std::size_t discrepancy(const Labeling& estimate, std::span<const Community> truth,
                        const PermissibleSet& omega_set);

/// Relabeling of the truth that best matches `estimate` on its labelled entries
/// (first in enumeration order on ties).
const Relabeling& best_alignment(const Labeling& estimate, std::span<const Community> truth,
                                 const PermissibleSet& omega_set);

/// l_i(v, sigma) = sum over visible u of log pbar_{i, sigma(u)}(x_uv; y_uv), skipping
/// Unlabeled neighbours; adds log pi_i when `include_prior` is set.
double genie_loglik(const ObservedGraph& graph, VertexId v, Community i, const Labeling& sigma,
                    bool include_prior);

/// Vertices v for which some j != sigma*(v) has l_j(v, sigma*) >= l_{sigma*(v)}(v, sigma*).
std::vector<VertexId> flip_bad_vertices(const Instance& instance, bool include_prior = false);

/// Labelings of the seed whose community counts lie strictly inside
/// ((pi_j - eps)|S|, (pi_j + eps)|S|) for every j.
bool in_balanced_set(std::span<const Community> seed_labels, std::span<const double> pi,
                     double epsilon);

inline constexpr std::size_t kMaxRestrictedMleSeed = 12;

/// Exhaustive argmax of the within-seed pairwise log-likelihood over the balanced set
/// (no prior term). The returned labeling is total on the seed and Unlabeled elsewhere.
Labeling restricted_mle_oracle(const ObservedGraph& graph, std::span<const VertexId> seed,
                               double epsilon);

/// Ground-truth diagnostics for a finished recovery, computed after the fact so the
/// estimator itself never sees the labels.
struct PhaseMistakes {
  std::size_t seed_mistakes = 0;       // min over Omega of seed-set errors
  std::size_t max_block_mistakes = 0;  // worst block of the phase-one labeling
  std::size_t refine_changes = 0;      // labelled vertices whose estimate refine changed
};

PhaseMistakes phase_mistakes(const Instance& instance, const RecoveryResult& result,
                             const PermissibleSet& omega_set);

}  // namespace ghcm
