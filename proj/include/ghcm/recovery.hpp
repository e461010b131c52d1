#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ghcm/labeling.hpp"
#include "ghcm/model.hpp"

namespace ghcm {

struct ChiDelta {
  double chi = 0.0;
  double delta = 0.0;
  double chi0 = 0.0;
};

/// delta = min(0.05, lambda r^d chi nu_d / 8).
double default_delta(const ModelConfig& config, double chi);

/// Block-size and occupancy parameters. d >= 2: chi0 is 0.9 times the largest value
/// with lambda r^d (nu_d (1 - 1.5 sqrt(d) chi0^(1/d))^d - chi0) > 1 and
/// 1 - 1.5 sqrt(d) chi0^(1/d) > 0; d = 1: chi0 = 0.9 (1 - 1/(lambda r)) / 2.
/// In both cases chi = 0.75 chi0.
ChiDelta choose_chi_delta(const ModelConfig& config);

/// Partition of the torus into m^d congruent cubic blocks.
/// Block index = sum_a c_a m^a for per-axis cell coordinates c_a.
struct BlockGrid {
  int dim = 1;
  std::size_t blocks_per_axis = 1;
  double block_side = 0.0;
  double chi_effective = 0.0;
  double delta = 0.0;
  double occupancy_threshold = 0.0;  // delta log n
  std::vector<std::vector<VertexId>> vertices_of_block;  // ascending ids
  std::vector<std::size_t> block_of_vertex;
  std::vector<char> occupied;

  std::size_t block_count() const { return vertices_of_block.size(); }
  std::size_t occupied_count() const;
  std::vector<std::size_t> coordinates(std::size_t block) const;
};

/// m = max(1, round((n / (r^d chi log n))^(1/d))) blocks per axis.
/// Half-open [lo, hi) cells per axis. Throws ConfigError when m^d < 2.
BlockGrid partition_blocks(const ObservedGraph& graph, double chi, double delta);

/// Same partition with an explicit number of blocks per axis.
BlockGrid partition_blocks_with_count(const ObservedGraph& graph, std::size_t blocks_per_axis,
                                      double delta);

/// Sup over points of the two blocks of their toroidal distance (blocks are closed boxes).
double block_sup_distance(const BlockGrid& grid, std::size_t a, std::size_t b);

inline constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

/// Graph on occupied blocks; edges join mutually visible blocks.
struct VisibilityGraph {
  std::vector<std::size_t> nodes;                         // occupied block ids, ascending
  std::vector<std::vector<std::size_t>> neighbors;        // per node position, block ids ascending
  std::vector<std::size_t> bfs_order;                     // block ids
  std::vector<std::size_t> parent;                        // per block id; kNoParent for the root
  bool connected = false;

  std::size_t edge_count() const;
};

/// BFS from the lowest-indexed occupied block, visiting neighbours in ascending order.
/// `connected` is false when some occupied block is unreachable. Throws ConfigError
/// when no block is occupied.
VisibilityGraph build_visibility_graph(const BlockGrid& grid, const ObservedGraph& graph);

inline constexpr std::size_t kDefaultSeedBudget = 1'000'000;

/// Exhaustive maximizer of sum_u log pi_{sigma(u)} + sum_{u<v visible} log pbar_{sigma(u)sigma(v)}
/// over labelings of the seed. Ties go to the lexicographically smallest label vector.
/// Returns a labeling over all vertices that is Unlabeled off the seed.
Labeling seed_map_labeling(const ObservedGraph& graph, std::span<const VertexId> seed,
                           std::size_t budget = kDefaultSeedBudget);

/// Labels `child` against the parent's largest estimated community i*:
/// argmax_j sum_{u in parent, sigma(u) = i*, u visible to v} log pbar_{i* j}(x_uv; y_uv).
/// Children without visible references stay Unlabeled. Result is aligned with `child`.
std::vector<Community> propagate_block(const ObservedGraph& graph,
                                       std::span<const VertexId> parent,
                                       const Labeling& sigma_hat,
                                       std::span<const VertexId> child);

/// Genie-style relabeling of every vertex against sigma_hat, skipping Unlabeled
/// neighbours; vertices without labelled neighbours take the prior argmax.
Labeling refine_all(const ObservedGraph& graph, const Labeling& sigma_hat,
                    bool include_prior = false);

/// Labeling that assigns argmax_j pi_j to every vertex.
Labeling prior_argmax_labeling(const ObservedGraph& graph);

struct RecoveryOptions {
  std::optional<double> chi;    // overrides the chi choice (and skips the band check)
  std::optional<double> delta;  // overrides the default occupancy fraction
  std::size_t seed_budget = kDefaultSeedBudget;
  bool refine_with_prior = false;
};

struct PhaseDiagnostics {
  bool connected = false;
  double chi0 = 0.0;
  double chi = 0.0;
  double chi_effective = 0.0;
  double delta = 0.0;
  std::size_t blocks_per_axis = 0;
  std::size_t block_count = 0;
  std::size_t occupied_blocks = 0;
  std::size_t segments = 0;
  std::size_t seed_size = 0;
  bool seed_capped = false;
  std::vector<VertexId> seed_vertices;
  std::vector<std::size_t> block_of_vertex;
  Labeling phase_one;  // sigma_hat before refinement
};

struct RecoveryResult {
  bool failed = false;
  std::string failure;  // "FAIL" when the visibility graph is disconnected
  Labeling labeling;    // empty when failed
  PhaseDiagnostics diagnostics;
};

/// Block partition, seed MAP, BFS propagation, then refinement.
/// Requires Assumptions 1-3 on the family (AssumptionViolation otherwise).
RecoveryResult recover(const ObservedGraph& graph, const RecoveryOptions& options = {});

/// One-dimensional variant: blocks of length at most r log n / 2, each maximal run of
/// occupied blocks seeded and propagated independently. Requires d = 1, strong
/// distinctness and a trivial permissible group.
RecoveryResult recover_1d_segments(const ObservedGraph& graph, const RecoveryOptions& options = {});

}  // namespace ghcm
