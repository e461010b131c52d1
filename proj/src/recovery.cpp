#include "ghcm/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/core.h>

#include "ghcm/error.hpp"
#include "ghcm/evaluation.hpp"

namespace ghcm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double chi_lhs(const ModelConfig& c, double chi0) {
  const double shrink = 1.0 - 1.5 * std::sqrt(static_cast<double>(c.d)) * std::pow(chi0, 1.0 / c.d);
  return c.lambda * std::pow(c.r, c.d) *
         (unit_ball_volume(c.d) * std::pow(shrink, c.d) - chi0);
}

bool chi0_admissible(const ModelConfig& c, double chi0) {
  if (c.d == 1) return c.lambda * c.r > 1.0 && chi0 > 0.0 && chi0 < (1.0 - 1.0 / (c.lambda * c.r)) / 2.0;
  const double shrink = 1.0 - 1.5 * std::sqrt(static_cast<double>(c.d)) * std::pow(chi0, 1.0 / c.d);
  return chi0 > 0.0 && shrink > 0.0 && chi_lhs(c, chi0) > 1.0;
}

std::size_t seed_size_for(double epsilon0, double log_n, int k, std::size_t budget,
                          std::size_t population, bool& capped) {
  auto size = static_cast<std::size_t>(std::max(1.0, std::floor(epsilon0 * log_n)));
  capped = false;
  if (k > 1 && std::pow(static_cast<double>(k), static_cast<double>(size)) > static_cast<double>(budget)) {
    size = static_cast<std::size_t>(std::max(
        1.0, std::floor(std::log(static_cast<double>(budget)) / std::log(static_cast<double>(k)))));
    capped = true;
  }
  return std::min(size, population);
}

void require_assumptions(const ObservedGraph& graph, bool segmented) {
  const auto report = validate_family(graph.config.family);
  if (!report.identifiable) {
    throw AssumptionViolation("family violates identifiability of pairwise distributions");
  }
  if (!report.bounded_likelihood) {
    throw AssumptionViolation(fmt::format(
        "family violates the bounded log-likelihood assumption (estimated eta = {})",
        report.eta_estimate));
  }
  if (segmented ? !report.strongly_distinct : !report.distinct) {
    throw AssumptionViolation(segmented ? "family violates strong distinctness"
                                        : "family violates distinctness");
  }
}

// Seeds the first block of a run, propagates through the rest in order.
struct ChainLabeler {
  const ObservedGraph& graph;
  const BlockGrid& grid;
  Labeling& sigma_hat;
  PhaseDiagnostics& diag;
  double epsilon0;
  std::size_t budget;

  // Labels `root` via seed MAP; returns the vertices of the root that remain for propagation.
  std::vector<VertexId> seed_root(std::size_t root, std::vector<VertexId>& seed_out) {
    const auto& members = grid.vertices_of_block[root];
    bool capped = false;
    const std::size_t s = seed_size_for(epsilon0, graph.config.log_n(), graph.config.k(), budget,
                                        members.size(), capped);
    diag.seed_capped = diag.seed_capped || capped;
    seed_out.assign(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(s));
    const Labeling seeded = seed_map_labeling(graph, seed_out, budget);
    for (VertexId v : seed_out) sigma_hat[v] = seeded[v];
    diag.seed_size += s;
    diag.seed_vertices.insert(diag.seed_vertices.end(), seed_out.begin(), seed_out.end());
    std::vector<VertexId> rest(members.begin() + static_cast<std::ptrdiff_t>(s), members.end());
    if (!rest.empty()) propagate_into(seed_out, rest);
    return rest.empty() ? seed_out : rest;
  }

  void propagate_into(std::span<const VertexId> parent, std::span<const VertexId> child) {
    const bool any_labeled = std::any_of(parent.begin(), parent.end(),
                                         [&](VertexId u) { return sigma_hat[u] != kUnlabeled; });
    if (!any_labeled) return;
    const auto labels = propagate_block(graph, parent, sigma_hat, child);
    for (std::size_t i = 0; i < child.size(); ++i) sigma_hat[child[i]] = labels[i];
  }
};

// Starting scores for likelihood argmaxes: communities outside the prior's support
// can never be the truth, so they start at -inf; the rest start at zero.
std::vector<double> support_floor(std::span<const double> pi) {
  std::vector<double> out(pi.size(), 0.0);
  for (std::size_t c = 0; c < pi.size(); ++c) {
    if (pi[c] == 0.0) out[c] = kNegInf;
  }
  return out;
}

void record_grid(PhaseDiagnostics& diag, const BlockGrid& grid) {
  diag.chi_effective = grid.chi_effective;
  diag.delta = grid.delta;
  diag.blocks_per_axis = grid.blocks_per_axis;
  diag.block_count = grid.block_count();
  diag.occupied_blocks = grid.occupied_count();
  diag.block_of_vertex = grid.block_of_vertex;
}

}  // namespace

double default_delta(const ModelConfig& config, double chi) {
  return std::min(0.05, config.lambda * std::pow(config.r, config.d) * chi *
                            unit_ball_volume(config.d) / 8.0);
}

ChiDelta choose_chi_delta(const ModelConfig& config) {
  ChiDelta out;
  if (config.d == 1) {
    const double lr = config.lambda * config.r;
    if (lr <= 1.0) {
      throw ConfigError(fmt::format(
          "block propagation needs lambda r > 1 in one dimension (lambda r = {}); use the "
          "segmented_1d algorithm",
          lr));
    }
    out.chi0 = 0.9 * (1.0 - 1.0 / lr) / 2.0;
  } else {
    const double c = 1.5 * std::sqrt(static_cast<double>(config.d));
    double lo = 0.0;
    double hi = std::pow(1.0 / c, config.d);
    if (!(chi_lhs(config, 0.0) > 1.0)) {
      throw ConfigError(fmt::format(
          "no block size satisfies the connectivity condition: lambda nu_d r^d = {} <= 1",
          chi_lhs(config, 0.0)));
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (chi_lhs(config, mid) > 1.0 ? lo : hi) = mid;
    }
    out.chi0 = 0.9 * lo;
    if (!chi0_admissible(config, out.chi0)) {
      throw ConfigError("no block size satisfies the connectivity condition (capacity too close to "
                        "the geometric connectivity limit)");
    }
  }
  out.chi = 0.75 * out.chi0;
  out.delta = default_delta(config, out.chi);
  return out;
}

std::size_t BlockGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

std::vector<std::size_t> BlockGrid::coordinates(std::size_t block) const {
  std::vector<std::size_t> out(static_cast<std::size_t>(dim));
  for (auto& c : out) {
    c = block % blocks_per_axis;
    block /= blocks_per_axis;
  }
  return out;
}

BlockGrid partition_blocks_with_count(const ObservedGraph& graph, std::size_t m, double delta) {
  const auto& config = graph.config;
  if (!(delta > 0.0)) throw ContractViolation("partition_blocks: delta must be > 0");
  double total = std::pow(static_cast<double>(m), config.d);
  if (m < 1 || total < 2.0) {
    throw ConfigError(fmt::format("instance too small: {} block(s) per axis gives fewer than two blocks", m));
  }
  if (total > 5e8) throw ConfigError("partition_blocks: block count exceeds memory budget");
  BlockGrid grid;
  grid.dim = config.d;
  grid.blocks_per_axis = m;
  grid.block_side = config.side() / static_cast<double>(m);
  grid.chi_effective = config.n / (total * std::pow(config.r, config.d) * config.log_n());
  grid.delta = delta;
  grid.occupancy_threshold = delta * config.log_n();
  grid.vertices_of_block.resize(static_cast<std::size_t>(total));
  grid.block_of_vertex.resize(graph.vertex_count());
  const double half = config.side() / 2.0;
  for (VertexId v = 0; v < graph.vertex_count(); ++v) {
    std::size_t index = 0;
    std::size_t stride = 1;
    for (int a = 0; a < config.d; ++a) {
      const double x = graph.locations[v].coords[static_cast<std::size_t>(a)] + half;
      auto c = static_cast<std::ptrdiff_t>(std::floor(x / grid.block_side));
      c = std::clamp<std::ptrdiff_t>(c, 0, static_cast<std::ptrdiff_t>(m) - 1);
      index += static_cast<std::size_t>(c) * stride;
      stride *= m;
    }
    grid.block_of_vertex[v] = index;
    grid.vertices_of_block[index].push_back(v);
  }
  grid.occupied.resize(grid.vertices_of_block.size());
  for (std::size_t b = 0; b < grid.block_count(); ++b) {
    grid.occupied[b] =
        static_cast<double>(grid.vertices_of_block[b].size()) >= grid.occupancy_threshold ? 1 : 0;
  }
  return grid;
}

BlockGrid partition_blocks(const ObservedGraph& graph, double chi, double delta) {
  const auto& config = graph.config;
  if (!(chi > 0.0)) throw ContractViolation("partition_blocks: chi must be > 0");
  const double target = config.n / (std::pow(config.r, config.d) * chi * config.log_n());
  const auto m = static_cast<std::size_t>(std::max(1.0, std::round(std::pow(target, 1.0 / config.d))));
  return partition_blocks_with_count(graph, m, delta);
}

double block_sup_distance(const BlockGrid& grid, std::size_t a, std::size_t b) {
  const auto ca = grid.coordinates(a);
  const auto cb = grid.coordinates(b);
  const double L = grid.block_side * static_cast<double>(grid.blocks_per_axis);
  double sq = 0.0;
  for (std::size_t ax = 0; ax < ca.size(); ++ax) {
    const std::size_t diff = ca[ax] > cb[ax] ? ca[ax] - cb[ax] : cb[ax] - ca[ax];
    const std::size_t o = std::min(diff, grid.blocks_per_axis - diff);
    const double axis = std::min(static_cast<double>(o + 1) * grid.block_side, L / 2.0);
    sq += axis * axis;
  }
  return std::sqrt(sq);
}

std::size_t VisibilityGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& n : neighbors) total += n.size();
  return total / 2;
}

VisibilityGraph build_visibility_graph(const BlockGrid& grid, const ObservedGraph& graph) {
  VisibilityGraph h;
  for (std::size_t b = 0; b < grid.block_count(); ++b) {
    if (grid.occupied[b]) h.nodes.push_back(b);
  }
  if (h.nodes.empty()) throw ConfigError("visibility graph: no occupied blocks");
  const double radius = graph.config.visibility_radius();
  const std::size_t m = grid.blocks_per_axis;
  const int d = grid.dim;

  // Offsets whose worst-case point distance is within the radius; this depends only on
  // the per-axis wrapped offsets, so the list is shared by every block.
  const auto reach = static_cast<std::ptrdiff_t>(
      std::min<double>(static_cast<double>(m / 2), std::ceil(radius / grid.block_side)));
  const double L = grid.block_side * static_cast<double>(m);
  std::vector<std::vector<std::ptrdiff_t>> visible_offsets;
  std::vector<std::ptrdiff_t> offset(static_cast<std::size_t>(d), -reach);
  while (true) {
    double sq = 0.0;
    bool self = true;
    for (std::ptrdiff_t o : offset) {
      const auto mag = static_cast<std::size_t>(o < 0 ? -o : o) % m;
      const std::size_t wrapped = std::min(mag, m - mag);
      if (wrapped != 0) self = false;
      const double axis = std::min(static_cast<double>(wrapped + 1) * grid.block_side, L / 2.0);
      sq += axis * axis;
    }
    if (!self && std::sqrt(sq) <= radius) visible_offsets.push_back(offset);
    int a = 0;
    while (a < d && offset[static_cast<std::size_t>(a)] == reach) {
      offset[static_cast<std::size_t>(a)] = -reach;
      ++a;
    }
    if (a == d) break;
    ++offset[static_cast<std::size_t>(a)];
  }

  std::vector<std::size_t> position(grid.block_count(), kNoParent);
  for (std::size_t i = 0; i < h.nodes.size(); ++i) position[h.nodes[i]] = i;
  h.neighbors.resize(h.nodes.size());
  const auto mm = static_cast<std::ptrdiff_t>(m);
  for (std::size_t i = 0; i < h.nodes.size(); ++i) {
    const std::size_t block = h.nodes[i];
    const auto base = grid.coordinates(block);
    auto& found = h.neighbors[i];
    for (const auto& off : visible_offsets) {
      std::size_t index = 0;
      std::size_t stride = 1;
      for (std::size_t a = 0; a < base.size(); ++a) {
        const std::ptrdiff_t c = ((static_cast<std::ptrdiff_t>(base[a]) + off[a]) % mm + mm) % mm;
        index += static_cast<std::size_t>(c) * stride;
        stride *= m;
      }
      if (index != block && grid.occupied[index]) found.push_back(index);
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
  }

  h.parent.assign(grid.block_count(), kNoParent);
  std::vector<char> seen(grid.block_count(), 0);
  std::deque<std::size_t> queue{h.nodes.front()};
  seen[h.nodes.front()] = 1;
  while (!queue.empty()) {
    const std::size_t block = queue.front();
    queue.pop_front();
    h.bfs_order.push_back(block);
    for (std::size_t next : h.neighbors[position[block]]) {
      if (seen[next]) continue;
      seen[next] = 1;
      h.parent[next] = block;
      queue.push_back(next);
    }
  }
  h.connected = h.bfs_order.size() == h.nodes.size();
  return h;
}

Labeling seed_map_labeling(const ObservedGraph& graph, std::span<const VertexId> seed,
                           std::size_t budget) {
  if (seed.empty()) throw ContractViolation("seed_map_labeling: empty seed");
  const int k = graph.config.k();
  const std::size_t s = seed.size();
  if (std::pow(static_cast<double>(k), static_cast<double>(s)) > static_cast<double>(budget)) {
    throw ConfigError(fmt::format("seed MAP: {}^{} labelings exceed the budget {}", k, s, budget));
  }
  const auto& fam = graph.config.family;
  const auto uk = static_cast<std::size_t>(k);
  std::vector<double> log_prior(uk);
  for (std::size_t c = 0; c < uk; ++c) log_prior[c] = std::log(graph.config.pi[c]);

  // pair_terms[a][b] holds log p(c_a, c_b) for b < a as a k x k table, or is empty.
  std::vector<std::vector<std::vector<double>>> pair_terms(s, std::vector<std::vector<double>>(s));
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      const Neighbor* nb = graph.find(seed[a], seed[b]);
      if (!nb) continue;
      auto& table = pair_terms[a][b];
      table.resize(uk * uk);
      for (Community ca = 0; ca < k; ++ca) {
        for (Community cb = 0; cb < k; ++cb) {
          table[static_cast<std::size_t>(ca) * uk + static_cast<std::size_t>(cb)] =
              log_density(fam, ca, cb, nb->x, nb->y);
        }
      }
    }
  }

  std::vector<Community> current(s, 0);
  std::vector<double> partial(s + 1, 0.0);
  std::vector<Community> best;
  double best_score = kNegInf;
  // Depth-first in lexicographic order; partial[a] is the score of positions < a.
  std::size_t depth = 0;
  current[0] = -1;
  while (true) {
    ++current[depth];
    if (current[depth] == k) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    const auto c = static_cast<std::size_t>(current[depth]);
    double score = partial[depth] + log_prior[c];
    for (std::size_t b = 0; b < depth; ++b) {
      const auto& table = pair_terms[depth][b];
      if (!table.empty()) score += table[c * uk + static_cast<std::size_t>(current[b])];
    }
    partial[depth + 1] = score;
    if (depth + 1 == s) {
      if (best.empty() || strictly_greater(score, best_score)) {
        best = current;
        best_score = score;
      }
    } else {
      ++depth;
      current[depth] = -1;
    }
  }
  Labeling out(graph.vertex_count());
  for (std::size_t a = 0; a < s; ++a) out[seed[a]] = best[a];
  return out;
}

std::vector<Community> propagate_block(const ObservedGraph& graph,
                                       std::span<const VertexId> parent,
                                       const Labeling& sigma_hat,
                                       std::span<const VertexId> child) {
  const int k = graph.config.k();
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (VertexId u : parent) {
    if (sigma_hat[u] != kUnlabeled) ++counts[static_cast<std::size_t>(sigma_hat[u])];
  }
  if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; })) {
    throw ContractViolation("propagate_block: parent block has no labelled vertices");
  }
  const auto reference = static_cast<Community>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  std::vector<VertexId> refs;
  for (VertexId u : parent) {
    if (sigma_hat[u] == reference) refs.push_back(u);
  }

  const auto& fam = graph.config.family;
  std::vector<Community> out(child.size(), kUnlabeled);
  const std::vector<double> baseline = support_floor(graph.config.pi);
  std::vector<double> scores(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < child.size(); ++i) {
    scores = baseline;
    bool any = false;
    for (VertexId u : refs) {
      const Neighbor* nb = graph.find(child[i], u);
      if (!nb) continue;
      any = true;
      for (Community j = 0; j < k; ++j) {
        scores[static_cast<std::size_t>(j)] += log_density(fam, reference, j, nb->x, nb->y);
      }
    }
    if (any) out[i] = argmax_smallest(scores);
  }
  return out;
}

Labeling prior_argmax_labeling(const ObservedGraph& graph) {
  return Labeling(graph.vertex_count(), argmax_smallest(graph.config.pi));
}

Labeling refine_all(const ObservedGraph& graph, const Labeling& sigma_hat, bool include_prior) {
  const int k = graph.config.k();
  const auto& fam = graph.config.family;
  const Community fallback = argmax_smallest(graph.config.pi);
  std::vector<double> log_prior(static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < log_prior.size(); ++c) log_prior[c] = std::log(graph.config.pi[c]);

  const std::vector<double> baseline = support_floor(graph.config.pi);
  Labeling out(graph.vertex_count());
  std::vector<double> scores(static_cast<std::size_t>(k));
  for (VertexId v = 0; v < graph.vertex_count(); ++v) {
    if (include_prior) {
      scores = log_prior;
    } else {
      scores = baseline;
    }
    bool any = false;
    for (const auto& nb : graph.adjacency[v]) {
      const Community c = sigma_hat[nb.id];
      if (c == kUnlabeled) continue;
      any = true;
      for (Community j = 0; j < k; ++j) {
        scores[static_cast<std::size_t>(j)] += log_density(fam, j, c, nb.x, nb.y);
      }
    }
    out[v] = any ? argmax_smallest(scores) : fallback;
  }
  return out;
}

RecoveryResult recover(const ObservedGraph& graph, const RecoveryOptions& options) {
  const auto& config = graph.config;
  config.validate();
  require_assumptions(graph, false);

  RecoveryResult result;
  auto& diag = result.diagnostics;
  ChiDelta params;
  if (options.chi) {
    params.chi = *options.chi;
    params.chi0 = *options.chi;
    params.delta = default_delta(config, params.chi);
  } else {
    params = choose_chi_delta(config);
  }
  if (options.delta) params.delta = *options.delta;
  diag.chi0 = params.chi0;
  diag.chi = params.chi;

  const BlockGrid grid = partition_blocks(graph, params.chi, params.delta);
  record_grid(diag, grid);
  if (!options.chi && !(grid.chi_effective > params.chi0 / 2.0 && grid.chi_effective < params.chi0)) {
    throw ConfigError(fmt::format(
        "rounded block count gives chi_effective = {} outside ({}, {}); increase n",
        grid.chi_effective, params.chi0 / 2.0, params.chi0));
  }

  const VisibilityGraph h = build_visibility_graph(grid, graph);
  diag.connected = h.connected;
  diag.segments = h.connected ? 1 : 0;
  if (!h.connected) {
    result.failed = true;
    result.failure = "FAIL";
    return result;
  }

  Labeling sigma_hat(graph.vertex_count());
  const double epsilon0 =
      std::min(1.0 / (2.0 * std::log(static_cast<double>(config.k()))), params.delta);
  ChainLabeler chain{graph, grid, sigma_hat, diag, epsilon0, options.seed_budget};

  const std::size_t root = h.bfs_order.front();
  std::vector<VertexId> seed;
  const std::vector<VertexId> root_rest = chain.seed_root(root, seed);
  for (std::size_t idx = 1; idx < h.bfs_order.size(); ++idx) {
    const std::size_t block = h.bfs_order[idx];
    const std::size_t par = h.parent[block];
    const auto& parent_vertices = par == root ? root_rest : grid.vertices_of_block[par];
    chain.propagate_into(parent_vertices, grid.vertices_of_block[block]);
  }

  diag.phase_one = sigma_hat;
  result.labeling = refine_all(graph, sigma_hat, options.refine_with_prior);
  return result;
}

RecoveryResult recover_1d_segments(const ObservedGraph& graph, const RecoveryOptions& options) {
  const auto& config = graph.config;
  config.validate();
  if (config.d != 1) throw ConfigError("segmented recovery requires d = 1");
  require_assumptions(graph, true);
  const std::size_t omega = permissible_relabelings(config.pi, config.family).size();
  if (omega > 1) {
    throw AssumptionViolation(fmt::format(
        "segmented recovery requires a trivial permissible group, found {} relabelings", omega));
  }

  RecoveryResult result;
  auto& diag = result.diagnostics;
  const double half_radius = config.visibility_radius() / 2.0;
  // Round up so adjacent blocks stay mutually visible.
  const auto m = static_cast<std::size_t>(std::ceil(config.side() / half_radius - 1e-9));
  diag.chi = options.chi.value_or(0.5);
  diag.chi0 = diag.chi;
  const double delta =
      options.delta.value_or(std::min(0.05, config.lambda * config.r / 8.0));
  const BlockGrid grid = partition_blocks_with_count(graph, m, delta);
  record_grid(diag, grid);

  // Maximal circular runs of occupied blocks.
  std::vector<std::vector<std::size_t>> segments;
  const std::size_t nb = grid.block_count();
  std::size_t start = 0;
  bool all_occupied = true;
  for (std::size_t b = 0; b < nb; ++b) {
    if (!grid.occupied[b]) {
      start = (b + 1) % nb;
      all_occupied = false;
      break;
    }
  }
  if (all_occupied) {
    segments.emplace_back();
    for (std::size_t b = 0; b < nb; ++b) segments.back().push_back(b);
  } else {
    std::vector<std::size_t> run;
    for (std::size_t step = 0; step < nb; ++step) {
      const std::size_t b = (start + step) % nb;
      if (grid.occupied[b]) {
        run.push_back(b);
      } else if (!run.empty()) {
        segments.push_back(std::move(run));
        run.clear();
      }
    }
    if (!run.empty()) segments.push_back(std::move(run));
  }
  if (segments.empty()) throw ConfigError("segmented recovery: no occupied blocks");
  std::sort(segments.begin(), segments.end());
  diag.segments = segments.size();
  diag.connected = segments.size() == 1;

  Labeling sigma_hat(graph.vertex_count());
  const double epsilon0 = std::min(
      config.lambda * config.r / (4.0 * std::log(static_cast<double>(config.k()))), delta);
  ChainLabeler chain{graph, grid, sigma_hat, diag, epsilon0, options.seed_budget};
  for (const auto& segment : segments) {
    std::vector<VertexId> seed;
    std::vector<VertexId> previous = chain.seed_root(segment.front(), seed);
    for (std::size_t i = 1; i < segment.size(); ++i) {
      const auto& members = grid.vertices_of_block[segment[i]];
      chain.propagate_into(previous, members);
      previous = members;
    }
  }

  diag.phase_one = sigma_hat;
  result.labeling = refine_all(graph, sigma_hat, options.refine_with_prior);
  return result;
}

}  // namespace ghcm
