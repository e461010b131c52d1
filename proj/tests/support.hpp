// Shared fixtures and independent brute-force oracles for the test binaries.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ghcm/distributions.hpp"
#include "ghcm/geometry.hpp"
#include "ghcm/labeling.hpp"
#include "ghcm/model.hpp"

namespace ghcm::testing {

inline ModelConfig make_config(double lambda, double n, double r, int d, std::vector<double> pi,
                               DistributionFamily family) {
  return ModelConfig{lambda, n, r, d, std::move(pi), std::move(family)};
}

inline ModelConfig symmetric_bernoulli_config(double within, double across, double lambda,
                                              double n, double r, int d) {
  return make_config(lambda, n, r, d, {0.5, 0.5}, symmetric_bernoulli(within, across, r));
}

/// O(N^2) scan over all pairs.
inline std::vector<VisiblePair> brute_force_pairs(const std::vector<TorusPoint>& points,
                                                  double L, double radius) {
  std::vector<VisiblePair> out;
  for (VertexId u = 0; u < points.size(); ++u) {
    for (VertexId v = u + 1; v < points.size(); ++v) {
      const double dist = toroidal_distance(points[u], points[v], L);
      if (dist <= radius) out.push_back({u, v, dist});
    }
  }
  return out;
}

/// Seed MAP by plain odometer enumeration over k^|seed| labelings, rescoring every
/// labeling from scratch (no incremental tables, no pruning). Strictly-greater updates
/// in lexicographic order give the lexicographically smallest maximizer.
inline std::vector<Community> brute_force_seed_map(const ObservedGraph& graph,
                                                   const std::vector<VertexId>& seed) {
  const auto& config = graph.config;
  const int k = config.k();
  const std::size_t s = seed.size();
  std::vector<Community> labels(s, 0);
  std::vector<Community> best;
  double best_score = -std::numeric_limits<double>::infinity();
  while (true) {
    double score = 0.0;
    for (std::size_t a = 0; a < s; ++a) score += std::log(config.pi[labels[a]]);
    for (std::size_t a = 0; a < s; ++a) {
      for (std::size_t b = a + 1; b < s; ++b) {
        const Neighbor* e = graph.find(seed[a], seed[b]);
        if (!e) continue;
        score += log_density(config.family, labels[a], labels[b], e->x, e->y);
      }
    }
    if (best.empty() || strictly_greater(score, best_score)) {
      best_score = score;
      best = labels;
    }
    std::size_t pos = s;
    while (pos > 0) {
      --pos;
      if (++labels[pos] < k) break;
      labels[pos] = 0;
      if (pos == 0) return best;
    }
    if (s == 0) return best;
  }
}

}  // namespace ghcm::testing
