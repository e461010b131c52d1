#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ghcm/distributions.hpp"
#include "ghcm/geometry.hpp"

namespace ghcm {

/// Parameters of GHCM(lambda, n, r, pi, P(y), d).
struct ModelConfig {
  double lambda = 1.0;
  double n = 1.0;
  double r = 1.0;
  int d = 1;
  std::vector<double> pi;
  DistributionFamily family;

  int k() const { return static_cast<int>(pi.size()); }
  double log_n() const;
  /// Torus side L = n^(1/d).
  double side() const;
  /// Raw-distance visibility radius r (log n)^(1/d).
  double visibility_radius() const;
  /// Factor (log n)^(1/d) converting raw distances into normalized ones.
  double distance_scale() const;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

/// Smallest n' >= n (up to 1e-9 relative) with r (log n')^(1/d) <= n'^(1/d) / 2.
double minimal_admissible_n(double r, int d, double n_start);

struct Neighbor {
  VertexId id;
  Observation x;
  double y;  // normalized distance

  bool operator==(const Neighbor&) const = default;
};

/// Everything an estimator may look at: locations and observations, but no labels.
struct ObservedGraph {
  ModelConfig config;
  std::vector<TorusPoint> locations;
  std::vector<std::vector<Neighbor>> adjacency;  // sorted by neighbor id

  std::size_t vertex_count() const { return locations.size(); }
  std::size_t edge_count() const;
  /// Observation between u and v, or nullptr when they are not visible to each other.
  const Neighbor* find(VertexId u, VertexId v) const;
};

struct Instance {
  ObservedGraph graph;
  std::vector<Community> true_labels;
  std::uint64_t seed = 0;

  const ModelConfig& config() const { return graph.config; }
  std::size_t vertex_count() const { return graph.vertex_count(); }
};

/// Samples locations, i.i.d. labels from pi, and one observation per visible pair.
/// Fully determined by (config, seed).
Instance sample_instance(const ModelConfig& config, std::uint64_t seed);

/// Toroidal distance between u and v divided by (log n)^(1/d).
double normalized_distance(const ObservedGraph& graph, VertexId u, VertexId v);

/// Builds an instance from explicit parts; the adjacency is derived from the locations
/// and `observe(u, v, y)` is called once per visible pair in (u, v) order.
template <class Observe>
Instance assemble_instance(const ModelConfig& config, std::vector<TorusPoint> locations,
                           std::vector<Community> labels, Observe observe);

/// Line-based text serialization (format version 1, documented in docs/FORMATS.md).
void write_instance(std::ostream& out, const Instance& instance);
Instance read_instance(std::istream& in);

inline constexpr int kInstanceFormatVersion = 1;

namespace detail {
std::vector<VisiblePair> visible_normalized_pairs(const ModelConfig& config,
                                                  std::span<const TorusPoint> locations);
void fill_adjacency(Instance& instance, std::span<const VisiblePair> pairs,
                    std::span<const Observation> observations);
}  // namespace detail

template <class Observe>
Instance assemble_instance(const ModelConfig& config, std::vector<TorusPoint> locations,
                           std::vector<Community> labels, Observe observe) {
  config.validate();
  Instance instance{ObservedGraph{config, std::move(locations), {}}, std::move(labels), 0};
  const auto pairs = detail::visible_normalized_pairs(config, instance.graph.locations);
  std::vector<Observation> xs;
  xs.reserve(pairs.size());
  for (const auto& p : pairs) xs.push_back(observe(p.u, p.v, p.distance));
  detail::fill_adjacency(instance, pairs, xs);
  return instance;
}

}  // namespace ghcm
