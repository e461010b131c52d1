#include "ghcm/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "ghcm/config.hpp"
#include "ghcm/error.hpp"

namespace ghcm {

namespace {

bool radius_fits(double r, int d, double n) {
  return n > 1.0 && r * std::pow(std::log(n), 1.0 / d) <= torus_side(n, d) / 2.0;
}

}  // namespace

double ModelConfig::log_n() const { return std::log(n); }
double ModelConfig::side() const { return torus_side(n, d); }
double ModelConfig::distance_scale() const { return std::pow(log_n(), 1.0 / d); }
double ModelConfig::visibility_radius() const { return r * distance_scale(); }

void ModelConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("model: lambda must be > 0");
  if (!(n > 1.0) || !std::isfinite(n)) throw ConfigError("model: n must be > 1 (log n > 0)");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("model: r must be > 0");
  if (d < 1) throw ConfigError("model: d must be >= 1");
  if (pi.size() < 2) throw ConfigError("model: need k >= 2 communities");
  double sum = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0)) throw ConfigError("model: prior entries must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ConfigError(fmt::format("model: prior sums to {} instead of 1", sum));
  }
  if (family.k() != k()) {
    throw ConfigError(fmt::format("model: family has k={} but prior has {} entries", family.k(), k()));
  }
  if (std::abs(family.r() - r) > 1e-12 * r) {
    throw ConfigError("model: family support radius differs from model r");
  }
  if (!radius_fits(r, d, n)) {
    throw ConfigError(fmt::format(
        "model: visibility radius r(log n)^(1/d) = {} exceeds half the torus side {}; "
        "the smallest admissible n is {}",
        visibility_radius(), side() / 2.0, minimal_admissible_n(r, d, n)));
  }
}

double minimal_admissible_n(double r, int d, double n_start) {
  double lo = std::max(n_start, 1.0 + 1e-9);
  if (radius_fits(r, d, lo)) return lo;
  double hi = lo * 2.0;
  while (!radius_fits(r, d, hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (radius_fits(r, d, mid) ? hi : lo) = mid;
  }
  return hi;
}

std::size_t ObservedGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nbrs : adjacency) total += nbrs.size();
  return total / 2;
}

const Neighbor* ObservedGraph::find(VertexId u, VertexId v) const {
  const auto& nbrs = adjacency[u];
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                             [](const Neighbor& nb, VertexId id) { return nb.id < id; });
  return it != nbrs.end() && it->id == v ? &*it : nullptr;
}

namespace detail {

std::vector<VisiblePair> visible_normalized_pairs(const ModelConfig& config,
                                                  std::span<const TorusPoint> locations) {
  const double radius = config.visibility_radius();
  const auto grid = SpatialGrid::build(locations, config.side(), radius);
  auto pairs = visible_pairs(locations, radius, grid);
  const double scale = config.distance_scale();
  for (auto& p : pairs) p.distance = std::min(p.distance / scale, config.r);
  return pairs;
}

void fill_adjacency(Instance& instance, std::span<const VisiblePair> pairs,
                    std::span<const Observation> observations) {
  auto& adj = instance.graph.adjacency;
  adj.assign(instance.graph.vertex_count(), {});
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    const auto& p = pairs[e];
    adj[p.u].push_back({p.v, observations[e], p.distance});
    adj[p.v].push_back({p.u, observations[e], p.distance});
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  }
}

}  // namespace detail

Instance sample_instance(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  auto locations = sample_poisson_points(config.lambda, config.n, config.d, rng);
  std::discrete_distribution<Community> prior(config.pi.begin(), config.pi.end());
  std::vector<Community> labels(locations.size());
  for (auto& l : labels) l = prior(rng);
  const auto pairs = detail::visible_normalized_pairs(config, locations);
  std::vector<Observation> xs(pairs.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    xs[e] = sample_edge_weight(config.family, labels[pairs[e].u], labels[pairs[e].v],
                               pairs[e].distance, rng);
  }
  Instance instance{ObservedGraph{config, std::move(locations), {}}, std::move(labels), seed};
  detail::fill_adjacency(instance, pairs, xs);
  instance.seed = seed;
  return instance;
}

double normalized_distance(const ObservedGraph& graph, VertexId u, VertexId v) {
  return toroidal_distance(graph.locations[u], graph.locations[v], graph.config.side()) /
         graph.config.distance_scale();
}

void write_instance(std::ostream& out, const Instance& instance) {
  ConfigTree tree;
  model_config_to_tree(instance.config(), tree);
  const std::string config_text = write_config_tree(tree);
  const auto config_lines = std::count(config_text.begin(), config_text.end(), '\n');
  out << "ghcm-instance " << kInstanceFormatVersion << '\n';
  out << "seed " << instance.seed << '\n';
  out << "config " << config_lines << '\n' << config_text;
  out << "vertices " << instance.vertex_count() << '\n';
  for (std::size_t v = 0; v < instance.vertex_count(); ++v) {
    out << v << ' ' << instance.true_labels[v];
    for (double c : instance.graph.locations[v].coords) out << ' ' << format_real(c);
    out << '\n';
  }
  out << "edges " << instance.graph.edge_count() << '\n';
  for (VertexId u = 0; u < instance.vertex_count(); ++u) {
    for (const auto& nb : instance.graph.adjacency[u]) {
      if (nb.id <= u) continue;
      out << u << ' ' << nb.id << ' ' << format_real(nb.x) << ' ' << format_real(nb.y) << '\n';
    }
  }
  out << "end\n";
}

Instance read_instance(std::istream& in) {
  auto expect = [&](const std::string& word) {
    std::string token;
    if (!(in >> token) || token != word) {
      throw ConfigError("instance: expected '" + word + "', found '" + token + "'");
    }
  };
  expect("ghcm-instance");
  int version = 0;
  in >> version;
  if (version != kInstanceFormatVersion) {
    throw ConfigError(fmt::format("instance: unsupported format version {}", version));
  }
  std::uint64_t seed = 0;
  expect("seed");
  in >> seed;
  std::size_t config_lines = 0;
  expect("config");
  in >> config_lines;
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  std::string config_text;
  for (std::size_t i = 0; i < config_lines; ++i) {
    std::string line;
    std::getline(in, line);
    config_text += line + '\n';
  }
  std::istringstream config_stream(config_text);
  const ModelConfig config = model_config_from_tree(read_config_tree(config_stream));

  std::size_t n_vertices = 0;
  expect("vertices");
  in >> n_vertices;
  std::vector<TorusPoint> locations(n_vertices);
  std::vector<Community> labels(n_vertices);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    std::size_t id = 0;
    in >> id >> labels[v];
    if (id != v) throw ConfigError("instance: vertex ids must be consecutive");
    locations[v].coords.resize(static_cast<std::size_t>(config.d));
    for (auto& c : locations[v].coords) in >> c;
  }
  std::size_t n_edges = 0;
  expect("edges");
  in >> n_edges;
  std::vector<VisiblePair> pairs(n_edges);
  std::vector<Observation> xs(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) in >> pairs[e].u >> pairs[e].v >> xs[e] >> pairs[e].distance;
  expect("end");
  if (!in) throw ConfigError("instance: truncated or malformed body");
  Instance instance{ObservedGraph{config, std::move(locations), {}}, std::move(labels), seed};
  detail::fill_adjacency(instance, pairs, xs);
  return instance;
}

}  // namespace ghcm
