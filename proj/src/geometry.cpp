#include "ghcm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ghcm/error.hpp"

namespace ghcm {

double torus_side(double n, int d) { return std::pow(n, 1.0 / d); }

double unit_ball_volume(int d) {
  const double half = 0.5 * d;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double toroidal_distance(const TorusPoint& a, const TorusPoint& b, double L) {
  if (a.dim() != b.dim()) {
    throw ContractViolation("toroidal_distance: dimension mismatch (" + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()) + ")");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double diff = std::abs(a.coords[i] - b.coords[i]);
    const double wrapped = std::min(diff, L - diff);
    sq += wrapped * wrapped;
  }
  return std::sqrt(sq);
}

std::vector<TorusPoint> sample_poisson_points(double lambda, double n, int d, Rng& rng) {
  if (!(lambda > 0.0) || !(n > 0.0) || !std::isfinite(lambda) || !std::isfinite(n) || d < 1) {
    throw ConfigError("sample_poisson_points: lambda and n must be finite and positive, d >= 1");
  }
  const double mean = lambda * n;
  // std::poisson_distribution<int64_t> loses accuracy and may overflow far above this.
  if (mean > 1e15) {
    throw ConfigError("sample_poisson_points: expected count lambda*n = " + std::to_string(mean) +
                      " exceeds the supported range");
  }
  std::poisson_distribution<std::int64_t> count_dist(mean);
  const std::int64_t count = count_dist(rng);
  if (count > static_cast<std::int64_t>(std::numeric_limits<VertexId>::max())) {
    throw ConfigError("sample_poisson_points: sampled count exceeds vertex id range");
  }
  const double L = torus_side(n, d);
  std::uniform_real_distribution<double> coord(-L / 2.0, L / 2.0);
  std::vector<TorusPoint> points(static_cast<std::size_t>(count));
  for (auto& p : points) {
    p.coords.resize(static_cast<std::size_t>(d));
    for (auto& c : p.coords) c = coord(rng);
  }
  return points;
}

SpatialGrid SpatialGrid::build(std::span<const TorusPoint> points, double L, double radius) {
  if (!(radius > 0.0) || !(L > 0.0)) {
    throw ContractViolation("SpatialGrid::build: radius and L must be positive");
  }
  SpatialGrid grid;
  grid.dim_ = points.empty() ? 1 : static_cast<int>(points.front().dim());
  grid.torus_side_ = L;

  auto per_axis = static_cast<std::size_t>(std::max(1.0, std::floor(L / radius)));
  // Keep the total cell count within a small multiple of the point count.
  const double cap = std::max<double>(8.0, 4.0 * static_cast<double>(points.size()));
  while (per_axis > 1 && std::pow(static_cast<double>(per_axis), grid.dim_) > cap) {
    per_axis = static_cast<std::size_t>(
        std::max(1.0, std::floor(std::pow(cap, 1.0 / grid.dim_))));
    if (std::pow(static_cast<double>(per_axis), grid.dim_) > cap) --per_axis;
  }
  grid.cells_per_axis_ = per_axis;
  grid.cell_side_ = L / static_cast<double>(per_axis);

  std::size_t total = 1;
  for (int a = 0; a < grid.dim_; ++a) total *= per_axis;

  std::vector<std::size_t> cell_ids(points.size());
  std::vector<std::size_t> counts(total + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (static_cast<int>(points[i].dim()) != grid.dim_) {
      throw ContractViolation("SpatialGrid::build: mixed point dimensions");
    }
    cell_ids[i] = grid.cell_of(points[i]);
    ++counts[cell_ids[i] + 1];
  }
  for (std::size_t c = 0; c < total; ++c) counts[c + 1] += counts[c];
  grid.offsets_ = counts;
  grid.bucket_ids_.resize(points.size());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    grid.bucket_ids_[cursor[cell_ids[i]]++] = static_cast<VertexId>(i);
  }
  return grid;
}

std::size_t SpatialGrid::cell_of(const TorusPoint& p) const {
  std::size_t index = 0;
  std::size_t stride = 1;
  for (int a = 0; a < dim_; ++a) {
    const double shifted = p.coords[static_cast<std::size_t>(a)] + torus_side_ / 2.0;
    auto c = static_cast<std::ptrdiff_t>(std::floor(shifted / cell_side_));
    c = std::clamp<std::ptrdiff_t>(c, 0, static_cast<std::ptrdiff_t>(cells_per_axis_) - 1);
    index += static_cast<std::size_t>(c) * stride;
    stride *= cells_per_axis_;
  }
  return index;
}

std::span<const VertexId> SpatialGrid::bucket(std::size_t cell) const {
  return {bucket_ids_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]};
}

std::vector<std::size_t> SpatialGrid::neighborhood(std::size_t cell) const {
  const auto m = static_cast<std::ptrdiff_t>(cells_per_axis_);
  std::vector<std::ptrdiff_t> base(static_cast<std::size_t>(dim_));
  for (int a = 0; a < dim_; ++a) {
    base[static_cast<std::size_t>(a)] = static_cast<std::ptrdiff_t>(cell % cells_per_axis_);
    cell /= cells_per_axis_;
  }
  std::vector<std::size_t> out;
  std::vector<int> offset(static_cast<std::size_t>(dim_), -1);
  while (true) {
    std::size_t index = 0;
    std::size_t stride = 1;
    for (int a = 0; a < dim_; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const std::ptrdiff_t c = ((base[ua] + offset[ua]) % m + m) % m;
      index += static_cast<std::size_t>(c) * stride;
      stride *= cells_per_axis_;
    }
    out.push_back(index);
    int a = 0;
    while (a < dim_ && offset[static_cast<std::size_t>(a)] == 1) {
      offset[static_cast<std::size_t>(a)] = -1;
      ++a;
    }
    if (a == dim_) break;
    ++offset[static_cast<std::size_t>(a)];
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<VisiblePair> visible_pairs(std::span<const TorusPoint> points, double radius,
                                       const SpatialGrid& grid) {
  const double L = grid.torus_side();
  if (radius > L / 2.0) {
    throw DomainError("visible_pairs: radius " + std::to_string(radius) +
                      " exceeds half the torus side " + std::to_string(L / 2.0));
  }
  if (grid.cell_side() < radius) {
    throw ContractViolation("visible_pairs: grid cells are narrower than the query radius");
  }
  if (grid.point_count() != points.size()) {
    throw ContractViolation("visible_pairs: grid was built over a different point set");
  }
  std::vector<VisiblePair> out;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const auto here = grid.bucket(cell);
    if (here.empty()) continue;
    for (std::size_t other : grid.neighborhood(cell)) {
      if (other < cell) continue;
      const auto there = grid.bucket(other);
      for (VertexId u : here) {
        for (VertexId v : there) {
          if (other == cell && v <= u) continue;
          const double dist = toroidal_distance(points[u], points[v], L);
          if (dist <= radius) out.push_back({std::min(u, v), std::max(u, v), dist});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const VisiblePair& a, const VisiblePair& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return out;
}

}  // namespace ghcm
