#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ghcm {

using VertexId = std::uint32_t;
using Rng = std::mt19937_64;

/// A point of the torus [-L/2, L/2]^d.
struct TorusPoint {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
  bool operator==(const TorusPoint&) const = default;
};

/// Side length L = n^(1/d) of the cube of volume n.
double torus_side(double n, int d);

/// Volume of the d-dimensional unit ball.
double unit_ball_volume(int d);

/// Euclidean distance with per-axis wraparound on a torus of side L.
double toroidal_distance(const TorusPoint& a, const TorusPoint& b, double L);

/// Homogeneous Poisson process of intensity lambda on the cube of volume n.
/// The count is drawn first, then locations i.i.d. uniform.
std::vector<TorusPoint> sample_poisson_points(double lambda, double n, int d, Rng& rng);

struct VisiblePair {
  VertexId u;
  VertexId v;
  double distance;

  bool operator==(const VisiblePair&) const = default;
};

/// Uniform bucketing of torus points into cubic cells of side >= a query radius.
/// Buckets are stored CSR-style: ids of cell c are bucket_ids[offsets[c] .. offsets[c+1]).
class SpatialGrid {
 public:
  /// Builds a grid whose cells are at least `radius` wide. The number of cells
  /// per axis is floor(L / radius), reduced when that would allocate far more
  /// cells than points.
  static SpatialGrid build(std::span<const TorusPoint> points, double L, double radius);

  int dim() const { return dim_; }
  double torus_side() const { return torus_side_; }
  double cell_side() const { return cell_side_; }
  std::size_t cells_per_axis() const { return cells_per_axis_; }
  std::size_t cell_count() const { return offsets_.size() - 1; }
  std::size_t point_count() const { return bucket_ids_.size(); }

  std::size_t cell_of(const TorusPoint& p) const;
  std::span<const VertexId> bucket(std::size_t cell) const;

  /// Distinct cells within one step per axis of `cell` (wraparound), including itself.
  std::vector<std::size_t> neighborhood(std::size_t cell) const;

 private:
  int dim_ = 0;
  double torus_side_ = 0.0;
  double cell_side_ = 0.0;
  std::size_t cells_per_axis_ = 1;
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> bucket_ids_;
};

/// All unordered pairs within `radius`, sorted by (u, v) with u < v.
std::vector<VisiblePair> visible_pairs(std::span<const TorusPoint> points, double radius,
                                       const SpatialGrid& grid);

}  // namespace ghcm
