#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "ghcm/distributions.hpp"

namespace ghcm {

/// Marker for a vertex left without an estimate after block propagation.
inline constexpr Community kUnlabeled = -1;

/// Per-vertex community estimate; entries are in [0, k) or kUnlabeled.
struct Labeling {
  std::vector<Community> values;

  Labeling() = default;
  explicit Labeling(std::size_t n, Community fill = kUnlabeled) : values(n, fill) {}
  explicit Labeling(std::vector<Community> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  Community operator[](std::size_t v) const { return values[v]; }
  Community& operator[](std::size_t v) { return values[v]; }
  bool is_total() const {
    return std::none_of(values.begin(), values.end(), [](Community c) { return c == kUnlabeled; });
  }
  std::size_t unlabeled_count() const {
    return static_cast<std::size_t>(std::count(values.begin(), values.end(), kUnlabeled));
  }
  bool operator==(const Labeling&) const = default;
};

/// Two scores are tied when they differ by at most this much (relative to their scale).
/// Every argmax in the library breaks such ties toward the smaller community index or
/// the lexicographically smaller labeling.
inline bool strictly_greater(double candidate, double incumbent) {
  if (incumbent == -std::numeric_limits<double>::infinity()) {
    return candidate > incumbent;
  }
  const double scale = 1.0 + std::max(std::abs(candidate), std::abs(incumbent));
  return candidate > incumbent + 1e-12 * scale;
}

/// Index of the largest score, ties toward the smallest index.
inline Community argmax_smallest(std::span<const double> scores) {
  Community best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (strictly_greater(scores[j], scores[static_cast<std::size_t>(best)])) {
      best = static_cast<Community>(j);
    }
  }
  return best;
}

}  // namespace ghcm
