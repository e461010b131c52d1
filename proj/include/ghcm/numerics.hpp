#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace ghcm::numerics {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes are the roots of P_n found by Newton iteration from the Chebyshev guess.
GaussLegendreRule gauss_legendre(int order);

/// Cached rule for a given order (thread-safe, computed once).
const GaussLegendreRule& cached_gauss_legendre(int order);

/// Integrates f over [a, b] with the rule mapped affinely from [-1, 1].
template <class F>
double integrate_gauss_legendre(const F& f, double a, double b, const GaussLegendreRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

/// Composite Gauss-Legendre over consecutive intervals [cuts[i], cuts[i+1]].
template <class F>
double integrate_piecewise(const F& f, std::span<const double> cuts, const GaussLegendreRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) sum += integrate_gauss_legendre(f, cuts[i], cuts[i + 1], rule);
  }
  return sum;
}

/// Adaptive Simpson quadrature to a relative tolerance (absolute floor 1e-300).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth = 50);

struct ScalarMinimum {
  double argmin;
  double value;
  int iterations;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
/// Stops once the bracket is narrower than `tol`. The endpoints are compared
/// against the interior candidate so a boundary minimum is returned exactly.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double tol);

}  // namespace ghcm::numerics
