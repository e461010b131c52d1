#include "ghcm/numerics.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ghcm::numerics {

GaussLegendreRule gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  const auto n = static_cast<std::size_t>(order);
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendreRule& cached_gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, gauss_legendre(order)).first;
  return it->second;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  if (b <= a) return 0.0;
  // A coarse composite pass fixes the absolute tolerance scale and keeps the
  // recursion from terminating early on narrow peaks.
  constexpr int kPanels = 64;
  const double h = (b - a) / kPanels;
  std::vector<double> xs(2 * kPanels + 1);
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = a + 0.5 * h * static_cast<double>(i);
    fs[i] = f(xs[i]);
  }
  double coarse = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const auto i = static_cast<std::size_t>(2 * p);
    coarse += h / 6.0 * (fs[i] + 4.0 * fs[i + 1] + fs[i + 2]);
  }
  const double tol = std::max(rel_tol * std::abs(coarse), 1e-300) / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const auto i = static_cast<std::size_t>(2 * p);
    const double whole = h / 6.0 * (fs[i] + 4.0 * fs[i + 1] + fs[i + 2]);
    total += simpson_step(f, xs[i], fs[i], xs[i + 2], fs[i + 2], xs[i + 1], fs[i + 1], whole,
                          tol, max_depth);
  }
  return total;
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int iterations = 0;
  while (b - a > tol && iterations < 500) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++iterations;
  }
  ScalarMinimum best{0.5 * (a + b), f(0.5 * (a + b)), iterations};
  for (double x : {c, d}) {
    const double fx = x == c ? fc : fd;
    if (fx < best.value) best = {x, fx, iterations};
  }
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo < best.value) best = {lo, flo, iterations};
  if (fhi < best.value) best = {hi, fhi, iterations};
  return best;
}

}  // namespace ghcm::numerics
