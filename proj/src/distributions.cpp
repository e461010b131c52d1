#include "ghcm/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ghcm/error.hpp"
#include "ghcm/numerics.hpp"

namespace ghcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParamTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_distance(const DistributionFamily& fam, double y) {
  if (!(y >= 0.0) || y > fam.r()) {
    throw DomainError("normalized distance " + std::to_string(y) + " outside [0, " +
                      std::to_string(fam.r()) + "]: no observation exists at this distance");
  }
}

void check_pieces(const std::vector<double>& cuts, double r, const std::string& what) {
  if (cuts.size() < 2 || cuts.front() != 0.0 || std::abs(cuts.back() - r) > 1e-12 * r) {
    throw ConfigError(what + ": breakpoints must run from 0 to r");
  }
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i] < cuts[i + 1])) throw ConfigError(what + ": breakpoints must increase");
  }
}

std::size_t bin_of(const std::vector<double>& cuts, double y) {
  auto it = std::upper_bound(cuts.begin(), cuts.end(), y);
  std::size_t idx = it == cuts.begin() ? 0 : static_cast<std::size_t>(it - cuts.begin()) - 1;
  return std::min(idx, cuts.size() - 2);
}

double normal_log_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// Mass of N(0,1) inside +-kTruncation.
double truncation_mass() {
  return std::erf(GaussianShift::kTruncation / std::numbers::sqrt2);
}

std::size_t symbol_index(const TablePMF& table, Observation x) {
  for (std::size_t s = 0; s < table.alphabet.size(); ++s) {
    if (table.alphabet[s] == x) return s;
  }
  throw DomainError("observation " + std::to_string(x) + " is not in the table alphabet");
}

double safe_pow(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(base, exponent);
}

}  // namespace

PiecewisePolynomial PiecewisePolynomial::constant(double value, double r) {
  return PiecewisePolynomial{{0.0, r}, {{value}}};
}

PiecewisePolynomial PiecewisePolynomial::steps(std::vector<double> cuts,
                                               std::vector<double> values) {
  if (cuts.size() != values.size() + 1) {
    throw ConfigError("PiecewisePolynomial::steps: need one more cut than values");
  }
  PiecewisePolynomial out;
  out.breakpoints = std::move(cuts);
  for (double v : values) out.coefficients.push_back({v});
  return out;
}

double PiecewisePolynomial::operator()(double y) const {
  const auto& c = coefficients[bin_of(breakpoints, y)];
  double value = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) value = value * y + *it;
  return value;
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::BernoulliGate: return "bernoulli";
    case FamilyKind::GaussianShift: return "gaussian";
    case FamilyKind::TablePMF: return "table";
  }
  return "unknown";
}

std::string to_string(PairRelation relation) {
  switch (relation) {
    case PairRelation::Equivalent: return "equivalent";
    case PairRelation::Distinct: return "distinct";
    case PairRelation::Mixed: return "mixed";
  }
  return "unknown";
}

DistributionFamily::DistributionFamily(int k, double r, Payload payload,
                                       std::optional<double> eta_bound)
    : k_(k), r_(r), payload_(std::move(payload)), eta_bound_(eta_bound) {
  if (k < 2) throw ConfigError("distribution family needs k >= 2 communities");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("support radius r must be positive");
  if (eta_bound && !(*eta_bound > 0.0)) throw ConfigError("declared eta bound must be positive");
  const std::size_t pairs = pair_count();

  auto check_functions = [&](const std::vector<PiecewisePolynomial>& fs, const std::string& what,
                             bool unit_interval) {
    if (fs.size() != pairs) {
      throw ConfigError(what + ": expected " + std::to_string(pairs) + " pair entries, got " +
                        std::to_string(fs.size()));
    }
    for (const auto& f : fs) {
      check_pieces(f.breakpoints, r, what);
      if (f.coefficients.size() + 1 != f.breakpoints.size()) {
        throw ConfigError(what + ": piece count does not match breakpoints");
      }
      for (const auto& c : f.coefficients) {
        if (c.empty()) throw ConfigError(what + ": empty polynomial piece");
      }
      if (!unit_interval) continue;
      for (std::size_t p = 0; p < f.piece_count(); ++p) {
        const double lo = f.breakpoints[p];
        const double hi = f.breakpoints[p + 1];
        for (int s = 0; s <= 64; ++s) {
          const double y = lo + (hi - lo) * s / 64.0;
          const auto& c = f.coefficients[p];
          double v = 0.0;
          for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * y + *it;
          if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError(what + ": probability " + std::to_string(v) + " outside [0, 1]");
          }
        }
      }
    }
  };

  std::visit(Overloaded{
                 [&](const BernoulliGate& g) { check_functions(g.f, "bernoulli family", true); },
                 [&](const GaussianShift& g) {
                   check_functions(g.mu, "gaussian family", false);
                   if (!(g.sigma > 0.0)) throw ConfigError("gaussian family: sigma must be > 0");
                 },
                 [&](const TablePMF& t) {
                   check_pieces(t.bins, r, "table family bins");
                   if (t.alphabet.empty()) throw ConfigError("table family: empty alphabet");
                   if (t.pmf.size() != pairs) {
                     throw ConfigError("table family: expected " + std::to_string(pairs) +
                                       " pair tables");
                   }
                   for (const auto& pair_table : t.pmf) {
                     if (pair_table.size() + 1 != t.bins.size()) {
                       throw ConfigError("table family: bin count mismatch");
                     }
                     for (const auto& row : pair_table) {
                       if (row.size() != t.alphabet.size()) {
                         throw ConfigError("table family: row length differs from alphabet");
                       }
                       double sum = 0.0;
                       for (double p : row) {
                         if (!(p >= 0.0)) throw ConfigError("table family: negative probability");
                         sum += p;
                       }
                       if (std::abs(sum - 1.0) > 1e-12) {
                         throw ConfigError("table family: pmf row sums to " +
                                           std::to_string(sum));
                       }
                     }
                   }
                 },
             },
             payload_);
}

std::size_t DistributionFamily::pair_index(Community i, Community j) const {
  if (i < 0 || j < 0 || i >= k_ || j >= k_) {
    throw ContractViolation("community index out of range");
  }
  if (i > j) std::swap(i, j);
  return static_cast<std::size_t>(i * k_ - i * (i - 1) / 2 + (j - i));
}

std::vector<double> DistributionFamily::breakpoints(CommunityPair p) const {
  const std::size_t idx = pair_index(p);
  return std::visit(Overloaded{
                        [&](const BernoulliGate& g) { return g.f[idx].breakpoints; },
                        [&](const GaussianShift& g) { return g.mu[idx].breakpoints; },
                        [&](const TablePMF& t) { return t.bins; },
                    },
                    payload_);
}

DistributionFamily symmetric_bernoulli(double within, double across, double r, int k) {
  BernoulliGate gate;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      gate.f.push_back(PiecewisePolynomial::constant(i == j ? within : across, r));
    }
  }
  return DistributionFamily(k, r, gate);
}

DistributionFamily symmetric_gaussian(double mean_gap, double sigma, double r, int k) {
  GaussianShift g;
  g.sigma = sigma;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      g.mu.push_back(PiecewisePolynomial::constant(i == j ? mean_gap : 0.0, r));
    }
  }
  return DistributionFamily(k, r, g);
}

double log_density(const DistributionFamily& fam, Community i, Community j, Observation x,
                   double y) {
  check_distance(fam, y);
  const std::size_t idx = fam.pair_index(i, j);
  return std::visit(
      Overloaded{
          [&](const BernoulliGate& g) {
            const double f = g.f[idx](y);
            if (x == 1.0) return std::log(f);
            if (x == 0.0) return std::log1p(-f);
            throw DomainError("bernoulli observation must be 0 or 1, got " + std::to_string(x));
          },
          [&](const GaussianShift& g) {
            if (!std::isfinite(x)) throw DomainError("gaussian observation must be finite");
            const double mu = g.mu[idx](y);
            if (std::abs(x - mu) > GaussianShift::kTruncation * g.sigma) return -kInf;
            return normal_log_pdf(x, mu, g.sigma) - std::log(truncation_mass());
          },
          [&](const TablePMF& t) {
            return std::log(t.pmf[idx][bin_of(t.bins, y)][symbol_index(t, x)]);
          },
      },
      fam.payload());
}

Observation sample_edge_weight(const DistributionFamily& fam, Community i, Community j, double y,
                               Rng& rng) {
  check_distance(fam, y);
  const std::size_t idx = fam.pair_index(i, j);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::visit(
      Overloaded{
          [&](const BernoulliGate& g) -> Observation { return unit(rng) < g.f[idx](y) ? 1.0 : 0.0; },
          [&](const GaussianShift& g) -> Observation {
            const double mu = g.mu[idx](y);
            std::normal_distribution<double> normal(0.0, 1.0);
            double z = normal(rng);
            while (std::abs(z) > GaussianShift::kTruncation) z = normal(rng);
            return mu + g.sigma * z;
          },
          [&](const TablePMF& t) -> Observation {
            const auto& row = t.pmf[idx][bin_of(t.bins, y)];
            double u = unit(rng);
            for (std::size_t s = 0; s + 1 < row.size(); ++s) {
              if (u < row[s]) return t.alphabet[s];
              u -= row[s];
            }
            return t.alphabet.back();
          },
      },
      fam.payload());
}

double phi_t(const DistributionFamily& fam, CommunityPair p, CommunityPair q, double t,
             double y) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("phi_t: t must lie in [0, 1]");
  check_distance(fam, y);
  const std::size_t ip = fam.pair_index(p);
  const std::size_t iq = fam.pair_index(q);
  return std::visit(
      Overloaded{
          [&](const BernoulliGate& g) {
            const double a = g.f[ip](y);
            const double b = g.f[iq](y);
            return safe_pow(a, t) * safe_pow(b, 1.0 - t) +
                   safe_pow(1.0 - a, t) * safe_pow(1.0 - b, 1.0 - t);
          },
          [&](const GaussianShift& g) {
            const double gap = g.mu[ip](y) - g.mu[iq](y);
            return std::exp(-t * (1.0 - t) * gap * gap / (2.0 * g.sigma * g.sigma));
          },
          [&](const TablePMF& tab) {
            const std::size_t bin = bin_of(tab.bins, y);
            double sum = 0.0;
            for (std::size_t s = 0; s < tab.alphabet.size(); ++s) {
              sum += safe_pow(tab.pmf[ip][bin][s], t) * safe_pow(tab.pmf[iq][bin][s], 1.0 - t);
            }
            return sum;
          },
      },
      fam.payload());
}

double phi_t_numeric(const DistributionFamily& fam, CommunityPair p, CommunityPair q, double t,
                     double y) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("phi_t_numeric: t must lie in [0, 1]");
  check_distance(fam, y);
  auto term = [&](Observation x) {
    const double lp = log_density(fam, p.first, p.second, x, y);
    const double lq = log_density(fam, q.first, q.second, x, y);
    const double a = t == 0.0 ? 0.0 : t * lp;
    const double b = t == 1.0 ? 0.0 : (1.0 - t) * lq;
    return std::exp(a + b);
  };
  if (const auto* g = std::get_if<GaussianShift>(&fam.payload())) {
    const double mp = g->mu[fam.pair_index(p)](y);
    const double mq = g->mu[fam.pair_index(q)](y);
    const double w = GaussianShift::kTruncation * g->sigma;
    double lo = std::min(mp, mq) - w;
    double hi = std::max(mp, mq) + w;
    if (t > 0.0 && t < 1.0) {
      lo = std::max(mp, mq) - w;
      hi = std::min(mp, mq) + w;
      if (lo >= hi) return 0.0;
    } else if (t == 0.0) {
      lo = mq - w;
      hi = mq + w;
    } else {
      lo = mp - w;
      hi = mp + w;
    }
    return numerics::adaptive_simpson(term, lo, hi, 1e-10);
  }
  double sum = 0.0;
  if (fam.kind() == FamilyKind::BernoulliGate) {
    sum = term(0.0) + term(1.0);
  } else {
    for (double x : std::get<TablePMF>(fam.payload()).alphabet) sum += term(x);
  }
  return sum;
}

double total_mass(const DistributionFamily& fam, Community i, Community j, double y) {
  auto density = [&](Observation x) { return std::exp(log_density(fam, i, j, x, y)); };
  if (const auto* g = std::get_if<GaussianShift>(&fam.payload())) {
    const double mu = g->mu[fam.pair_index(i, j)](y);
    const double w = GaussianShift::kTruncation * g->sigma;
    return numerics::adaptive_simpson(density, mu - w, mu + w, 1e-12);
  }
  if (fam.kind() == FamilyKind::BernoulliGate) return density(0.0) + density(1.0);
  double sum = 0.0;
  for (double x : std::get<TablePMF>(fam.payload()).alphabet) sum += density(x);
  return sum;
}

bool laws_equal_at(const DistributionFamily& fam, CommunityPair p, CommunityPair q, double y) {
  check_distance(fam, y);
  const std::size_t ip = fam.pair_index(p);
  const std::size_t iq = fam.pair_index(q);
  if (ip == iq) return true;
  return std::visit(
      Overloaded{
          [&](const BernoulliGate& g) { return std::abs(g.f[ip](y) - g.f[iq](y)) <= kParamTol; },
          [&](const GaussianShift& g) {
            return std::abs(g.mu[ip](y) - g.mu[iq](y)) <= kParamTol * g.sigma;
          },
          [&](const TablePMF& t) {
            const std::size_t bin = bin_of(t.bins, y);
            for (std::size_t s = 0; s < t.alphabet.size(); ++s) {
              if (std::abs(t.pmf[ip][bin][s] - t.pmf[iq][bin][s]) > kParamTol) return false;
            }
            return true;
          },
      },
      fam.payload());
}

namespace {

template <class EqualAt>
PairRelation classify_on_grid(double r, EqualAt equal_at) {
  int equal_count = 0;
  bool adjacent_equal = false;
  bool prev = false;
  for (int g = 0; g < kEqualityGridPoints; ++g) {
    const double y = r * g / (kEqualityGridPoints - 1);
    const bool eq = equal_at(y);
    if (eq) {
      ++equal_count;
      if (prev) adjacent_equal = true;
    }
    prev = eq;
  }
  if (equal_count == kEqualityGridPoints) return PairRelation::Equivalent;
  if (!adjacent_equal) return PairRelation::Distinct;
  return PairRelation::Mixed;
}

}  // namespace

PairRelation relation(const DistributionFamily& fam, CommunityPair p, CommunityPair q) {
  return classify_on_grid(fam.r(), [&](double y) { return laws_equal_at(fam, p, q, y); });
}

PairRelation relation_by_log_density(const DistributionFamily& fam, CommunityPair p,
                                     CommunityPair q) {
  auto equal_at = [&](double y) {
    std::vector<Observation> xs;
    if (fam.kind() == FamilyKind::BernoulliGate) {
      xs = {0.0, 1.0};
    } else if (fam.kind() == FamilyKind::TablePMF) {
      xs = std::get<TablePMF>(fam.payload()).alphabet;
    } else {
      const auto& g = std::get<GaussianShift>(fam.payload());
      const double center = g.mu[fam.pair_index(p)](y);
      for (int s = -16; s <= 16; ++s) xs.push_back(center + 0.25 * s * g.sigma);
    }
    for (Observation x : xs) {
      const double a = log_density(fam, p.first, p.second, x, y);
      const double b = log_density(fam, q.first, q.second, x, y);
      if (std::isinf(a) && std::isinf(b) && a == b) continue;
      if (!(std::abs(a - b) <= 1e-9)) return false;
    }
    return true;
  };
  return classify_on_grid(fam.r(), equal_at);
}

ValidationReport validate_family(const DistributionFamily& fam) {
  ValidationReport report;
  report.eta_declared = fam.eta_bound();
  const int k = fam.k();
  std::vector<CommunityPair> pairs;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) pairs.emplace_back(i, j);
  }
  auto lookup = [&](CommunityPair a, CommunityPair b) {
    for (const auto& c : report.comparisons) {
      if ((c.p == a && c.q == b) || (c.p == b && c.q == a)) return c.relation;
    }
    return PairRelation::Equivalent;
  };
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const PairRelation rel = relation(fam, pairs[a], pairs[b]);
      report.comparisons.push_back({pairs[a], pairs[b], rel});
      if (rel == PairRelation::Mixed) report.identifiable = false;
      if (rel != PairRelation::Distinct) report.strongly_distinct = false;
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        if (lookup({i, a}, {i, b}) != PairRelation::Distinct) report.distinct = false;
      }
    }
  }

  // Grid maximum of log(p_ij / p_ab) over observations with positive mass under both.
  double eta = 0.0;
  constexpr int kYGrid = 257;
  for (int g = 0; g < kYGrid; ++g) {
    const double y = fam.r() * g / (kYGrid - 1);
    std::vector<Observation> xs;
    if (fam.kind() == FamilyKind::BernoulliGate) {
      xs = {0.0, 1.0};
    } else if (fam.kind() == FamilyKind::TablePMF) {
      xs = std::get<TablePMF>(fam.payload()).alphabet;
    } else {
      const auto& gs = std::get<GaussianShift>(fam.payload());
      double lo = -kInf;
      double hi = kInf;
      for (const auto& mu : gs.mu) {
        lo = std::max(lo, mu(y) - GaussianShift::kTruncation * gs.sigma);
        hi = std::min(hi, mu(y) + GaussianShift::kTruncation * gs.sigma);
      }
      if (lo > hi) {
        eta = kInf;
        break;
      }
      for (int s = 0; s <= 64; ++s) xs.push_back(lo + (hi - lo) * s / 64.0);
    }
    for (Observation x : xs) {
      double max_log = -kInf;
      double min_log = kInf;
      for (const auto& p : pairs) {
        const double l = log_density(fam, p.first, p.second, x, y);
        max_log = std::max(max_log, l);
        min_log = std::min(min_log, l);
      }
      if (max_log == -kInf) continue;  // outside the common support at this y
      eta = std::max(eta, max_log - min_log);
    }
  }
  report.eta_estimate = eta;
  report.bounded_likelihood = std::isfinite(eta) && (!fam.eta_bound() || eta < *fam.eta_bound());
  return report;
}

}  // namespace ghcm
