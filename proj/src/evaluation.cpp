#include "ghcm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "ghcm/error.hpp"

namespace ghcm {

namespace {

Relabeling compose(const Relabeling& outer, const Relabeling& inner) {
  Relabeling out(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) out[i] = outer[static_cast<std::size_t>(inner[i])];
  return out;
}

Relabeling inverse(const Relabeling& omega) {
  Relabeling out(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out[static_cast<std::size_t>(omega[i])] = static_cast<Community>(i);
  return out;
}

void check_same_length(const Labeling& estimate, std::span<const Community> truth) {
  if (estimate.size() != truth.size()) {
    throw ContractViolation("labelings differ in length");
  }
}

std::size_t matches(const Labeling& estimate, std::span<const Community> truth,
                    const Relabeling& omega) {
  std::size_t count = 0;
  for (std::size_t u = 0; u < truth.size(); ++u) {
    if (estimate[u] == omega[static_cast<std::size_t>(truth[u])]) ++count;
  }
  return count;
}

}  // namespace

bool PermissibleSet::contains(const Relabeling& omega) const {
  return std::find(permutations.begin(), permutations.end(), omega) != permutations.end();
}

bool PermissibleSet::is_group() const {
  if (permutations.empty()) return false;
  Relabeling identity(permutations.front().size());
  std::iota(identity.begin(), identity.end(), 0);
  if (!contains(identity)) return false;
  for (const auto& a : permutations) {
    if (!contains(inverse(a))) return false;
    for (const auto& b : permutations) {
      if (!contains(compose(a, b))) return false;
    }
  }
  return true;
}

PermissibleSet permissible_relabelings(std::span<const double> pi, const DistributionFamily& fam) {
  const int k = fam.k();
  if (k > kMaxPermutationCommunities) {
    throw ConfigError(fmt::format("permissible relabelings: k = {} exceeds the supported {}", k,
                                  kMaxPermutationCommunities));
  }
  if (static_cast<int>(pi.size()) != k) throw ContractViolation("prior length differs from k");
  // Cache pair-vs-pair equivalence once; permutations only look it up.
  const std::size_t pairs = fam.pair_count();
  std::vector<std::vector<int>> equivalent(pairs, std::vector<int>(pairs, -1));
  auto same_law = [&](CommunityPair a, CommunityPair b) {
    const std::size_t ia = fam.pair_index(a);
    const std::size_t ib = fam.pair_index(b);
    if (ia == ib) return true;
    int& cached = equivalent[ia][ib];
    if (cached < 0) {
      cached = relation(fam, a, b) == PairRelation::Equivalent ? 1 : 0;
      equivalent[ib][ia] = cached;
    }
    return cached == 1;
  };

  PermissibleSet out;
  Relabeling omega(static_cast<std::size_t>(k));
  std::iota(omega.begin(), omega.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      if (pi[static_cast<std::size_t>(i)] != pi[static_cast<std::size_t>(omega[static_cast<std::size_t>(i)])]) ok = false;
    }
    for (int i = 0; i < k && ok; ++i) {
      for (int j = i; j < k && ok; ++j) {
        if (!same_law({i, j}, {omega[static_cast<std::size_t>(i)], omega[static_cast<std::size_t>(j)]})) ok = false;
      }
    }
    if (ok) out.permutations.push_back(omega);
  } while (std::next_permutation(omega.begin(), omega.end()));
  return out;
}

std::vector<Community> relabel(std::span<const Community> sigma, const Relabeling& omega) {
  std::vector<Community> out(sigma.size());
  for (std::size_t u = 0; u < sigma.size(); ++u) {
    out[u] = sigma[u] == kUnlabeled ? kUnlabeled : omega[static_cast<std::size_t>(sigma[u])];
  }
  return out;
}

double agreement(const Labeling& estimate, std::span<const Community> truth,
                 const PermissibleSet& omega_set) {
  check_same_length(estimate, truth);
  if (!estimate.is_total()) {
    throw ContractViolation("agreement: estimate still has unlabeled vertices");
  }
  if (truth.empty()) return 1.0;
  std::size_t best = 0;
  for (const auto& omega : omega_set.permutations) best = std::max(best, matches(estimate, truth, omega));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

std::size_t discrepancy(const Labeling& estimate, std::span<const Community> truth,
                        const PermissibleSet& omega_set) {
  check_same_length(estimate, truth);
  std::size_t best = 0;
  for (const auto& omega : omega_set.permutations) best = std::max(best, matches(estimate, truth, omega));
  return truth.size() - best;
}

const Relabeling& best_alignment(const Labeling& estimate, std::span<const Community> truth,
                                 const PermissibleSet& omega_set) {
  check_same_length(estimate, truth);
  std::size_t best = 0;
  const Relabeling* arg = &omega_set.permutations.front();
  for (const auto& omega : omega_set.permutations) {
    const std::size_t m = matches(estimate, truth, omega);
    if (m > best) {
      best = m;
      arg = &omega;
    }
  }
  return *arg;
}

double genie_loglik(const ObservedGraph& graph, VertexId v, Community i, const Labeling& sigma,
                    bool include_prior) {
  const auto& fam = graph.config.family;
  double total = include_prior ? std::log(graph.config.pi[static_cast<std::size_t>(i)]) : 0.0;
  for (const auto& nb : graph.adjacency[v]) {
    const Community c = sigma[nb.id];
    if (c == kUnlabeled) continue;
    total += log_density(fam, i, c, nb.x, nb.y);
  }
  return total;
}

std::vector<VertexId> flip_bad_vertices(const Instance& instance, bool include_prior) {
  const Labeling truth(instance.true_labels);
  const int k = instance.config().k();
  std::vector<VertexId> out;
  for (VertexId v = 0; v < instance.vertex_count(); ++v) {
    const Community own = truth[v];
    const double own_score = genie_loglik(instance.graph, v, own, truth, include_prior);
    for (Community j = 0; j < k; ++j) {
      if (j == own) continue;
      if (genie_loglik(instance.graph, v, j, truth, include_prior) >= own_score) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

bool in_balanced_set(std::span<const Community> seed_labels, std::span<const double> pi,
                     double epsilon) {
  const double s = static_cast<double>(seed_labels.size());
  for (std::size_t j = 0; j < pi.size(); ++j) {
    const auto count = static_cast<double>(
        std::count(seed_labels.begin(), seed_labels.end(), static_cast<Community>(j)));
    if (!(count > (pi[j] - epsilon) * s && count < (pi[j] + epsilon) * s)) return false;
  }
  return true;
}

Labeling restricted_mle_oracle(const ObservedGraph& graph, std::span<const VertexId> seed,
                               double epsilon) {
  if (seed.empty() || seed.size() > kMaxRestrictedMleSeed) {
    throw ContractViolation(fmt::format("restricted MLE: seed size {} outside [1, {}]",
                                        seed.size(), kMaxRestrictedMleSeed));
  }
  const auto& pi = graph.config.pi;
  const int k = graph.config.k();
  const std::size_t s = seed.size();
  std::vector<Community> current(s, 0);
  std::vector<Community> best;
  double best_score = -std::numeric_limits<double>::infinity();
  bool any = false;
  while (true) {
    if (in_balanced_set(current, pi, epsilon)) {
      double score = 0.0;
      for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = a + 1; b < s; ++b) {
          if (const Neighbor* nb = graph.find(seed[a], seed[b])) {
            score += log_density(graph.config.family, current[a], current[b], nb->x, nb->y);
          }
        }
      }
      if (!any || strictly_greater(score, best_score)) {
        best = current;
        best_score = score;
        any = true;
      }
    }
    std::size_t pos = s;
    while (pos > 0 && current[pos - 1] == k - 1) current[--pos] = 0;
    if (pos == 0) break;
    ++current[pos - 1];
  }
  if (!any) {
    std::string ranges;
    for (std::size_t j = 0; j < pi.size(); ++j) {
      ranges += fmt::format(" community {}: ({}, {})", j, (pi[j] - epsilon) * static_cast<double>(s),
                            (pi[j] + epsilon) * static_cast<double>(s));
    }
    throw ConfigError(fmt::format(
        "restricted MLE: no labeling of {} seed vertices has counts in the open ranges{}", s,
        ranges));
  }
  Labeling out(graph.vertex_count());
  for (std::size_t a = 0; a < s; ++a) out[seed[a]] = best[a];
  return out;
}

}  // namespace ghcm

namespace ghcm {

PhaseMistakes phase_mistakes(const Instance& instance, const RecoveryResult& result,
                             const PermissibleSet& omega_set) {
  PhaseMistakes out;
  const auto& diag = result.diagnostics;
  if (diag.phase_one.size() != instance.vertex_count()) return out;
  const auto& truth = instance.true_labels;

  std::size_t best_seed = diag.seed_vertices.size();
  for (const auto& omega : omega_set.permutations) {
    std::size_t wrong = 0;
    for (VertexId v : diag.seed_vertices) {
      if (diag.phase_one[v] != omega[static_cast<std::size_t>(truth[v])]) ++wrong;
    }
    best_seed = std::min(best_seed, wrong);
  }
  out.seed_mistakes = best_seed;

  const Relabeling& omega = best_alignment(diag.phase_one, truth, omega_set);
  std::vector<std::size_t> per_block(diag.block_count, 0);
  for (VertexId v = 0; v < instance.vertex_count(); ++v) {
    const Community c = diag.phase_one[v];
    if (c == kUnlabeled) continue;
    if (c != omega[static_cast<std::size_t>(truth[v])]) ++per_block[diag.block_of_vertex[v]];
    if (!result.labeling.values.empty() && result.labeling[v] != c) ++out.refine_changes;
  }
  if (!per_block.empty()) out.max_block_mistakes = *std::max_element(per_block.begin(), per_block.end());
  return out;
}

}  // namespace ghcm
