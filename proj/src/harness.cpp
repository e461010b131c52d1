#include "ghcm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <fmt/core.h>

#include "ghcm/error.hpp"

namespace ghcm {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Standard: return "standard";
    case Algorithm::Segmented1D: return "segmented_1d";
    case Algorithm::Auto: return "auto";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
  const std::string t = boost::trim_copy(text);
  if (t == "standard") return Algorithm::Standard;
  if (t == "segmented_1d") return Algorithm::Segmented1D;
  if (t == "auto") return Algorithm::Auto;
  throw ConfigError("unknown algorithm '" + t + "' (expected standard, segmented_1d or auto)");
}

Algorithm resolve_algorithm(Algorithm requested, const ModelConfig& config,
                            std::size_t omega_count) {
  if (requested != Algorithm::Auto) return requested;
  const bool low_intensity_line = config.d == 1 && config.lambda * config.r <= 1.0;
  if (!low_intensity_line) return Algorithm::Standard;
  if (omega_count == 1) return Algorithm::Segmented1D;
  throw AssumptionViolation(fmt::format(
      "d = 1, lambda r = {} <= 1 and {} permissible relabelings: exact recovery is impossible "
      "in this regime",
      config.lambda * config.r, omega_count));
}

DistributionFamily with_symmetric_parameters(const DistributionFamily& fam, FamilyPoint point) {
  const int k = fam.k();
  auto fill = [&](std::vector<PiecewisePolynomial>& fs) {
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        fs[fam.pair_index(i, j)] =
            PiecewisePolynomial::constant(i == j ? point.within : point.across, fam.r());
      }
    }
  };
  if (const auto* g = std::get_if<BernoulliGate>(&fam.payload())) {
    BernoulliGate copy = *g;
    fill(copy.f);
    return DistributionFamily(k, fam.r(), copy, fam.eta_bound());
  }
  if (const auto* g = std::get_if<GaussianShift>(&fam.payload())) {
    GaussianShift copy = *g;
    fill(copy.mu);
    return DistributionFamily(k, fam.r(), copy, fam.eta_bound());
  }
  throw ConfigError("family parameter sweeps need a bernoulli or gaussian family");
}

std::vector<SweepPoint> ExperimentPlan::points() const {
  std::vector<SweepPoint> out;
  const auto ns = n_values.empty() ? std::vector<double>{base.n} : n_values;
  const auto lambdas = lambda_values.empty() ? std::vector<double>{base.lambda} : lambda_values;
  const auto rs = r_values.empty() ? std::vector<double>{base.r} : r_values;
  const std::size_t families = family_points.empty() ? 1 : family_points.size();
  for (std::size_t f = 0; f < families; ++f) {
    for (double lambda : lambdas) {
      for (double r : rs) {
        for (double n : ns) {
          std::optional<FamilyPoint> fp;
          if (!family_points.empty()) fp = family_points[f];
          DistributionFamily fam = base.family;
          if (r != fam.r()) {
            // Rescale a family defined on [0, r_base] to [0, r].
            if (fam.kind() != FamilyKind::TablePMF) {
              const double ratio = r / fam.r();
              auto rescale = [&](std::vector<PiecewisePolynomial> fs) {
                for (auto& p : fs) {
                  for (auto& b : p.breakpoints) b *= ratio;
                  for (auto& c : p.coefficients) {
                    double power = 1.0;
                    for (auto& coef : c) {
                      coef /= power;
                      power *= ratio;
                    }
                  }
                }
                return fs;
              };
              if (const auto* g = std::get_if<BernoulliGate>(&fam.payload())) {
                fam = DistributionFamily(fam.k(), r, BernoulliGate{rescale(g->f)}, fam.eta_bound());
              } else {
                const auto& gs = std::get<GaussianShift>(fam.payload());
                fam = DistributionFamily(fam.k(), r, GaussianShift{rescale(gs.mu), gs.sigma},
                                         fam.eta_bound());
              }
            } else {
              TablePMF t = std::get<TablePMF>(fam.payload());
              for (auto& b : t.bins) b *= r / fam.r();
              fam = DistributionFamily(fam.k(), r, t, fam.eta_bound());
            }
          }
          if (fp) fam = with_symmetric_parameters(fam, *fp);
          out.push_back({out.size(), ModelConfig{lambda, n, r, base.d, base.pi, fam}, fp});
        }
      }
    }
  }
  return out;
}

void ExperimentPlan::validate() const {
  if (trials_per_point < 1) throw ConfigError("sweep: trials per point must be >= 1");
  for (const auto& p : points()) p.config.validate();
}

RecoveryOptions recovery_options_from_tree(const ConfigTree& tree) {
  RecoveryOptions options;
  const auto sec = tree.get_child_optional("recovery");
  if (!sec) return options;
  if (auto v = sec->get_optional<std::string>("delta")) options.delta = parse_real(*v, "delta");
  if (auto v = sec->get_optional<std::string>("chi")) options.chi = parse_real(*v, "chi");
  if (auto v = sec->get_optional<std::string>("seed_budget")) {
    options.seed_budget = static_cast<std::size_t>(parse_real(*v, "seed_budget"));
  }
  if (auto v = sec->get_optional<std::string>("refine_prior")) {
    const std::string t = boost::trim_copy(*v);
    if (t != "true" && t != "false") throw ConfigError("config: refine_prior must be true or false");
    options.refine_with_prior = t == "true";
  }
  return options;
}

ExperimentPlan plan_from_tree(const ConfigTree& tree) {
  ExperimentPlan plan{model_config_from_tree(tree), {}, {}, {}, {}, 1, 1, Algorithm::Auto, {}, {}};
  plan.recovery = recovery_options_from_tree(tree);
  if (const auto sweep = tree.get_child_optional("sweep")) {
    auto list = [&](const char* key) {
      const auto v = sweep->get_optional<std::string>(key);
      return v ? parse_reals(*v, key) : std::vector<double>{};
    };
    plan.n_values = list("n");
    plan.lambda_values = list("lambda");
    plan.r_values = list("r");
    const auto within = list("within");
    const auto across = list("across");
    if (within.size() != across.size()) {
      throw ConfigError("sweep: 'within' and 'across' must list the same number of values");
    }
    for (std::size_t i = 0; i < within.size(); ++i) plan.family_points.push_back({within[i], across[i]});
    if (auto v = sweep->get_optional<std::string>("trials")) {
      const double t = parse_real(*v, "trials");
      if (t < 1.0 || t != std::floor(t)) throw ConfigError("sweep: trials must be a positive integer");
      plan.trials_per_point = static_cast<std::size_t>(t);
    }
    if (auto v = sweep->get_optional<std::string>("base_seed")) {
      plan.base_seed = std::stoull(boost::trim_copy(*v));
    }
    if (auto v = sweep->get_optional<std::string>("algorithm")) plan.algorithm = parse_algorithm(*v);
  }
  if (auto v = tree.get_optional<std::string>("output.csv")) plan.csv_path = boost::trim_copy(*v);
  return plan;
}

TrialResult run_trial(const ModelConfig& config, std::uint64_t seed, Algorithm algorithm,
                      const RecoveryOptions& options, const ThresholdReport* report) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ThresholdReport local;
  if (!report) {
    local = threshold_report(config);
    report = &local;
  }
  const Algorithm resolved = resolve_algorithm(algorithm, config, report->omega_count);
  const PermissibleSet omega = permissible_relabelings(config.pi, config.family);

  const Instance instance = sample_instance(config, seed);
  const RecoveryResult result = resolved == Algorithm::Segmented1D
                                    ? recover_1d_segments(instance.graph, options)
                                    : recover(instance.graph, options);

  TrialResult out;
  out.n = config.n;
  out.lambda = config.lambda;
  out.r = config.r;
  out.d = config.d;
  out.seed = seed;
  out.algorithm = resolved;
  out.capacity = report->capacity;
  out.regime = report->regime;
  out.vertices = instance.vertex_count();
  out.edges = instance.graph.edge_count();
  out.connected = result.diagnostics.connected;
  out.failed = result.failed;
  out.segments = result.diagnostics.segments;
  out.seed_size = result.diagnostics.seed_size;
  const Labeling estimate = result.failed ? prior_argmax_labeling(instance.graph) : result.labeling;
  out.agreement = agreement(estimate, instance.true_labels, omega);
  out.exact = !result.failed && discrepancy(estimate, instance.true_labels, omega) == 0;
  if (out.exact) out.agreement = 1.0;
  if (!result.failed) {
    const auto mistakes = phase_mistakes(instance, result, omega);
    out.seed_mistakes = mistakes.seed_mistakes;
    out.max_block_mistakes = mistakes.max_block_mistakes;
    out.refine_changes = mistakes.refine_changes;
    out.phase_one_unlabeled = result.diagnostics.phase_one.unlabeled_count();
  }
  out.flip_bad_count = flip_bad_vertices(instance).size();
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

PointSummary summarize(std::size_t point_index, const std::vector<TrialResult>& trials) {
  PointSummary s;
  s.point_index = point_index;
  double agree = 0.0;
  double flip = 0.0;
  std::size_t connected = 0;
  for (const auto& t : trials) {
    if (t.point_index != point_index) continue;
    ++s.trials;
    if (t.exact) ++s.successes;
    if (t.connected) ++connected;
    agree += t.agreement;
    flip += static_cast<double>(t.flip_bad_count);
  }
  if (s.trials > 0) {
    const double n = static_cast<double>(s.trials);
    s.success_rate = static_cast<double>(s.successes) / n;
    s.mean_agreement = agree / n;
    s.mean_flip_bad = flip / n;
    s.connected_rate = static_cast<double>(connected) / n;
  }
  std::tie(s.wilson_low, s.wilson_high) = wilson_interval(s.successes, s.trials);
  return s;
}

namespace {

std::string family_columns(const std::optional<FamilyPoint>& fp) {
  return fp ? format_real(fp->within) + "," + format_real(fp->across) : std::string(",");
}

std::string point_columns(const TrialResult& t) {
  return fmt::format("{},{},{},{},{},{}", t.point_index, format_real(t.n), format_real(t.lambda),
                     format_real(t.r), t.d, family_columns(t.family_point));
}

}  // namespace

std::string csv_header() {
  return "row_type,point,n,lambda,r,d,within,across,seed,algorithm,capacity,regime,vertices,edges,"
         "connected,failed,exact,agreement,segments,seed_size,seed_mistakes,max_block_mistakes,"
         "phase_one_unlabeled,refine_changes,flip_bad_count,trials,successes,success_rate,"
         "wilson_low,wilson_high,mean_agreement,mean_flip_bad,connected_rate,wall_time_s";
}

std::string csv_row(const TrialResult& t) {
  return fmt::format("trial,{},{},{},{:.12g},{},{},{},{},{},{},{:.12g},{},{},{},{},{},{},{},,,,,,,,,{:.6f}",
                     point_columns(t), t.seed, to_string(t.algorithm), t.capacity,
                     to_string(t.regime), t.vertices, t.edges, int(t.connected), int(t.failed),
                     int(t.exact), t.agreement, t.segments, t.seed_size, t.seed_mistakes,
                     t.max_block_mistakes, t.phase_one_unlabeled, t.refine_changes,
                     t.flip_bad_count, t.wall_time_s);
}

std::string csv_row(const PointSummary& s, const TrialResult& first) {
  return fmt::format("summary,{},,{},{:.12g},{},,,,,,,,,,,,,{},{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},",
                     point_columns(first), to_string(first.algorithm), first.capacity,
                     to_string(first.regime), s.trials, s.successes, s.success_rate,
                     s.wilson_low, s.wilson_high, s.mean_agreement, s.mean_flip_bad,
                     s.connected_rate);
}

SweepOutput run_sweep_trials(const ExperimentPlan& plan, unsigned threads) {
  plan.validate();
  const auto points = plan.points();
  std::vector<ThresholdReport> reports;
  std::vector<Algorithm> algorithms;
  for (const auto& p : points) {
    reports.push_back(threshold_report(p.config));
    algorithms.push_back(resolve_algorithm(plan.algorithm, p.config, reports.back().omega_count));
  }
  const std::size_t total = points.size() * plan.trials_per_point;
  SweepOutput out;
  out.trials.resize(total);
  std::vector<std::exception_ptr> errors(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t p = job / plan.trials_per_point;
      const std::size_t t = job % plan.trials_per_point;
      try {
        TrialResult r = run_trial(points[p].config, plan.seed_for(p, t), algorithms[p],
                                  plan.recovery, &reports[p]);
        r.point_index = p;
        r.family_point = points[p].family_point;
        out.trials[job] = std::move(r);
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t p = 0; p < points.size(); ++p) out.summaries.push_back(summarize(p, out.trials));
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepOutput& sweep) {
  out << "# ghcm-sweep-csv version=" << kCsvSchemaVersion << '\n';
  out << csv_header() << '\n';
  std::size_t rows = 0;
  std::size_t cursor = 0;
  for (const auto& summary : sweep.summaries) {
    const std::size_t first = cursor;
    while (cursor < sweep.trials.size() && sweep.trials[cursor].point_index == summary.point_index) {
      out << csv_row(sweep.trials[cursor++]) << '\n';
      ++rows;
    }
    if (first < sweep.trials.size()) {
      out << csv_row(summary, sweep.trials[first]) << '\n';
      ++rows;
    }
  }
  out << "# end schema=ghcm-sweep-csv version=" << kCsvSchemaVersion << " rows=" << rows << '\n';
}

SweepOutput run_sweep(const ExperimentPlan& plan, unsigned threads) {
  if (plan.csv_path.empty()) throw ConfigError("sweep: no output CSV path");
  std::ofstream file(plan.csv_path);
  if (!file) throw ConfigError("sweep: cannot write '" + plan.csv_path + "'");
  auto sweep = run_sweep_trials(plan, threads);
  write_sweep_csv(file, sweep);
  if (!file) throw std::runtime_error("sweep: write to '" + plan.csv_path + "' failed");
  return sweep;
}

}  // namespace ghcm
