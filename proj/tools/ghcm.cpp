// Command-line front end: threshold, sample, recover, sweep, validate.
//
// Exit status: 0 success, 1 usage error, 2 configuration or assumption
// violation, 3 runtime failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "ghcm/config.hpp"
#include "ghcm/error.hpp"
#include "ghcm/evaluation.hpp"
#include "ghcm/harness.hpp"
#include "ghcm/infotheory.hpp"
#include "ghcm/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // sample/recover default to 1; sweep to the plan
  std::string out_path;
  std::string algorithm;
  std::optional<std::size_t> trials;
  unsigned threads = 0;
};

ghcm::Algorithm requested_algorithm(const Options& opts, const ghcm::ExperimentPlan& plan) {
  return opts.algorithm.empty() ? plan.algorithm : ghcm::parse_algorithm(opts.algorithm);
}

// Writes to --out when given, stdout otherwise.
template <typename Fn>
void with_output(const Options& opts, Fn&& fn) {
  if (opts.out_path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream file(opts.out_path);
  if (!file) throw ghcm::ConfigError("cannot write '" + opts.out_path + "'");
  fn(file);
  if (!file) throw std::runtime_error("write to '" + opts.out_path + "' failed");
}

int cmd_threshold(const Options& opts) {
  const auto config = ghcm::model_config_from_tree(ghcm::read_config_file(opts.config_path));
  config.validate();
  const auto report = ghcm::threshold_report(config);
  with_output(opts, [&](std::ostream& out) { out << ghcm::format_report(report); });
  return kExitOk;
}

int cmd_sample(const Options& opts) {
  const auto config = ghcm::model_config_from_tree(ghcm::read_config_file(opts.config_path));
  config.validate();
  const auto instance = ghcm::sample_instance(config, opts.seed.value_or(1));
  with_output(opts, [&](std::ostream& out) { ghcm::write_instance(out, instance); });
  return kExitOk;
}

int cmd_recover(const Options& opts) {
  const auto plan = ghcm::plan_from_tree(ghcm::read_config_file(opts.config_path));
  plan.base.validate();
  const auto t = ghcm::run_trial(plan.base, opts.seed.value_or(1), requested_algorithm(opts, plan), plan.recovery);
  with_output(opts, [&](std::ostream& out) {
    fmt::print(out, "algorithm = {}\n", ghcm::to_string(t.algorithm));
    fmt::print(out, "seed = {}\n", t.seed);
    fmt::print(out, "capacity = {:.10g}\n", t.capacity);
    fmt::print(out, "regime = {}\n", ghcm::to_string(t.regime));
    fmt::print(out, "vertices = {}\n", t.vertices);
    fmt::print(out, "edges = {}\n", t.edges);
    fmt::print(out, "connected = {}\n", t.connected);
    fmt::print(out, "failed = {}\n", t.failed);
    fmt::print(out, "segments = {}\n", t.segments);
    fmt::print(out, "seed_size = {}\n", t.seed_size);
    fmt::print(out, "seed_mistakes = {}\n", t.seed_mistakes);
    fmt::print(out, "max_block_mistakes = {}\n", t.max_block_mistakes);
    fmt::print(out, "phase_one_unlabeled = {}\n", t.phase_one_unlabeled);
    fmt::print(out, "refine_changes = {}\n", t.refine_changes);
    fmt::print(out, "flip_bad_count = {}\n", t.flip_bad_count);
    fmt::print(out, "agreement = {:.10g}\n", t.agreement);
    fmt::print(out, "exact = {}\n", t.exact);
    fmt::print(out, "wall_time_s = {:.6f}\n", t.wall_time_s);
  });
  return kExitOk;
}

int cmd_sweep(const Options& opts) {
  auto plan = ghcm::plan_from_tree(ghcm::read_config_file(opts.config_path));
  if (!opts.algorithm.empty()) plan.algorithm = ghcm::parse_algorithm(opts.algorithm);
  if (opts.trials) plan.trials_per_point = *opts.trials;
  if (!opts.out_path.empty()) plan.csv_path = opts.out_path;
  if (opts.seed) plan.base_seed = *opts.seed;
  plan.validate();
  if (plan.csv_path.empty()) {
    auto sweep = ghcm::run_sweep_trials(plan, opts.threads);
    ghcm::write_sweep_csv(std::cout, sweep);
    return kExitOk;
  }
  const auto sweep = ghcm::run_sweep(plan, opts.threads);
  for (const auto& s : sweep.summaries) {
    fmt::print(std::cerr, "point {}: {}/{} exact (95% CI {:.3f}-{:.3f}), mean agreement {:.4f}\n",
               s.point_index, s.successes, s.trials, s.wilson_low, s.wilson_high,
               s.mean_agreement);
  }
  return kExitOk;
}

int cmd_validate(const Options& opts) {
  const auto plan = ghcm::plan_from_tree(ghcm::read_config_file(opts.config_path));
  const auto& config = plan.base;
  config.validate();
  const auto report = ghcm::validate_family(config.family);
  const auto omega = ghcm::permissible_relabelings(config.pi, config.family);
  const auto algorithm =
      ghcm::resolve_algorithm(requested_algorithm(opts, plan), config, omega.size());
  const bool supported = algorithm == ghcm::Algorithm::Segmented1D ? report.supports_segmented()
                                                                  : report.supports_standard();
  with_output(opts, [&](std::ostream& out) {
    fmt::print(out, "family = {}\n", ghcm::to_string(config.family.kind()));
    for (const auto& c : report.comparisons) {
      fmt::print(out, "relation ({},{}) vs ({},{}) = {}\n", c.p.first, c.p.second, c.q.first,
                 c.q.second, ghcm::to_string(c.relation));
    }
    fmt::print(out, "identifiable = {}\n", report.identifiable);
    fmt::print(out, "distinct = {}\n", report.distinct);
    fmt::print(out, "strongly_distinct = {}\n", report.strongly_distinct);
    fmt::print(out, "eta_estimate = {:.10g}\n", report.eta_estimate);
    if (report.eta_declared) fmt::print(out, "eta_declared = {:.10g}\n", *report.eta_declared);
    fmt::print(out, "bounded_likelihood = {}\n", report.bounded_likelihood);
    fmt::print(out, "permissible_relabelings = {}\n", omega.size());
    for (const auto& perm : omega.permutations) {
      std::string text;
      for (auto v : perm) text += (text.empty() ? "" : " ") + std::to_string(v);
      fmt::print(out, "relabeling = {}\n", text);
    }
    fmt::print(out, "algorithm = {}\n", ghcm::to_string(algorithm));
    fmt::print(out, "assumptions = {}\n", supported ? "satisfied" : "violated");
  });
  if (!supported) {
    fmt::print(std::cerr, "error: the family violates the assumptions of the {} algorithm\n",
               ghcm::to_string(algorithm));
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact recovery in geometric hidden community models"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "Configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_path, "Output path (default: stdout)");
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", opts.seed, "Random seed (sweeps: base seed)");
  };
  auto add_algorithm = [&](CLI::App* sub) {
    sub->add_option("--algorithm", opts.algorithm, "Recovery algorithm")
        ->check(CLI::IsMember({"standard", "segmented_1d", "auto"}));
  };

  auto* threshold = app.add_subcommand("threshold", "Print the information-theoretic threshold report");
  add_common(threshold);
  auto* sample = app.add_subcommand("sample", "Sample an instance and write it in text form");
  add_common(sample);
  add_seed(sample);
  auto* recover = app.add_subcommand("recover", "Run one recovery trial and print diagnostics");
  add_common(recover);
  add_seed(recover);
  add_algorithm(recover);
  auto* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo sweep and write CSV");
  add_common(sweep);
  add_seed(sweep);
  add_algorithm(sweep);
  sweep->add_option("--trials", opts.trials, "Trials per sweep point")->check(CLI::PositiveNumber);
  sweep->add_option("--threads", opts.threads, "Worker threads (0: hardware concurrency)");
  auto* validate = app.add_subcommand("validate", "Check family assumptions and relabeling symmetries");
  add_common(validate);
  add_algorithm(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*threshold) return cmd_threshold(opts);
    if (*sample) return cmd_sample(opts);
    if (*recover) return cmd_recover(opts);
    if (*sweep) return cmd_sweep(opts);
    if (*validate) return cmd_validate(opts);
  } catch (const ghcm::ConfigError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "runtime failure: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
