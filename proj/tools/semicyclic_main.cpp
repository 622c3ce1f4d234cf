// semicyclic: command-line front end for the block-cyclic SGD simulator.
//
// Exit codes: 0 ok, 1 a verification check failed, 2 argument, 3 contract,
// 4 diverged, 5 solver, 6 ingestion, 7 io, 10 internal. Failures print one
// line "error: category=<name> code=<n> message=<text>" on stderr.

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "semicyclic/diurnal.hpp"
#include "semicyclic/error.hpp"
#include "semicyclic/experiment.hpp"
#include "semicyclic/hard_instance.hpp"
#include "semicyclic/prod.hpp"
#include "semicyclic/report.hpp"
#include "semicyclic/rng.hpp"
#include "semicyclic/sentiment140.hpp"

namespace sc = semicyclic;

namespace {

constexpr int kCheckFailed = 1;
constexpr int kInternal = 10;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::string out;
  std::string config;
  std::optional<std::string> scale;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--reps", c.reps, "repetitions")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory")->required();
  auto* config = cmd->add_option("--config", c.config, "experiment config (JSON) or a run manifest");
  if (needs_config) config->check(CLI::ExistingFile);
  cmd->add_option("--scale", c.scale, "task preset")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

sc::ExperimentConfig experiment_config(const Common& c) {
  sc::ExperimentConfig config = c.config.empty() ? sc::ExperimentConfig{} : sc::load_experiment_config(c.config);
  if (c.scale) {
    config.task.scale = *c.scale;
    config.task.diurnal = sc::DiurnalSpec::preset(*c.scale);
    config.task.minibatch = config.task.diurnal.minibatch;
    if (config.task.kind == "diurnal") config.schedule.reset();
  }
  if (c.seed) {
    // a new seed regenerates the data too unless the config pins data_seed
    if (config.task.data_seed && *config.task.data_seed == config.seed) config.task.data_seed.reset();
    config.seed = *c.seed;
  }
  if (c.reps) config.repetitions = *c.reps;
  if (c.threads) config.threads = *c.threads;
  config.validate();
  return sc::resolve(config);
}

int cmd_simulate(const Common& c) {
  const auto config = experiment_config(c);
  const auto report = sc::run_experiment(config);
  const auto emitted = sc::emit_report(report, c.out);
  const auto& agg = report.aggregate;
  fmt::print("{:<14} {:>10} {:>10}\n", "strategy", "final", "stddev");
  for (std::size_t s = 0; s < report.config.strategies.size(); ++s) {
    fmt::print("{:<14} {:>10.4f} {:>10.4f}\n", sc::to_string(report.config.strategies[s]), agg[s].back().mean,
               agg[s].back().stddev);
  }
  int failed = 0;
  for (const auto& rep : report.repetitions) {
    if (!rep.ok) {
      ++failed;
      fmt::print(stderr, "repetition {} failed: {}\n", rep.repetition, rep.error);
    }
  }
  fmt::print("manifest: {}\n", emitted.manifest_path);
  return failed > 0 ? kCheckFailed : 0;
}

int cmd_grid(const Common& c, std::vector<double> grid, double lo, double hi, int points) {
  const auto config = experiment_config(c);
  if (grid.empty()) grid = config.grid;
  if (grid.empty()) grid = sc::log_grid(lo, hi, points);
  const auto result = sc::grid_search_learning_rate(config, grid);
  const auto emitted = sc::emit_grid(result, config, c.out);
  for (const auto& e : result.table) {
    fmt::print("{:<14} eta={:<10.4g} final={:.4f} +/- {:.4f}{}\n", sc::to_string(e.strategy), e.step_size,
               e.final_mean, e.final_stddev, e.selected ? "  *" : "");
  }
  fmt::print("manifest: {}\n", emitted.manifest_path);
  return 0;
}

int cmd_hardcase(const Common& c, const std::string& variant, std::vector<long> cycles, int blocks, long block_size,
                 double bound) {
  bool all_passed = true;
  for (long k : cycles) {
    sc::HardInstanceConfig config;
    config.variant = sc::parse_hard_variant(variant);
    config.cycles = k;
    config.blocks = blocks;
    config.block_size = block_size;
    config.norm_bound = bound;
    sc::StallOptions options;
    options.seed = c.seed.value_or(0);
    if (c.reps) options.iid_repetitions = *c.reps;
    const auto r = sc::stall_demo(config, options);
    const std::string dir = cycles.size() == 1 ? c.out : fmt::format("{}/K{}", c.out, k);
    sc::emit_stall_report(r, options.seed, dir);
    fmt::print("K={} {}: F*={:.6g} restricted={:.6g} gap={:.6g} (floor {:.6g}, {}) excess last={:.6g} avg={:.6g} "
               "span leak={:.3g} iid excess last={:.6g}\n",
               k, variant, r.full_optimum, r.restricted_optimum, r.restricted_gap, r.gap_constant,
               r.gap_check_passed ? "ok" : "BELOW", r.excess_last, r.excess_average, r.max_span_leak,
               r.iid_mean_excess_last);
    for (const auto& note : r.notes) fmt::print("  note: {}\n", note);
    // the smooth variant's floor is reported, not enforced
    if (config.variant == sc::HardVariant::kLipschitz && !r.gap_check_passed) all_passed = false;
    if (r.max_span_leak >= 1e-9) all_passed = false;
  }
  return all_passed ? 0 : kCheckFailed;
}

// Random bounded loss sequences: uniform noise, a consistently better expert,
// and regime switches, over K in {1, 2, 4} experts besides the anchor.
std::vector<std::vector<double>> random_losses(sc::Rng& rng, int experts, long horizon, int pattern) {
  std::vector<std::vector<double>> losses(static_cast<std::size_t>(horizon), std::vector<double>(experts + 1));
  const long period = 1 + static_cast<long>(rng.uniform_index(500));
  const int favourite = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(experts + 1)));
  for (long t = 0; t < horizon; ++t) {
    for (int j = 0; j <= experts; ++j) {
      double l = rng.uniform(-1.0, 1.0);
      if (pattern == 1) l = j == favourite ? rng.uniform(-1.0, 0.0) : rng.uniform(0.0, 1.0);
      if (pattern == 2) l = ((t / period) % 2 == 0) == (j == 0) ? -1.0 : 1.0;
      losses[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = l;
    }
  }
  return losses;
}

int cmd_prodtest(const Common& c, long horizon) {
  const int runs = c.reps.value_or(1000);
  sc::Rng rng = sc::Rng(c.seed.value_or(0)).split(11);
  const double M = 1.0;
  long anchor_violations = 0, expert_violations = 0;
  double worst_anchor_margin = -1e300, worst_expert_margin = -1e300;
  std::string csv = "run,experts,pattern,anchor_regret,anchor_bound,max_expert_regret,expert_bound\n";
  for (int r = 0; r < runs; ++r) {
    const int experts = std::array<int, 3>{1, 2, 4}[static_cast<std::size_t>(r % 3)];
    const int pattern = (r / 3) % 3;
    const auto losses = random_losses(rng, experts, horizon, pattern);

    const double anchor_rate = 1.0 / (4.0 * M);
    const auto a = sc::run_prod(losses, anchor_rate, M);
    const double anchor_bound = sc::prod_anchor_regret_bound(anchor_rate);
    if (a.regret[0] > anchor_bound) ++anchor_violations;
    worst_anchor_margin = std::max(worst_anchor_margin, a.regret[0] - anchor_bound);

    const double rate = sc::prod_corollary_rate(M, experts, horizon);
    const auto b = sc::run_prod(losses, rate, M);
    const double expert_bound = sc::prod_expert_regret_bound(rate, M, experts, horizon);
    double worst = -1e300;
    for (int j = 1; j <= experts; ++j) worst = std::max(worst, b.regret[static_cast<std::size_t>(j)]);
    if (worst > expert_bound) ++expert_violations;
    worst_expert_margin = std::max(worst_expert_margin, worst - expert_bound);
    csv += fmt::format("{},{},{},{},{},{},{}\n", r, experts, pattern, sc::format_double(a.regret[0]),
                       sc::format_double(anchor_bound), sc::format_double(worst), sc::format_double(expert_bound));
  }

  long lemma_violations = 0;
  const long grid = 100000;
  for (long k = 0; k < grid; ++k) {
    const double z = -0.499 + (10.0 + 0.499) * static_cast<double>(k + 1) / static_cast<double>(grid);
    const double l = std::log1p(z);
    if (z - z * z > l + 1e-12 || l > z + 1e-12) ++lemma_violations;
  }

  sc::write_file(c.out + "/prod.csv", csv);
  const std::string summary = fmt::format(
      "check,runs,violations\nanchor,{},{}\nexpert,{},{}\nlog_lemma,{},{}\n", runs, anchor_violations, runs,
      expert_violations, grid, lemma_violations);
  sc::write_file(c.out + "/prod_summary.csv", summary);
  sc::write_manifest(c.out, "prodtest", c.seed.value_or(0),
                     fmt::format(R"({{"runs": {}, "horizon": {}, "loss_bound": 1}})", runs, horizon),
                     {{"prod.csv", sc::fnv1a(csv)}, {"prod_summary.csv", sc::fnv1a(summary)}});
  fmt::print("anchor bound: {}/{} violations (worst margin {:.3g})\n", anchor_violations, runs, worst_anchor_margin);
  fmt::print("expert bound: {}/{} violations (worst margin {:.3g})\n", expert_violations, runs, worst_expert_margin);
  fmt::print("log lemma:    {}/{} violations\n", lemma_violations, grid);
  return anchor_violations + expert_violations + lemma_violations == 0 ? 0 : kCheckFailed;
}

int cmd_ingest(const Common& c, const std::string& input, bool no_skew, int vocabulary) {
  sc::IngestOptions options;
  options.split_seed = c.seed.value_or(0);
  options.vocabulary = vocabulary;
  if (!no_skew) options.skew = sc::SkewSpec::interpolated(options.components);
  const auto result = sc::ingest_sentiment140(input, options);
  std::ostringstream dump;
  sc::write_dump(result.data, dump);
  sc::write_file(c.out + "/dataset.txt", dump.str());
  const auto& r = result.report;
  std::string csv = "component,train,test,train_positive_rate\n";
  for (std::size_t i = 0; i < r.train_counts.size(); ++i) {
    csv += fmt::format("{},{},{},{}\n", i + 1, r.train_counts[i], r.test_counts[i],
                       sc::format_double(r.train_positive_rates[i]));
  }
  sc::write_file(c.out + "/components.csv", csv);
  const std::string details = fmt::format(
      R"({{"rows": {}, "malformed": {}, "bad_dates": {}, "kept": {}, "skip_rate": {}, "dropped_for_skew": {}, "trimmed_for_balance": {}}})",
      r.rows, r.malformed, r.bad_dates, r.kept, sc::format_double(r.skip_rate), r.dropped_for_skew,
      r.trimmed_for_balance);
  sc::write_manifest(c.out, "ingest", options.split_seed,
                     fmt::format(R"({{"input": "{}", "vocabulary": {}, "skew": {}}})", input, vocabulary,
                                 no_skew ? "false" : "true"),
                     {{"dataset.txt", sc::fnv1a(dump.str())}, {"components.csv", sc::fnv1a(csv)}}, details);
  fmt::print("rows={} kept={} malformed={} bad_dates={} vocabulary={}\n", r.rows, r.kept, r.malformed, r.bad_dates,
             result.data.vocabulary.size());
  return 0;
}

void report_error(std::string_view category, int code, std::string_view message) {
  std::string flat(message);
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  fmt::print(stderr, "error: category={} code={} message={}\n", category, code, flat);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-cyclic SGD simulator"};
  app.require_subcommand(1);

  Common simulate_opts, grid_opts, hard_opts, prod_opts, ingest_opts;
  auto* simulate = app.add_subcommand("simulate", "run an experiment config");
  add_common(simulate, simulate_opts, true);

  auto* grid = app.add_subcommand("grid", "log-spaced learning-rate search");
  add_common(grid, grid_opts, true);
  std::vector<double> grid_values;
  double grid_lo = 0.01, grid_hi = 10.0;
  int grid_points = 7;
  grid->add_option("--values", grid_values, "explicit step sizes");
  grid->add_option("--lo", grid_lo, "smallest step size");
  grid->add_option("--hi", grid_hi, "largest step size");
  grid->add_option("--points", grid_points, "grid points")->check(CLI::PositiveNumber);

  auto* hard = app.add_subcommand("hardcase", "stall demonstration on the two-example hard instance");
  add_common(hard, hard_opts, false);
  std::string variant = "lipschitz";
  std::vector<long> cycles{2, 4};
  int blocks = 2;
  long block_size = 500;
  double bound = 1.0;
  hard->add_option("--variant", variant)->check(CLI::IsMember({"lipschitz", "smooth"}));
  hard->add_option("--cycles", cycles, "one or more K values")->check(CLI::PositiveNumber);
  hard->add_option("--blocks", blocks)->check(CLI::Range(2, 1 << 20));
  hard->add_option("--block-size", block_size)->check(CLI::PositiveNumber);
  hard->add_option("--bound", bound, "norm bound B")->check(CLI::PositiveNumber);

  auto* prod = app.add_subcommand("prodtest", "Prod regret battery");
  add_common(prod, prod_opts, false);
  long horizon = 10000;
  prod->add_option("--horizon", horizon)->check(CLI::PositiveNumber);

  auto* ingest = app.add_subcommand("ingest", "Sentiment140 CSV to canonical dump");
  add_common(ingest, ingest_opts, false);
  std::string input;
  bool no_skew = false;
  int vocabulary = 1024;
  ingest->add_option("--input", input)->required()->check(CLI::ExistingFile);
  ingest->add_flag("--no-skew", no_skew, "keep the natural label balance");
  ingest->add_option("--vocabulary", vocabulary)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("argument", sc::exit_code(sc::ErrorCategory::kArgument), e.what());
    return sc::exit_code(sc::ErrorCategory::kArgument);
  }

  try {
    if (*simulate) return cmd_simulate(simulate_opts);
    if (*grid) return cmd_grid(grid_opts, grid_values, grid_lo, grid_hi, grid_points);
    if (*hard) return cmd_hardcase(hard_opts, variant, cycles, blocks, block_size, bound);
    if (*prod) return cmd_prodtest(prod_opts, horizon);
    if (*ingest) return cmd_ingest(ingest_opts, input, no_skew, vocabulary);
  } catch (const sc::Error& e) {
    const int code = sc::exit_code(e.category());
    report_error(sc::to_string(e.category()), code, e.what());
    return code;
  } catch (const std::exception& e) {
    report_error("internal", kInternal, e.what());
    return kInternal;
  }
  return 0;
}
