#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semicyclic/dataset.hpp"
#include "semicyclic/diurnal.hpp"
#include "semicyclic/schedule.hpp"
#include "semicyclic/strategies.hpp"

namespace semicyclic {

struct TaskConfig {
  std::string kind = "diurnal";  // diurnal | sentiment140 | dump
  std::string scale = "desk";    // diurnal preset
  std::string path;              // input file for sentiment140 / dump
  std::optional<std::uint64_t> data_seed;  // defaults to the experiment seed
  DiurnalSpec diurnal = DiurnalSpec::desk();
  int minibatch = 128;
  bool skew = true;              // sentiment140: apply the label-drop re-skew
  int vocabulary = 1024;         // sentiment140
};

struct ExperimentConfig {
  TaskConfig task;
  std::optional<ScheduleConfig> schedule;  // unset: derived from the task
  double norm_bound = 100.0;
  bool projection = true;
  double hedging_norm_bound = 4.0;  // hedging runs on a unit-norm, bounded-loss view
  std::map<std::string, double> step_sizes;  // per strategy name
  std::optional<double> default_step;        // unset: B / sqrt(2 horizon)
  std::vector<StrategyKind> strategies = {StrategyKind::kConsensus, StrategyKind::kPerComponent,
                                          StrategyKind::kPluralisticAveraging, StrategyKind::kIid};
  int repetitions = 10;
  std::uint64_t seed = 0;
  std::vector<double> grid;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
  StepSize step_for(StrategyKind kind) const;
};

/// Accepts a bare config object or a run manifest (whose "config" member is
/// used). Unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::string& path);
/// Fully resolved, canonical JSON (sorted keys, every field explicit).
std::string config_to_json(const ExperimentConfig& config);
/// Fills schedule and data seed from the task so the config is self-contained.
ExperimentConfig resolve(ExperimentConfig config);

std::shared_ptr<const Dataset> build_dataset(const ExperimentConfig& resolved);

/// Checkpoint-vs-test-component accuracies: matrix[i][j] = accuracy on test
/// component j of the model checkpointed at the end of block i.
using Matrix = std::vector<std::vector<double>>;

enum class ScoreRule { kAll, kDiagonal };
ScoreRule score_rule(StrategyKind kind);
/// Per-test-component metric under the rule: column means or the diagonal.
std::vector<double> component_scores(const Matrix& matrix, ScoreRule rule);
double matrix_score(const Matrix& matrix, ScoreRule rule);

struct StrategyRun {
  StrategyKind strategy = StrategyKind::kConsensus;
  double step_size = 0.0;
  std::vector<Matrix> days;       // one matrix per cycle
  std::vector<double> day_scores;
  std::vector<std::string> warnings;
};

struct RepetitionResult {
  int repetition = 0;
  bool ok = false;
  std::string error;
  std::uint64_t cyclic_stream_hash = 0;
  std::uint64_t iid_stream_hash = 0;
  std::vector<StrategyRun> runs;  // in config.strategies order
};

struct DayStat {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

struct EvaluationReport {
  ExperimentConfig config;  // resolved
  std::vector<RepetitionResult> repetitions;
  /// aggregate[s][k] over successful repetitions
  std::vector<std::vector<DayStat>> aggregate;
  std::vector<double> realized_train_rates;
  std::vector<double> realized_test_rates;
};

/// Trains every strategy on every repetition and evaluates the checkpoint
/// matrices. Repetitions run concurrently; each draws from
/// Rng(seed).split(1000 + r). Throws only when every repetition fails.
EvaluationReport run_experiment(const ExperimentConfig& config);
EvaluationReport run_experiment(const ExperimentConfig& config, std::shared_ptr<const Dataset> data);

struct GridEntry {
  StrategyKind strategy = StrategyKind::kConsensus;
  double step_size = 0.0;
  double final_mean = 0.0;
  double final_stddev = 0.0;
  bool selected = false;
};

struct GridResult {
  std::vector<GridEntry> table;
  std::map<std::string, double> best;
};

/// Runs the experiment once per grid point (every strategy at that step
/// size) and keeps, per strategy, the step size with the best final-day
/// mean score; ties go to the smaller step size.
GridResult grid_search_learning_rate(const ExperimentConfig& config, std::vector<double> grid);
/// log-spaced grid lo .. hi with `points` entries
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace semicyclic
