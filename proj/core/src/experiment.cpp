#include "semicyclic/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "semicyclic/error.hpp"
#include "semicyclic/logistic_task.hpp"
#include "semicyclic/sentiment140.hpp"

namespace semicyclic {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw_argument(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw_argument(fmt::format("config key '{}': {}", key, e.what()));
  }
}

json diurnal_to_json(const DiurnalSpec& d) {
  return {{"vocabulary", d.vocabulary},
          {"components", d.components},
          {"cycles", d.cycles},
          {"block_size", d.block_size},
          {"minibatch", d.minibatch},
          {"test_per_component", d.test_per_component},
          {"skew", d.skew.positive_rates},
          {"global_words", d.global_words},
          {"component_words", d.component_words},
          {"background_rate", d.background_rate},
          {"signal_on", d.signal_on},
          {"signal_off", d.signal_off},
          {"seed", d.seed}};
}

void diurnal_from_json(const json& j, DiurnalSpec& d) {
  reject_unknown(j, {"vocabulary", "components", "cycles", "block_size", "minibatch", "test_per_component",
                     "skew", "global_words", "component_words", "background_rate", "signal_on",
                     "signal_off", "seed"},
                 "task.diurnal");
  read(j, "vocabulary", d.vocabulary);
  read(j, "components", d.components);
  read(j, "cycles", d.cycles);
  read(j, "block_size", d.block_size);
  read(j, "minibatch", d.minibatch);
  read(j, "test_per_component", d.test_per_component);
  read(j, "skew", d.skew.positive_rates);
  read(j, "global_words", d.global_words);
  read(j, "component_words", d.component_words);
  read(j, "background_rate", d.background_rate);
  read(j, "signal_on", d.signal_on);
  read(j, "signal_off", d.signal_off);
  read(j, "seed", d.seed);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw_argument("repetitions must be >= 1");
  if (strategies.empty()) throw_argument("strategy list is empty");
  if (!(norm_bound > 0.0) || !(hedging_norm_bound > 0.0)) throw_argument("norm bounds must be positive");
  if (task.kind != "diurnal" && task.kind != "sentiment140" && task.kind != "dump") {
    throw_argument(fmt::format("unknown task kind '{}'", task.kind));
  }
  if (task.kind != "diurnal" && task.path.empty()) {
    throw_argument(fmt::format("task kind '{}' needs a path", task.kind));
  }
  if (task.minibatch < 1) throw_argument("minibatch must be >= 1");
  if (schedule) schedule->validate();
  for (const auto& [name, eta] : step_sizes) {
    parse_strategy(name);
    if (!(eta > 0.0)) throw_argument(fmt::format("step size for {} must be positive", name));
  }
  if (default_step && !(*default_step > 0.0)) throw_argument("default step must be positive");
  for (double eta : grid) {
    if (!(eta > 0.0)) throw_argument("grid values must be positive");
  }
  if (threads < 0) throw_argument("threads must be >= 0");
}

StepSize ExperimentConfig::step_for(StrategyKind kind) const {
  if (auto it = step_sizes.find(std::string(to_string(kind))); it != step_sizes.end()) {
    return StepSize::constant(it->second);
  }
  if (default_step) return StepSize::constant(*default_step);
  return StepSize::horizon_default();
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw_argument(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (root.is_object() && root.contains("config") && root.contains("manifest_version")) root = root.at("config");
  if (!root.is_object()) throw_argument("config must be a JSON object");
  reject_unknown(root, {"task", "schedule", "norm_bound", "projection", "hedging_norm_bound", "step_sizes",
                        "default_step", "strategies", "repetitions", "seed", "grid", "threads"},
                 "config");

  ExperimentConfig c;
  if (root.contains("task")) {
    const json& t = root.at("task");
    reject_unknown(t, {"kind", "scale", "path", "data_seed", "diurnal", "minibatch", "skew", "vocabulary"}, "task");
    read(t, "kind", c.task.kind);
    read(t, "scale", c.task.scale);
    c.task.diurnal = DiurnalSpec::preset(c.task.scale);
    c.task.minibatch = c.task.diurnal.minibatch;
    read(t, "path", c.task.path);
    if (t.contains("data_seed") && !t.at("data_seed").is_null()) c.task.data_seed = t.at("data_seed").get<std::uint64_t>();
    if (t.contains("diurnal")) diurnal_from_json(t.at("diurnal"), c.task.diurnal);
    c.task.minibatch = c.task.diurnal.minibatch;
    read(t, "minibatch", c.task.minibatch);
    read(t, "skew", c.task.skew);
    read(t, "vocabulary", c.task.vocabulary);
  }
  if (root.contains("schedule") && !root.at("schedule").is_null()) {
    const json& s = root.at("schedule");
    reject_unknown(s, {"cycles", "blocks", "block_size"}, "schedule");
    ScheduleConfig sc;
    read(s, "cycles", sc.cycles);
    read(s, "blocks", sc.blocks);
    read(s, "block_size", sc.block_size);
    c.schedule = sc;
  }
  read(root, "norm_bound", c.norm_bound);
  read(root, "projection", c.projection);
  read(root, "hedging_norm_bound", c.hedging_norm_bound);
  read(root, "step_sizes", c.step_sizes);
  if (root.contains("default_step") && !root.at("default_step").is_null()) c.default_step = root.at("default_step").get<double>();
  if (root.contains("strategies")) {
    c.strategies.clear();
    for (const auto& s : root.at("strategies")) c.strategies.push_back(parse_strategy(s.get<std::string>()));
  }
  read(root, "repetitions", c.repetitions);
  read(root, "seed", c.seed);
  read(root, "grid", c.grid);
  read(root, "threads", c.threads);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, fmt::format("cannot open config '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["task"] = {{"kind", c.task.kind},
               {"scale", c.task.scale},
               {"path", c.task.path},
               {"data_seed", c.task.data_seed ? json(*c.task.data_seed) : json(nullptr)},
               {"diurnal", diurnal_to_json(c.task.diurnal)},
               {"minibatch", c.task.minibatch},
               {"skew", c.task.skew},
               {"vocabulary", c.task.vocabulary}};
  j["schedule"] = c.schedule ? json{{"cycles", c.schedule->cycles},
                                    {"blocks", c.schedule->blocks},
                                    {"block_size", c.schedule->block_size}}
                             : json(nullptr);
  j["norm_bound"] = c.norm_bound;
  j["projection"] = c.projection;
  j["hedging_norm_bound"] = c.hedging_norm_bound;
  j["step_sizes"] = c.step_sizes;
  j["default_step"] = c.default_step ? json(*c.default_step) : json(nullptr);
  std::vector<std::string> names;
  for (auto s : c.strategies) names.emplace_back(to_string(s));
  j["strategies"] = names;
  j["repetitions"] = c.repetitions;
  j["seed"] = c.seed;
  j["grid"] = c.grid;
  j["threads"] = c.threads;
  return j.dump(2);
}

ExperimentConfig resolve(ExperimentConfig c) {
  if (!c.task.data_seed) c.task.data_seed = c.seed;
  c.task.diurnal.seed = *c.task.data_seed;
  if (c.task.kind == "diurnal") c.task.diurnal.minibatch = c.task.minibatch;
  if (!c.schedule && c.task.kind == "diurnal") {
    c.schedule = ScheduleConfig{c.task.diurnal.cycles, c.task.diurnal.components, c.task.diurnal.block_size};
  }
  return c;
}

std::shared_ptr<const Dataset> build_dataset(const ExperimentConfig& c) {
  if (c.task.kind == "diurnal") return synthesize_diurnal_dataset(c.task.diurnal);
  if (c.task.kind == "dump") return std::make_shared<Dataset>(read_dump_file(c.task.path));
  IngestOptions options;
  options.vocabulary = c.task.vocabulary;
  options.split_seed = c.task.data_seed.value_or(c.seed);
  options.components = c.schedule ? c.schedule->blocks : 6;
  if (c.task.skew) options.skew = SkewSpec::interpolated(options.components);
  return std::make_shared<Dataset>(ingest_sentiment140(c.task.path, options).data);
}

ScoreRule score_rule(StrategyKind kind) {
  return kind == StrategyKind::kConsensus || kind == StrategyKind::kIid ? ScoreRule::kAll : ScoreRule::kDiagonal;
}

std::vector<double> component_scores(const Matrix& a, ScoreRule rule) {
  const std::size_t m = a.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (rule == ScoreRule::kDiagonal) {
      out[j] = a[j][j];
    } else {
      for (std::size_t i = 0; i < m; ++i) out[j] += a[i][j];
      out[j] /= static_cast<double>(m);
    }
  }
  return out;
}

double matrix_score(const Matrix& a, ScoreRule rule) {
  const auto scores = component_scores(a, rule);
  double total = 0.0;
  for (double s : scores) total += s;
  return total / static_cast<double>(scores.size());
}

namespace {

struct Context {
  const ExperimentConfig& config;
  const ScheduleConfig& schedule;
  const LogisticTask& task;
  const LogisticTask* hedge_task;
};

std::vector<Matrix> evaluate(const LogisticTask& task, const BlockCheckpoints& checkpoints) {
  std::vector<Matrix> days;
  for (const auto& day : checkpoints) {
    Matrix a;
    for (const auto& w : day) a.push_back(component_accuracies(task, w));
    days.push_back(std::move(a));
  }
  return days;
}

RepetitionResult run_repetition(const Context& ctx, int r) {
  RepetitionResult out;
  out.repetition = r;
  const Rng rep = Rng(ctx.config.seed).split(1000 + static_cast<std::uint64_t>(r));
  const auto cyclic = block_cyclic_stream(ctx.task, ctx.schedule, rep.split(1));
  const auto shuffled = shuffled_stream(cyclic, ctx.schedule, rep.split(2));
  out.cyclic_stream_hash = stream_content_hash(cyclic);
  out.iid_stream_hash = stream_content_hash(shuffled);
  if (out.cyclic_stream_hash != out.iid_stream_hash) {
    throw_contract("shuffled stream does not consume the same examples as the cyclic stream");
  }

  for (auto kind : ctx.config.strategies) {
    StrategyRun run;
    run.strategy = kind;
    SgdConfig sgd;
    sgd.norm_bound = ctx.config.norm_bound;
    sgd.use_projection = ctx.config.projection;
    sgd.step_size = ctx.config.step_for(kind);
    ReplaySource source(kind == StrategyKind::kIid ? shuffled : cyclic);
    const long horizon = kind == StrategyKind::kPerComponent || kind == StrategyKind::kPluralisticHedging
                             ? ctx.schedule.steps_per_block()
                             : ctx.schedule.total_steps();
    switch (kind) {
      case StrategyKind::kConsensus:
        run.days = evaluate(ctx.task, run_consensus(ctx.task, ctx.schedule, sgd, source).block_ends);
        break;
      case StrategyKind::kIid:
        run.days = evaluate(ctx.task, run_iid(ctx.task, ctx.schedule, sgd, source).block_ends);
        break;
      case StrategyKind::kPluralisticAveraging:
        run.days = evaluate(ctx.task, run_pluralistic_averaging(ctx.task, ctx.schedule, sgd, source).run.block_ends);
        break;
      case StrategyKind::kPerComponent:
        run.days = evaluate(ctx.task, run_per_component(ctx.task, ctx.schedule, sgd, source).daily);
        break;
      case StrategyKind::kPluralisticHedging: {
        sgd.norm_bound = ctx.config.hedging_norm_bound;
        sgd.use_projection = true;
        auto hedge = run_pluralistic_hedging(*ctx.hedge_task, ctx.schedule, sgd, source, rep.split(3));
        run.warnings = hedge.warnings;
        run.days = evaluate(*ctx.hedge_task, hedge.daily);
        break;
      }
    }
    run.step_size = sgd.step_size.resolve(sgd.norm_bound, horizon);
    for (const auto& a : run.days) run.day_scores.push_back(matrix_score(a, score_rule(kind)));
    out.runs.push_back(std::move(run));
  }
  out.ok = true;
  return out;
}

}  // namespace

EvaluationReport run_experiment(const ExperimentConfig& config) {
  const ExperimentConfig resolved = resolve(config);
  resolved.validate();
  return run_experiment(resolved, build_dataset(resolved));
}

EvaluationReport run_experiment(const ExperimentConfig& config, std::shared_ptr<const Dataset> data) {
  EvaluationReport report;
  report.config = resolve(config);
  const ExperimentConfig& c = report.config;
  c.validate();
  if (!c.schedule) {
    const long per_component = static_cast<long>(data->train.size()) / std::max(1, data->components);
    report.config.schedule = ScheduleConfig{10, data->components, std::max(1L, per_component / (10L * c.task.minibatch))};
  }
  const ScheduleConfig schedule = *report.config.schedule;
  schedule.validate();

  LogisticOptions options;
  options.minibatch = c.task.minibatch;
  options.norm_bound = c.norm_bound;
  const LogisticTask task(data, options);
  if (schedule.blocks != task.num_components()) {
    throw_argument(fmt::format("schedule has {} blocks, data has {} components", schedule.blocks, task.num_components()));
  }
  std::optional<LogisticTask> hedge_task;
  if (std::find(c.strategies.begin(), c.strategies.end(), StrategyKind::kPluralisticHedging) != c.strategies.end()) {
    LogisticOptions bounded = options;
    bounded.unit_norm = true;
    bounded.normalize_loss = true;
    bounded.norm_bound = c.hedging_norm_bound;
    hedge_task.emplace(data, bounded);
  }
  for (int i = 0; i < data->components; ++i) {
    report.realized_train_rates.push_back(positive_rate(data->train, i));
    report.realized_test_rates.push_back(positive_rate(data->test, i));
  }

  const Context ctx{c, schedule, task, hedge_task ? &*hedge_task : nullptr};
  report.repetitions.resize(static_cast<std::size_t>(c.repetitions));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(c.repetitions));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < c.repetitions; r = next++) {
      auto& slot = report.repetitions[static_cast<std::size_t>(r)];
      try {
        slot = run_repetition(ctx, r);
      } catch (const std::exception& e) {
        slot = RepetitionResult{};
        slot.repetition = r;
        slot.error = e.what();
        failures[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  int threads = c.threads > 0 ? c.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, c.repetitions);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const bool any_ok = std::any_of(report.repetitions.begin(), report.repetitions.end(),
                                  [](const RepetitionResult& r) { return r.ok; });
  if (!any_ok) std::rethrow_exception(failures.front());

  const std::size_t strategies = c.strategies.size();
  report.aggregate.assign(strategies, std::vector<DayStat>(static_cast<std::size_t>(schedule.cycles)));
  for (std::size_t s = 0; s < strategies; ++s) {
    for (std::size_t k = 0; k < static_cast<std::size_t>(schedule.cycles); ++k) {
      std::vector<double> xs;
      for (const auto& rep : report.repetitions) {
        if (rep.ok) xs.push_back(rep.runs[s].day_scores[k]);
      }
      DayStat& stat = report.aggregate[s][k];
      stat.count = static_cast<int>(xs.size());
      for (double x : xs) stat.mean += x;
      stat.mean /= static_cast<double>(xs.size());
      if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - stat.mean) * (x - stat.mean);
        stat.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
      }
    }
  }
  return report;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw_argument("log grid needs 0 < lo <= hi and points >= 1");
  std::vector<double> out;
  for (int k = 0; k < points; ++k) {
    const double f = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    out.push_back(std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
  }
  return out;
}

GridResult grid_search_learning_rate(const ExperimentConfig& config, std::vector<double> grid) {
  if (grid.empty()) throw_argument("learning-rate grid is empty");
  for (double eta : grid) {
    if (!(eta > 0.0)) throw_argument("learning-rate grid values must be positive");
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  ExperimentConfig base = resolve(config);
  base.validate();
  const auto data = build_dataset(base);
  GridResult result;
  std::map<std::string, std::size_t> best_row;
  for (double eta : grid) {
    ExperimentConfig c = base;
    c.step_sizes.clear();
    c.default_step = eta;
    const auto report = run_experiment(c, data);
    for (std::size_t s = 0; s < c.strategies.size(); ++s) {
      const DayStat& last = report.aggregate[s].back();
      result.table.push_back({c.strategies[s], eta, last.mean, last.stddev, false});
      const std::string name(to_string(c.strategies[s]));
      auto it = best_row.find(name);
      // ascending grid: only a strictly better score moves the choice up
      if (it == best_row.end() || last.mean > result.table[it->second].final_mean) {
        best_row[name] = result.table.size() - 1;
      }
    }
  }
  for (const auto& [name, row] : best_row) {
    result.table[row].selected = true;
    result.best[name] = result.table[row].step_size;
  }
  return result;
}

}  // namespace semicyclic
