#include "semicyclic/strategies.hpp"

#include <array>

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kConsensus:
      return "consensus";
    case StrategyKind::kPerComponent:
      return "per_component";
    case StrategyKind::kPluralisticAveraging:
      return "pluralistic";
    case StrategyKind::kPluralisticHedging:
      return "hedging";
    case StrategyKind::kIid:
      return "iid";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  for (auto kind : {StrategyKind::kConsensus, StrategyKind::kPerComponent,
                    StrategyKind::kPluralisticAveraging, StrategyKind::kPluralisticHedging,
                    StrategyKind::kIid}) {
    if (name == to_string(kind)) return kind;
  }
  throw_argument(fmt::format("unknown strategy '{}'", name));
}

namespace {

void check_shapes(const StochasticProblem& problem, const ScheduleConfig& schedule) {
  schedule.validate();
  if (schedule.blocks != problem.num_components()) {
    throw_argument(fmt::format("schedule has {} blocks but problem has {} components",
                               schedule.blocks, problem.num_components()));
  }
}

enum class Accounting { kSchedule, kSampleComponent };

ConsensusResult run_single_chain(const StochasticProblem& problem, const ScheduleConfig& schedule,
                                 const SgdConfig& config, SampleSource& source,
                                 Accounting accounting) {
  check_shapes(problem, schedule);
  ConsensusResult result;
  result.chain =
      make_chain(problem.dimension(), schedule.blocks, config, schedule.total_steps());
  result.block_ends.assign(static_cast<std::size_t>(schedule.cycles), {});
  long t = 0;
  for (long k = 0; k < schedule.cycles; ++k) {
    auto& day = result.block_ends[static_cast<std::size_t>(k)];
    day.reserve(static_cast<std::size_t>(schedule.blocks));
    for (int i = 0; i < schedule.blocks; ++i) {
      for (long j = 0; j < schedule.block_size; ++j) {
        const Sample z = source.next(++t, i);
        const int block = accounting == Accounting::kSchedule ? i : z.component;
        step(result.chain, z, block, config, problem);
      }
      day.push_back(result.chain.iterate);
    }
  }
  result.final_iterate = result.chain.iterate;
  result.full_average = full_average(result.chain);
  return result;
}

PluralisticModel block_averages(const ChainState& chain, Provenance provenance) {
  PluralisticModel model;
  model.provenance = provenance;
  for (int i = 0; i < chain.blocks(); ++i) model.per_component.push_back(block_average(chain, i));
  return model;
}

}  // namespace

ConsensusResult run_consensus(const StochasticProblem& problem, const ScheduleConfig& schedule,
                              const SgdConfig& config, SampleSource& source) {
  return run_single_chain(problem, schedule, config, source, Accounting::kSchedule);
}

ConsensusResult run_consensus(const StochasticProblem& problem, const ScheduleConfig& schedule,
                              const SgdConfig& config, std::uint64_t seed) {
  BlockCyclicSource source(problem, Rng(seed).split(kSampleStream));
  return run_consensus(problem, schedule, config, source);
}

ConsensusResult run_iid(const StochasticProblem& problem, const ScheduleConfig& schedule,
                        const SgdConfig& config, SampleSource& source) {
  return run_single_chain(problem, schedule, config, source, Accounting::kSampleComponent);
}

ConsensusResult run_iid(const StochasticProblem& problem, const ScheduleConfig& schedule,
                        const SgdConfig& config, std::uint64_t seed) {
  IidSource source(problem, Rng(seed).split(kSampleStream));
  return run_iid(problem, schedule, config, source);
}

PerComponentResult run_per_component(const StochasticProblem& problem,
                                     const ScheduleConfig& schedule, const SgdConfig& config,
                                     SampleSource& source) {
  check_shapes(problem, schedule);
  const int m = schedule.blocks;
  PerComponentResult result;
  result.chains.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    result.chains.push_back(
        make_chain(problem.dimension(), m, config, schedule.steps_per_block()));
  }
  result.daily.assign(static_cast<std::size_t>(schedule.cycles), {});
  long t = 0;
  for (long k = 0; k < schedule.cycles; ++k) {
    auto& day = result.daily[static_cast<std::size_t>(k)];
    for (int i = 0; i < m; ++i) {
      auto& chain = result.chains[static_cast<std::size_t>(i)];
      for (long j = 0; j < schedule.block_size; ++j) {
        step(chain, source.next(++t, i), i, config, problem);
      }
      day.push_back(chain.iterate);
    }
  }
  result.model.provenance = {StrategyKind::kPerComponent, schedule, 0};
  for (int i = 0; i < m; ++i) {
    result.model.per_component.push_back(block_average(result.chains[static_cast<std::size_t>(i)], i));
  }
  return result;
}

PerComponentResult run_per_component(const StochasticProblem& problem,
                                     const ScheduleConfig& schedule, const SgdConfig& config,
                                     std::uint64_t seed) {
  BlockCyclicSource source(problem, Rng(seed).split(kSampleStream));
  auto result = run_per_component(problem, schedule, config, source);
  result.model.provenance.seed = seed;
  return result;
}

PluralisticResult run_pluralistic_averaging(const StochasticProblem& problem,
                                            const ScheduleConfig& schedule,
                                            const SgdConfig& config, SampleSource& source) {
  PluralisticResult result;
  result.run = run_consensus(problem, schedule, config, source);
  result.model = block_averages(result.run.chain, {StrategyKind::kPluralisticAveraging, schedule, 0});
  return result;
}

PluralisticResult run_pluralistic_averaging(const StochasticProblem& problem,
                                            const ScheduleConfig& schedule,
                                            const SgdConfig& config, std::uint64_t seed) {
  BlockCyclicSource source(problem, Rng(seed).split(kSampleStream));
  auto result = run_pluralistic_averaging(problem, schedule, config, source);
  result.model.provenance.seed = seed;
  return result;
}

HedgeResult run_pluralistic_hedging(const StochasticProblem& problem,
                                    const ScheduleConfig& schedule, const SgdConfig& config,
                                    SampleSource& source, Rng coins,
                                    const HedgeOptions& options) {
  check_shapes(problem, schedule);
  const int m = schedule.blocks;
  const double bound = config.norm_bound;
  const long total = schedule.total_steps();

  HedgeResult result;
  if (problem.loss_bound(bound) > bound * (1.0 + 1e-12)) {
    throw_contract(fmt::format(
        "hedging requires |f| <= B on the B-ball; problem certifies only {} for B = {}",
        problem.loss_bound(bound), bound));
  }
  if (static_cast<double>(m) >
      bound * bound * static_cast<double>(schedule.steps_per_block())) {
    result.warnings.push_back(fmt::format("m = {} exceeds B^2 K n = {}; the consensus guarantee "
                                          "of hedging does not apply",
                                          m, bound * bound * schedule.steps_per_block()));
  }

  HedgeState& state = result.state;
  state.rate = options.rate ? *options.rate : hedging_rate(bound, total, m);
  if (!options.rate && state.rate > 0.25 / bound) {
    // short horizons push the default rate past the Prod precondition
    result.warnings.push_back(fmt::format("hedging rate {} exceeds 1/(4B) = {} at T/m = {}; capped",
                                          state.rate, 0.25 / bound, schedule.steps_per_block()));
    state.rate = 0.25 / bound;
  }
  state.full_chain = make_chain(problem.dimension(), m, config, total);
  for (int i = 0; i < m; ++i) {
    state.component_chains.push_back(
        make_chain(problem.dimension(), m, config, schedule.steps_per_block()));
    state.weights.emplace_back(1, state.rate, bound);
  }
  state.mixed_block_sums.assign(static_cast<std::size_t>(m), Vector::Zero(problem.dimension()));
  state.mixed_block_counts.assign(static_cast<std::size_t>(m), 0);
  result.stats.assign(static_cast<std::size_t>(m), {});
  result.daily.assign(static_cast<std::size_t>(schedule.cycles), {});

  long t = 0;
  for (long k = 0; k < schedule.cycles; ++k) {
    for (int i = 0; i < m; ++i) {
      const auto bi = static_cast<std::size_t>(i);
      auto& component_chain = state.component_chains[bi];
      auto& prod = state.weights[bi];
      auto& stats = result.stats[bi];
      for (long j = 0; j < schedule.block_size; ++j) {
        const Sample z = source.next(++t, i);
        const double p = prod.probability_against_anchor(1);
        const bool pick_component = coins.bernoulli(p);
        state.mixed_block_sums[bi] +=
            pick_component ? component_chain.iterate : state.full_chain.iterate;
        state.mixed_block_counts[bi] += 1;

        // both losses are taken at the pre-update iterates
        const double full_loss = step(state.full_chain, z, i, config, problem);
        const double component_loss = step(component_chain, z, i, config, problem);
        const std::array<double, 2> losses{full_loss, component_loss};
        prod.update(losses);

        stats.full_chain_loss += full_loss;
        stats.component_chain_loss += component_loss;
        stats.expected_loss += p * component_loss + (1.0 - p) * full_loss;
        stats.realized_loss += pick_component ? component_loss : full_loss;
        stats.component_choices += pick_component ? 1 : 0;
        stats.steps += 1;
      }
      result.daily[static_cast<std::size_t>(k)].push_back(
          state.mixed_block_sums[bi] / static_cast<double>(state.mixed_block_counts[bi]));
    }
  }

  result.model.provenance = {StrategyKind::kPluralisticHedging, schedule, 0};
  for (int i = 0; i < m; ++i) {
    const auto bi = static_cast<std::size_t>(i);
    result.model.per_component.push_back(state.mixed_block_sums[bi] /
                                         static_cast<double>(state.mixed_block_counts[bi]));
  }
  return result;
}

HedgeResult run_pluralistic_hedging(const StochasticProblem& problem,
                                    const ScheduleConfig& schedule, const SgdConfig& config,
                                    std::uint64_t seed, const HedgeOptions& options) {
  BlockCyclicSource source(problem, Rng(seed).split(kSampleStream));
  auto result =
      run_pluralistic_hedging(problem, schedule, config, source, Rng(seed).split(kCoinStream), options);
  result.model.provenance.seed = seed;
  return result;
}

}  // namespace semicyclic
