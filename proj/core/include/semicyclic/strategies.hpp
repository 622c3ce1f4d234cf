#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semicyclic/prod.hpp"
#include "semicyclic/problem.hpp"
#include "semicyclic/schedule.hpp"
#include "semicyclic/sgd.hpp"

namespace semicyclic {

enum class StrategyKind {
  kConsensus,             // one chain, one model
  kPerComponent,          // m independent chains
  kPluralisticAveraging,  // one chain, per-block iterate averages
  kPluralisticHedging,    // Prod mixture of the full chain and per-block chains
  kIid,                   // one chain on a shuffled (non-cyclic) stream
};

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view name);

/// Seed sub-streams. A run seeded with `s` draws samples from
/// Rng(s).split(kSampleStream), so strategies sharing a seed see the same data.
inline constexpr std::uint64_t kSampleStream = 1;
inline constexpr std::uint64_t kCoinStream = 2;

struct Provenance {
  StrategyKind strategy = StrategyKind::kConsensus;
  ScheduleConfig schedule;
  std::uint64_t seed = 0;
};

struct PluralisticModel {
  std::vector<Vector> per_component;
  Provenance provenance;

  int components() const { return static_cast<int>(per_component.size()); }
};

/// checkpoints[k][i]: the model right after the last update of block i in
/// cycle k (both 0-based).
using BlockCheckpoints = std::vector<std::vector<Vector>>;

struct ConsensusResult {
  Vector final_iterate;
  Vector full_average;
  BlockCheckpoints block_ends;
  ChainState chain;
};

ConsensusResult run_consensus(const StochasticProblem& problem, const ScheduleConfig& schedule,
                              const SgdConfig& config, SampleSource& source);
ConsensusResult run_consensus(const StochasticProblem& problem, const ScheduleConfig& schedule,
                              const SgdConfig& config, std::uint64_t seed);

/// Single chain over a non-cyclic stream. Iterates are accounted to the
/// component each sample actually came from; checkpoints still follow the
/// schedule positions so evaluation matches the consensus model.
ConsensusResult run_iid(const StochasticProblem& problem, const ScheduleConfig& schedule,
                        const SgdConfig& config, SampleSource& source);
ConsensusResult run_iid(const StochasticProblem& problem, const ScheduleConfig& schedule,
                        const SgdConfig& config, std::uint64_t seed);

struct PerComponentResult {
  PluralisticModel model;           // each chain's average over its own K n query points
  BlockCheckpoints daily;           // daily[k][i] = w^i after its block on day k
  std::vector<ChainState> chains;
};

/// Chain i advances only on block-i samples; its step-size horizon is T / m.
PerComponentResult run_per_component(const StochasticProblem& problem,
                                     const ScheduleConfig& schedule, const SgdConfig& config,
                                     SampleSource& source);
PerComponentResult run_per_component(const StochasticProblem& problem,
                                     const ScheduleConfig& schedule, const SgdConfig& config,
                                     std::uint64_t seed);

struct PluralisticResult {
  PluralisticModel model;  // w~^i = block_average(chain, i)
  ConsensusResult run;
};

PluralisticResult run_pluralistic_averaging(const StochasticProblem& problem,
                                            const ScheduleConfig& schedule,
                                            const SgdConfig& config, SampleSource& source);
PluralisticResult run_pluralistic_averaging(const StochasticProblem& problem,
                                            const ScheduleConfig& schedule,
                                            const SgdConfig& config, std::uint64_t seed);

struct HedgeOptions {
  /// Prod rate nu; defaults to hedging_rate(B, T, m).
  std::optional<double> rate;
};

struct HedgeState {
  ChainState full_chain;
  std::vector<ChainState> component_chains;
  std::vector<ProdState> weights;  // per block: anchor = full chain, expert 1 = block chain
  double rate = 0.0;
  std::vector<Vector> mixed_block_sums;
  std::vector<long> mixed_block_counts;
};

/// Per-block sums over S_i, used to check the hedging regret lemma.
struct HedgeBlockStats {
  double realized_loss = 0.0;   // sum f(u_t, z_t)
  double expected_loss = 0.0;   // sum p_t f(w^i_t, z_t) + (1 - p_t) f(w_t, z_t)
  double full_chain_loss = 0.0;
  double component_chain_loss = 0.0;
  long component_choices = 0;   // rounds where u_t = w^i_t
  long steps = 0;
};

struct HedgeResult {
  PluralisticModel model;  // u~^i
  HedgeState state;
  std::vector<HedgeBlockStats> stats;
  BlockCheckpoints daily;  // running u~^i after day k
  std::vector<std::string> warnings;
};

/// Requires |f| <= B on the B-ball (Prod loss bound M = B).
HedgeResult run_pluralistic_hedging(const StochasticProblem& problem,
                                    const ScheduleConfig& schedule, const SgdConfig& config,
                                    SampleSource& source, Rng coins,
                                    const HedgeOptions& options = {});
HedgeResult run_pluralistic_hedging(const StochasticProblem& problem,
                                    const ScheduleConfig& schedule, const SgdConfig& config,
                                    std::uint64_t seed, const HedgeOptions& options = {});

}  // namespace semicyclic
