#pragma once

#include <optional>
#include <span>
#include <vector>

#include "semicyclic/problem.hpp"

namespace semicyclic {

/// Constant step size, either user-supplied or the regret-optimal
/// eta = B / sqrt(2 * horizon) for a chain of `horizon` steps.
struct StepSize {
  enum class Rule { kConstant, kHorizonDefault };

  Rule rule = Rule::kHorizonDefault;
  double value = 0.0;

  static StepSize constant(double eta) { return {Rule::kConstant, eta}; }
  static StepSize horizon_default() { return {Rule::kHorizonDefault, 0.0}; }

  double resolve(double norm_bound, long horizon) const;
};

struct SgdConfig {
  double norm_bound = 1.0;  // B
  StepSize step_size = StepSize::horizon_default();
  bool use_projection = true;
  std::optional<Vector> initial_iterate;  // zeros when unset

  void validate() const;
};

/// Euclidean projection onto the ball of radius `radius`: w / max(|w| / radius, 1).
Vector project(const Vector& w, double radius);

/// One SGD/OGD trajectory plus the running sums needed for block averaging.
struct ChainState {
  Vector iterate;  // w_t, the next query point
  long steps = 0;  // iterations taken so far
  long horizon = 0;
  double step_size = 0.0;

  std::vector<Vector> block_sums;  // sum of query points that fell in each block
  std::vector<long> block_counts;
  Vector total_sum;
  double cumulative_loss = 0.0;  // sum_t f(w_t, z_t)

  int dimension() const { return static_cast<int>(iterate.size()); }
  int blocks() const { return static_cast<int>(block_sums.size()); }
};

ChainState make_chain(int dimension, int blocks, const SgdConfig& config, long horizon);

/// Records f(w_t, z_t) and w_t into the block-`block` accumulators, then
/// applies w_{t+1} = Proj(w_t - eta * g_t). Returns f(w_t, z_t).
///
/// Throws ChainDivergedError on a non-finite gradient or iterate.
double step(ChainState& state, const Sample& sample, int block, const SgdConfig& config,
            const StochasticProblem& problem);

/// sum_t f(w_t, z_t) - sum_t f(w, z_t), given the comparator's losses on the
/// same samples.
double regret_against(const ChainState& state, std::span<const double> comparator_losses);

/// Mean of the query points that fell in `block` (0-based).
Vector block_average(const ChainState& state, int block);
/// Mean of all T query points w_1..w_T.
Vector full_average(const ChainState& state);

}  // namespace semicyclic
