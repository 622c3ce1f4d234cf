#include "semicyclic/sgd.hpp"

#include <cmath>

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

double StepSize::resolve(double norm_bound, long horizon) const {
  switch (rule) {
    case Rule::kConstant:
      if (!(value > 0.0) || !std::isfinite(value)) {
        throw_argument(fmt::format("constant step size must be positive (got {})", value));
      }
      return value;
    case Rule::kHorizonDefault:
      if (horizon < 1) throw_argument("step size horizon must be >= 1");
      return norm_bound / std::sqrt(2.0 * static_cast<double>(horizon));
  }
  throw_argument("unknown step size rule");
}

void SgdConfig::validate() const {
  if (!(norm_bound > 0.0) || !std::isfinite(norm_bound)) {
    throw_argument(fmt::format("norm bound B must be positive (got {})", norm_bound));
  }
  if (step_size.rule == StepSize::Rule::kConstant && !(step_size.value > 0.0)) {
    throw_argument(fmt::format("constant step size must be positive (got {})", step_size.value));
  }
  if (initial_iterate && !all_finite(*initial_iterate)) {
    throw_argument("initial iterate has non-finite entries");
  }
}

Vector project(const Vector& w, double radius) {
  if (!(radius > 0.0)) throw_argument("projection radius must be positive");
  const double norm = w.norm();
  if (norm <= radius) return w;
  return w / (norm / radius);
}

ChainState make_chain(int dimension, int blocks, const SgdConfig& config, long horizon) {
  config.validate();
  if (dimension < 1) throw_argument("chain dimension must be >= 1");
  if (blocks < 1) throw_argument("chain needs at least one block");
  ChainState state;
  if (config.initial_iterate) {
    if (config.initial_iterate->size() != dimension) {
      throw_argument("initial iterate dimension mismatch");
    }
    state.iterate = *config.initial_iterate;
    if (config.use_projection) state.iterate = project(state.iterate, config.norm_bound);
  } else {
    state.iterate = Vector::Zero(dimension);
  }
  state.horizon = horizon;
  state.step_size = config.step_size.resolve(config.norm_bound, horizon);
  state.block_sums.assign(static_cast<std::size_t>(blocks), Vector::Zero(dimension));
  state.block_counts.assign(static_cast<std::size_t>(blocks), 0);
  state.total_sum = Vector::Zero(dimension);
  return state;
}

double step(ChainState& state, const Sample& sample, int block, const SgdConfig& config,
            const StochasticProblem& problem) {
  if (block < 0 || block >= state.blocks()) {
    throw_argument(fmt::format("block {} outside 0..{}", block, state.blocks() - 1));
  }
  if (sample.component != block) {
    throw_argument(
        fmt::format("sample drawn from component {} fed to block {}", sample.component, block));
  }
  if (problem.dimension() != state.dimension()) {
    throw_argument("chain and problem dimensions differ");
  }

  Vector grad;
  const double loss = problem.loss_and_gradient(state.iterate, sample, grad);
  if (!std::isfinite(loss) || !all_finite(grad)) {
    throw ChainDivergedError(state.steps + 1, state.iterate.norm());
  }

  // record-then-step: loss and averaging both use the pre-update query point
  state.cumulative_loss += loss;
  state.block_sums[static_cast<std::size_t>(block)] += state.iterate;
  state.block_counts[static_cast<std::size_t>(block)] += 1;
  state.total_sum += state.iterate;

  state.iterate -= state.step_size * grad;
  if (config.use_projection) state.iterate = project(state.iterate, config.norm_bound);
  state.steps += 1;

  if (!all_finite(state.iterate)) throw ChainDivergedError(state.steps, state.iterate.norm());
  return loss;
}

double regret_against(const ChainState& state, std::span<const double> comparator_losses) {
  if (static_cast<long>(comparator_losses.size()) != state.steps) {
    throw_argument(fmt::format("regret needs {} comparator losses, got {}", state.steps,
                               comparator_losses.size()));
  }
  double comparator_total = 0.0;
  for (double l : comparator_losses) comparator_total += l;
  return state.cumulative_loss - comparator_total;
}

Vector block_average(const ChainState& state, int block) {
  if (block < 0 || block >= state.blocks()) {
    throw_argument(fmt::format("block {} outside 0..{}", block, state.blocks() - 1));
  }
  const long count = state.block_counts[static_cast<std::size_t>(block)];
  if (count == 0) throw_argument(fmt::format("block {} has no iterates to average", block));
  return state.block_sums[static_cast<std::size_t>(block)] / static_cast<double>(count);
}

Vector full_average(const ChainState& state) {
  if (state.steps == 0) throw_argument("chain has no iterates to average");
  return state.total_sum / static_cast<double>(state.steps);
}

}  // namespace semicyclic
