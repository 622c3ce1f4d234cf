#include "semicyclic/problem.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

std::vector<WeightedSample> StochasticProblem::support(int) const {
  throw_argument("problem has no finite support");
}

double StochasticProblem::expected_loss(int component, const Vector& w) const {
  double total = 0.0;
  for (const auto& ws : support(component)) total += ws.weight * loss(w, ws.sample);
  return total;
}

Vector StochasticProblem::expected_gradient(int component, const Vector& w) const {
  Vector g = Vector::Zero(dimension());
  for (const auto& ws : support(component)) g += ws.weight * gradient(w, ws.sample);
  return g;
}

double StochasticProblem::loss_bound(double) const {
  return std::numeric_limits<double>::infinity();
}

namespace {

void check_dimension(const StochasticProblem& problem, const Vector& w) {
  if (w.size() != problem.dimension()) {
    throw_argument(
        fmt::format("dimension mismatch: vector has {}, problem has {}", w.size(), problem.dimension()));
  }
}

void check_component(const StochasticProblem& problem, int component) {
  if (component < 0 || component >= problem.num_components()) {
    throw_argument(fmt::format("component {} outside 0..{}", component, problem.num_components() - 1));
  }
}

}  // namespace

double component_objective(const StochasticProblem& problem, int component, const Vector& w,
                           int eval_budget, Rng& rng) {
  check_dimension(problem, w);
  check_component(problem, component);
  if (problem.has_finite_support()) return problem.expected_loss(component, w);
  if (eval_budget < 1) throw_argument("eval_budget must be >= 1");
  double total = 0.0;
  for (int s = 0; s < eval_budget; ++s) total += problem.loss(w, problem.draw(component, rng));
  return total / eval_budget;
}

double component_objective(const StochasticProblem& problem, int component, const Vector& w) {
  if (!problem.has_finite_support()) {
    throw_argument("exact component objective requires finite support");
  }
  check_dimension(problem, w);
  check_component(problem, component);
  return problem.expected_loss(component, w);
}

double mixture_objective(const StochasticProblem& problem, const Vector& w, int eval_budget,
                         Rng& rng) {
  if (eval_budget < 1) throw_argument("eval_budget must be >= 1");
  const int m = problem.num_components();
  double total = 0.0;
  for (int i = 0; i < m; ++i) total += component_objective(problem, i, w, eval_budget, rng);
  return total / m;
}

double mixture_objective(const StochasticProblem& problem, const Vector& w) {
  const int m = problem.num_components();
  double total = 0.0;
  for (int i = 0; i < m; ++i) total += component_objective(problem, i, w);
  return total / m;
}

Vector mixture_gradient(const StochasticProblem& problem, const Vector& w) {
  check_dimension(problem, w);
  const int m = problem.num_components();
  Vector g = Vector::Zero(problem.dimension());
  for (int i = 0; i < m; ++i) g += problem.expected_gradient(i, w);
  return g / m;
}

double pluralistic_objective(const StochasticProblem& problem, std::span<const Vector> models) {
  const int m = problem.num_components();
  if (static_cast<int>(models.size()) != m) {
    throw_argument(fmt::format("pluralistic model has {} components, problem has {}", models.size(), m));
  }
  double total = 0.0;
  for (int i = 0; i < m; ++i) total += component_objective(problem, i, models[i]);
  return total / m;
}

Sample BlockCyclicSource::next(long, int block) { return problem_.draw(block, rng_); }

Sample IidSource::next(long, int) {
  const auto component =
      static_cast<int>(rng_.uniform_index(static_cast<std::size_t>(problem_.num_components())));
  return problem_.draw(component, rng_);
}

Sample ReplaySource::next(long t, int) {
  if (t < 1 || static_cast<std::size_t>(t) > stream_.size()) {
    throw_argument(fmt::format("replay stream has {} samples, requested t={}", stream_.size(), t));
  }
  return stream_[static_cast<std::size_t>(t - 1)];
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace semicyclic
