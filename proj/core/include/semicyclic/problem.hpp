#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "semicyclic/rng.hpp"

namespace semicyclic {

/// Dense model parameters. All chains, averages and optima use this type.
using Vector = Eigen::VectorXd;

/// One draw z from a component distribution D_i.
///
/// `component` is the 0-based block the sample came from. Problems over a
/// finite pool put indices into `items` (one index per example; a minibatch
/// carries several); continuous problems use `point`.
struct Sample {
  int component = 0;
  std::vector<std::uint32_t> items;
  Vector point;
};

struct WeightedSample {
  Sample sample;
  double weight = 0.0;
};

/// Convex stochastic objective f(w, z) with per-component samplers.
///
/// The mixture over components is uniform: F(w) = (1/m) sum_i E_{D_i} f(w, z).
class StochasticProblem {
 public:
  virtual ~StochasticProblem() = default;

  virtual int dimension() const = 0;
  virtual int num_components() const = 0;

  virtual Sample draw(int component, Rng& rng) const = 0;
  virtual double loss(const Vector& w, const Sample& z) const = 0;
  virtual Vector gradient(const Vector& w, const Sample& z) const = 0;

  /// Returns f(w, z) and writes a subgradient into `grad`.
  virtual double loss_and_gradient(const Vector& w, const Sample& z, Vector& grad) const {
    grad = gradient(w, z);
    return loss(w, z);
  }

  /// True when every component has an explicitly stored finite support, in
  /// which case expectations are computed exactly.
  virtual bool has_finite_support() const { return false; }
  virtual std::vector<WeightedSample> support(int component) const;

  /// E_{z ~ D_i} f(w, z). Only available for finite-support problems.
  virtual double expected_loss(int component, const Vector& w) const;
  virtual Vector expected_gradient(int component, const Vector& w) const;

  /// Known minimiser of F over the problem's norm ball, if any.
  virtual std::optional<Vector> reference_optimum() const { return std::nullopt; }

  /// Upper bound on |f(w, z)| over ||w|| <= radius; +inf when unknown.
  virtual double loss_bound(double radius) const;
};

/// F_i(w): exact for finite-support problems, otherwise a Monte-Carlo mean of
/// `eval_budget` fresh draws.
double component_objective(const StochasticProblem& problem, int component, const Vector& w,
                           int eval_budget, Rng& rng);
double component_objective(const StochasticProblem& problem, int component, const Vector& w);

/// F(w) = (1/m) sum_i F_i(w).
double mixture_objective(const StochasticProblem& problem, const Vector& w, int eval_budget,
                         Rng& rng);
double mixture_objective(const StochasticProblem& problem, const Vector& w);
Vector mixture_gradient(const StochasticProblem& problem, const Vector& w);

/// Pluralistic risk (1/m) sum_i F_i(w^i); finite-support problems only.
double pluralistic_objective(const StochasticProblem& problem, std::span<const Vector> models);

/// Supplies the sample consumed at iteration t (1-based) for 0-based block `block`.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual Sample next(long t, int block) = 0;
};

/// z_t ~ D_block: the block-cyclic stream.
class BlockCyclicSource final : public SampleSource {
 public:
  BlockCyclicSource(const StochasticProblem& problem, Rng rng) : problem_(problem), rng_(rng) {}
  Sample next(long t, int block) override;

 private:
  const StochasticProblem& problem_;
  Rng rng_;
};

/// z_t ~ D (uniform mixture), ignoring the block: the i.i.d. control stream.
class IidSource final : public SampleSource {
 public:
  IidSource(const StochasticProblem& problem, Rng rng) : problem_(problem), rng_(rng) {}
  Sample next(long t, int block) override;

 private:
  const StochasticProblem& problem_;
  Rng rng_;
};

/// Replays a pre-built stream; sample t is `stream[t - 1]`.
class ReplaySource final : public SampleSource {
 public:
  explicit ReplaySource(std::vector<Sample> stream) : stream_(std::move(stream)) {}
  Sample next(long t, int block) override;
  std::size_t size() const noexcept { return stream_.size(); }

 private:
  std::vector<Sample> stream_;
};

bool all_finite(const Vector& v);

}  // namespace semicyclic
