#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "semicyclic/hard_instance.hpp"
#include "semicyclic/logistic_task.hpp"

namespace semicyclic {

/// Positive-label rate per component.
struct SkewSpec {
  std::vector<double> positive_rates;

  int components() const { return static_cast<int>(positive_rates.size()); }
  double rate(int component) const;
  void validate() const;

  /// Peak at component 1, trough at component m/2 + 1, linear in the
  /// cyclic distance between them. For m = 6 and (2/3, 1/3) this gives
  /// 2/3, 5/9, 4/9, 1/3, 4/9, 5/9.
  static SkewSpec interpolated(int components, double peak = 2.0 / 3.0, double trough = 1.0 / 3.0);
};

enum class FiniteTaskKind {
  kLabelSkew,    // shared feature model, per-component label balance
  kIdentical,    // every component holds the very same examples
  kConflicting,  // label-feature correlation flips sign between components
};

/// Small dense logistic tasks with exact finite support.
struct FiniteLogisticSpec {
  FiniteTaskKind kind = FiniteTaskKind::kLabelSkew;
  int components = 2;
  int per_component = 200;  // training examples per component
  int test_per_component = 200;
  int features = 5;         // Gaussian coordinates; a constant coordinate is appended
  double shift = 0.8;       // class-mean separation along a fixed unit direction
  SkewSpec skew;            // empty: 2/3 .. 1/3 interpolation (label-skew kind only)
  std::uint64_t seed = 0;
};

/// Features are N(0, I) + shift * s * y * u, then a constant 1, scaled so
/// that |x| <= 1. s = +1 except for odd components of the conflicting kind.
std::shared_ptr<Dataset> finite_logistic_dataset(const FiniteLogisticSpec& spec);
LogisticTask finite_logistic_task(const FiniteLogisticSpec& spec, bool normalize_loss = false,
                                  double norm_bound = 1.0);

/// One-dimensional f(w, z) = (w - z)^2 / (4B) with z = target_i +/- spread,
/// so |f| <= B on [-B, B] whenever |z| <= B.
class QuadraticTask final : public StochasticProblem {
 public:
  QuadraticTask(std::vector<double> targets, double spread, double norm_bound);

  int dimension() const override { return 1; }
  int num_components() const override { return static_cast<int>(targets_.size()); }
  Sample draw(int component, Rng& rng) const override;
  double loss(const Vector& w, const Sample& z) const override;
  Vector gradient(const Vector& w, const Sample& z) const override;
  bool has_finite_support() const override { return true; }
  std::vector<WeightedSample> support(int component) const override;
  std::optional<Vector> reference_optimum() const override;
  double loss_bound(double radius) const override;

 private:
  std::vector<double> targets_;
  double spread_;
  double bound_;
};

/// The two-example construction as a two-component problem.
HardInstance two_point_conflict_task(double norm_bound, long cycles, long block_size = 1,
                                     HardVariant variant = HardVariant::kLipschitz);

}  // namespace semicyclic
