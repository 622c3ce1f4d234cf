#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semicyclic/problem.hpp"
#include "semicyclic/schedule.hpp"

namespace semicyclic {

enum class HardVariant { kLipschitz, kSmooth };

std::string_view to_string(HardVariant variant);
HardVariant parse_hard_variant(std::string_view name);

struct HardInstanceConfig {
  double norm_bound = 1.0;  // B
  long cycles = 2;          // K
  int blocks = 2;           // m, must exceed 1
  long block_size = 500;    // n
  HardVariant variant = HardVariant::kLipschitz;
  int dimension = 0;        // 0 selects 4K + 1

  int resolved_dimension() const { return dimension > 0 ? dimension : static_cast<int>(4 * cycles + 1); }
  ScheduleConfig schedule() const { return {cycles, blocks, block_size}; }
  void validate() const;
};

/// Breakpoints of the piecewise-quadratic penalty: flat on |x| <= a/2,
/// quadratic up to gamma, then linear with slope 2 gamma.
struct PhiShape {
  double a = 0.0;
  double gamma = 0.0;
  void validate() const;
};

double phi(double x, const PhiShape& shape);
double phi_derivative(double x, const PhiShape& shape);

/// Two-example chain construction. Block i (0-based) draws example 1 when
/// i < m/2 and example 2 otherwise; each example's gradient can expose at
/// most one new direction v_r beyond those already present in w.
class HardInstance final : public StochasticProblem {
 public:
  explicit HardInstance(const HardInstanceConfig& config);
  /// Uses caller-supplied orthonormal directions v_1..v_{4K}.
  HardInstance(const HardInstanceConfig& config, std::vector<Vector> directions);

  const HardInstanceConfig& config() const noexcept { return config_; }
  const PhiShape& shape() const noexcept { return shape_; }
  /// The leading constant (eta in the construction): 4BK or B^2.
  double scale() const noexcept { return scale_; }
  const std::vector<Vector>& directions() const noexcept { return directions_; }
  /// Upper bound on the Lipschitz constant of grad F.
  double smoothness() const noexcept { return scale_; }

  int label_of_block(int block) const;
  double hard_loss(const Vector& w, int label) const;
  Vector hard_gradient(const Vector& w, int label) const;
  /// Coefficients <v_r, w> for r = 1..4K (returned 0-based).
  std::vector<double> coefficients(const Vector& w) const;

  int dimension() const override { return dimension_; }
  int num_components() const override { return config_.blocks; }
  Sample draw(int component, Rng& rng) const override;
  double loss(const Vector& w, const Sample& z) const override;
  Vector gradient(const Vector& w, const Sample& z) const override;
  bool has_finite_support() const override { return true; }
  std::vector<WeightedSample> support(int component) const override;
  double expected_loss(int component, const Vector& w) const override;
  Vector expected_gradient(int component, const Vector& w) const override;

 private:
  Vector combine(const std::vector<double>& coefficient_weights) const;

  HardInstanceConfig config_;
  PhiShape shape_;
  double scale_ = 0.0;
  int dimension_ = 0;
  std::vector<Vector> directions_;
};

/// Largest |<v_r, w>| over r > frontier (1-based r); 0 when none.
double max_coefficient_beyond(const HardInstance& instance, const Vector& w, int frontier);

struct SpanSnapshot {
  long cycle = 0;                     // 1-based
  std::vector<double> coefficients;   // <v_r, w> at the end of the cycle
  double max_beyond_frontier = 0.0;   // over every query point of the cycle, r > 2k + 1
  int highest_revealed = 0;           // largest r with a non-zero coefficient
};

struct StallOptions {
  std::uint64_t seed = 0;
  int iid_repetitions = 10;
  double solver_tolerance = 1e-8;
};

struct StallReport {
  HardInstanceConfig config;
  double scale = 0.0;
  double a = 0.0;
  double gamma = 0.0;

  double full_optimum = 0.0;           // F(w*) over the B-ball
  double full_optimum_check = 0.0;     // second solve from a random start
  double restricted_optimum = 0.0;     // min F over span{v_1..v_2K} within the ball
  double restricted_optimum_check = 0.0;
  double full_gradient_mapping = 0.0;
  double restricted_gradient_mapping = 0.0;

  double restricted_gap = 0.0;
  double gap_constant = 0.0;           // B/(96K) or B^2/(256K)
  bool gap_check_passed = false;

  double excess_last = 0.0;            // cyclic run, last iterate
  double excess_average = 0.0;         // cyclic run, full average
  std::vector<SpanSnapshot> span_profile;
  double max_span_leak = 0.0;

  std::vector<double> iid_excess_last;
  std::vector<double> iid_excess_average;
  double iid_mean_excess_last = 0.0;
  double iid_mean_excess_average = 0.0;

  std::vector<std::string> notes;
};

/// Runs projected block-cyclic SGD (w_1 = 0, eta = B / sqrt(2T)) on the
/// instance and reports span confinement, excess over F(w*), the
/// restricted-span optimum gap and an i.i.d.-stream control.
StallReport stall_demo(const HardInstanceConfig& config, const StallOptions& options = {});

}  // namespace semicyclic
