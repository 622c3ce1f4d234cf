#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "semicyclic/dataset.hpp"
#include "semicyclic/problem.hpp"
#include "semicyclic/schedule.hpp"

namespace semicyclic {

struct LogisticOptions {
  int minibatch = 1;
  bool add_bias = true;        // appends a constant-1 coordinate
  bool unit_norm = false;      // rescales every example (bias included) to |x| = 1
  /// When set, f = B * logloss / ln(1 + e^B), so |f| <= B on the B-ball
  /// whenever |x| <= 1.
  bool normalize_loss = false;
  double norm_bound = 1.0;
};

/// Minibatch logistic regression over the training split of a Dataset.
///
/// A sample is a minibatch of example indices drawn uniformly with
/// replacement from one component's pool; its loss is the minibatch mean.
/// Because the loss is a mean, expectations under D_i are exact pool means.
class LogisticTask final : public StochasticProblem {
 public:
  LogisticTask(std::shared_ptr<const Dataset> data, LogisticOptions options);

  const Dataset& data() const noexcept { return *data_; }
  const LogisticOptions& options() const noexcept { return options_; }
  double loss_scale() const noexcept { return loss_scale_; }
  const std::vector<std::uint32_t>& pool(int component) const;
  double max_feature_norm() const noexcept { return max_norm_; }

  /// Margin y <w, x> of training example `index`.
  double margin(const Vector& w, std::uint32_t index) const;
  /// Margin for an arbitrary example under this task's feature map.
  double margin(const Vector& w, const Example& e) const;

  int dimension() const override { return dimension_; }
  int num_components() const override { return data_->components; }
  Sample draw(int component, Rng& rng) const override;
  double loss(const Vector& w, const Sample& z) const override;
  Vector gradient(const Vector& w, const Sample& z) const override;
  double loss_and_gradient(const Vector& w, const Sample& z, Vector& grad) const override;
  bool has_finite_support() const override { return true; }
  std::vector<WeightedSample> support(int component) const override;
  double expected_loss(int component, const Vector& w) const override;
  Vector expected_gradient(int component, const Vector& w) const override;
  double loss_bound(double radius) const override;

 private:
  struct Row {
    std::size_t begin = 0, end = 0;
    double label = 1.0;
  };
  double row_margin(const Vector& w, const Row& row) const;
  double batch(const Vector& w, std::span<const std::uint32_t> items, Vector* grad) const;

  std::shared_ptr<const Dataset> data_;
  LogisticOptions options_;
  int dimension_ = 0;
  double loss_scale_ = 1.0;
  double max_norm_ = 0.0;
  std::vector<Row> rows_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  std::vector<std::vector<std::uint32_t>> pools_;
};

/// Fraction of examples with y <w, x> > 0 (ties count as errors).
double accuracy(const LogisticTask& task, const Vector& w, std::span<const Example* const> examples);
/// Per-component test accuracy of `w`, one entry per component.
std::vector<double> component_accuracies(const LogisticTask& task, const Vector& w);

/// Block-cyclic minibatch stream over the training pools. When a pool holds
/// at least K*n*b examples it is shuffled and cut into K disjoint day
/// chunks, so no example repeats; otherwise minibatches are drawn with
/// replacement.
std::vector<Sample> block_cyclic_stream(const LogisticTask& task, const ScheduleConfig& schedule,
                                        Rng rng);
/// The same multiset of examples, globally shuffled and re-cut into
/// minibatches. Each minibatch is tagged with the block of its slot.
std::vector<Sample> shuffled_stream(const std::vector<Sample>& cyclic,
                                    const ScheduleConfig& schedule, Rng rng);
/// Order-independent fingerprint of the examples a stream consumes.
std::uint64_t stream_content_hash(const std::vector<Sample>& stream);

}  // namespace semicyclic
