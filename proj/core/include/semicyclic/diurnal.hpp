#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "semicyclic/dataset.hpp"
#include "semicyclic/synthetic_tasks.hpp"

namespace semicyclic {

/// Synthetic stand-in for time-of-day sentiment data: bag-of-words presence
/// features from three word groups.
///   - background words, label-independent;
///   - global words, each tied to one label everywhere;
///   - component words, tied to a label whose sign varies by component.
struct DiurnalSpec {
  int vocabulary = 1024;
  int components = 6;
  long cycles = 10;
  long block_size = 20;  // minibatches per block
  int minibatch = 128;
  int test_per_component = 2000;
  SkewSpec skew;         // empty: SkewSpec::interpolated(components)

  int global_words = 700;
  int component_words = 100;
  double background_rate = 0.01;
  double signal_on = 0.02;   // presence probability when the word agrees with the label
  double signal_off = 0.01;  // ... when it disagrees
  std::uint64_t seed = 0;

  long train_per_component() const { return cycles * block_size * minibatch; }
  void validate() const;

  static DiurnalSpec desk();
  /// 1,440,000 training examples split over 10 days x 6 blocks at
  /// minibatch 128 (188 minibatches per block), 160,000 test examples.
  static DiurnalSpec paper();
  static DiurnalSpec preset(std::string_view scale);
};

/// Exactly `train_per_component()` training examples per component, with
/// exactly round(rate * count) positives in each component and split.
std::shared_ptr<Dataset> synthesize_diurnal_dataset(const DiurnalSpec& spec);

}  // namespace semicyclic
