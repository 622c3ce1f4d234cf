#include "semicyclic/diurnal.hpp"

#include <cmath>

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

void DiurnalSpec::validate() const {
  if (components < 1 || cycles < 1 || block_size < 1 || minibatch < 1 || test_per_component < 1) {
    throw_argument("diurnal spec needs positive sizes");
  }
  if (global_words < 0 || component_words < 0 || global_words + component_words > vocabulary) {
    throw_argument(fmt::format("diurnal spec: {} signal words do not fit a vocabulary of {}",
                               global_words + component_words, vocabulary));
  }
  for (double p : {background_rate, signal_on, signal_off}) {
    if (!(p >= 0.0 && p <= 1.0)) throw_argument(fmt::format("presence probability {} outside [0, 1]", p));
  }
  if (!skew.positive_rates.empty() && skew.components() != components) {
    throw_argument(fmt::format("skew has {} rates for {} components", skew.components(), components));
  }
  if (train_per_component() > 50'000'000L) throw_argument("diurnal spec: training split too large");
}

DiurnalSpec DiurnalSpec::desk() { return DiurnalSpec{}; }

DiurnalSpec DiurnalSpec::paper() {
  DiurnalSpec spec;
  spec.block_size = 188;
  spec.test_per_component = 160000 / 6;
  return spec;
}

DiurnalSpec DiurnalSpec::preset(std::string_view scale) {
  if (scale == "desk") return desk();
  if (scale == "paper") return paper();
  throw_argument(fmt::format("unknown scale '{}' (expected desk or paper)", scale));
}

std::shared_ptr<Dataset> synthesize_diurnal_dataset(const DiurnalSpec& spec) {
  spec.validate();
  const SkewSpec skew = spec.skew.positive_rates.empty() ? SkewSpec::interpolated(spec.components) : spec.skew;
  skew.validate();

  Rng rng(spec.seed);
  // per-word label polarity: global words alternate, component words get a
  // random sign per component
  std::vector<int> global_sign(static_cast<std::size_t>(spec.global_words));
  for (int w = 0; w < spec.global_words; ++w) global_sign[static_cast<std::size_t>(w)] = w % 2 == 0 ? 1 : -1;
  std::vector<std::vector<int>> component_sign(static_cast<std::size_t>(spec.components));
  Rng sign_rng = rng.split(0);
  for (auto& signs : component_sign) {
    for (int w = 0; w < spec.component_words; ++w) signs.push_back(sign_rng.bernoulli(0.5) ? 1 : -1);
  }

  const auto make_split = [&](long count, Rng split_rng) {
    std::vector<Example> out;
    out.reserve(static_cast<std::size_t>(count * spec.components));
    for (int i = 0; i < spec.components; ++i) {
      const long positives = std::lround(skew.rate(i) * static_cast<double>(count));
      std::vector<int> labels(static_cast<std::size_t>(count), -1);
      for (long e = 0; e < positives; ++e) labels[static_cast<std::size_t>(e)] = 1;
      split_rng.shuffle(labels.begin(), labels.end());
      const auto& signs = component_sign[static_cast<std::size_t>(i)];
      for (long e = 0; e < count; ++e) {
        Example ex;
        ex.component = i;
        ex.label = labels[static_cast<std::size_t>(e)];
        for (int w = 0; w < spec.vocabulary; ++w) {
          double p = spec.background_rate;
          if (w < spec.global_words) {
            p = global_sign[static_cast<std::size_t>(w)] == ex.label ? spec.signal_on : spec.signal_off;
          } else if (w < spec.global_words + spec.component_words) {
            p = signs[static_cast<std::size_t>(w - spec.global_words)] == ex.label ? spec.signal_on
                                                                                    : spec.signal_off;
          }
          if (split_rng.bernoulli(p)) ex.indices.push_back(static_cast<std::uint32_t>(w));
        }
        out.push_back(std::move(ex));
      }
    }
    return out;
  };

  auto data = std::make_shared<Dataset>();
  data->features = spec.vocabulary;
  data->components = spec.components;
  data->train = make_split(spec.train_per_component(), rng.split(1));
  data->test = make_split(spec.test_per_component, rng.split(2));
  return data;
}

}  // namespace semicyclic
