#include "semicyclic/synthetic_tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

double SkewSpec::rate(int component) const {
  if (component < 0 || component >= components()) {
    throw_argument(fmt::format("skew has no component {}", component + 1));
  }
  return positive_rates[static_cast<std::size_t>(component)];
}

void SkewSpec::validate() const {
  if (positive_rates.empty()) throw_argument("skew spec has no components");
  for (double r : positive_rates) {
    if (!(r > 0.0 && r < 1.0)) throw_argument(fmt::format("positive rate {} outside (0, 1)", r));
  }
}

SkewSpec SkewSpec::interpolated(int components, double peak, double trough) {
  if (components < 1) throw_argument("skew spec needs at least one component");
  SkewSpec spec;
  const double half = components / 2.0;
  for (int i = 0; i < components; ++i) {
    const double distance = std::min(i, components - i);
    spec.positive_rates.push_back(components == 1 ? peak : peak - (peak - trough) * distance / half);
  }
  spec.validate();
  return spec;
}

namespace {

std::vector<Example> draw_split(const FiniteLogisticSpec& spec, const SkewSpec& skew,
                                const Vector& direction, int count, Rng& rng) {
  std::vector<Example> out;
  const int d = spec.features;
  for (int i = 0; i < spec.components; ++i) {
    const double rate = spec.kind == FiniteTaskKind::kLabelSkew ? skew.rate(i) : 0.5;
    const auto positives = static_cast<int>(std::lround(rate * count));
    const double sign = spec.kind == FiniteTaskKind::kConflicting && i % 2 == 1 ? -1.0 : 1.0;
    for (int e = 0; e < count; ++e) {
      Example ex;
      ex.component = i;
      ex.label = e < positives ? 1 : -1;
      Vector x(d + 1);
      for (int c = 0; c < d; ++c) x[c] = rng.normal() + spec.shift * sign * ex.label * direction[c];
      x[d] = 1.0;
      x /= std::max(x.norm(), 1.0);
      for (int c = 0; c <= d; ++c) {
        ex.indices.push_back(static_cast<std::uint32_t>(c));
        ex.values.push_back(x[c]);
      }
      out.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace

std::shared_ptr<Dataset> finite_logistic_dataset(const FiniteLogisticSpec& spec) {
  if (spec.components < 1 || spec.per_component < 1 || spec.test_per_component < 0 ||
      spec.features < 1) {
    throw_argument("finite logistic task needs positive sizes");
  }
  SkewSpec skew = spec.skew.positive_rates.empty() ? SkewSpec::interpolated(spec.components) : spec.skew;
  skew.validate();
  if (skew.components() != spec.components) {
    throw_argument(fmt::format("skew spec has {} rates for {} components", skew.components(), spec.components));
  }

  Rng rng(spec.seed);
  Vector direction(spec.features);
  for (int c = 0; c < spec.features; ++c) direction[c] = rng.normal();
  direction /= direction.norm();

  auto data = std::make_shared<Dataset>();
  data->features = spec.features + 1;
  data->components = spec.components;
  if (spec.kind == FiniteTaskKind::kIdentical) {
    // one pool, replicated verbatim into every component
    FiniteLogisticSpec single = spec;
    single.components = 1;
    const SkewSpec flat = SkewSpec::interpolated(1, 0.5, 0.5);
    Rng train_rng = rng.split(1), test_rng = rng.split(2);
    const auto train = draw_split(single, flat, direction, spec.per_component, train_rng);
    const auto test = draw_split(single, flat, direction, spec.test_per_component, test_rng);
    for (int i = 0; i < spec.components; ++i) {
      for (auto e : train) {
        e.component = i;
        data->train.push_back(std::move(e));
      }
      for (auto e : test) {
        e.component = i;
        data->test.push_back(std::move(e));
      }
    }
  } else {
    Rng train_rng = rng.split(1), test_rng = rng.split(2);
    data->train = draw_split(spec, skew, direction, spec.per_component, train_rng);
    data->test = draw_split(spec, skew, direction, spec.test_per_component, test_rng);
  }
  data->validate();
  return data;
}

LogisticTask finite_logistic_task(const FiniteLogisticSpec& spec, bool normalize_loss, double norm_bound) {
  LogisticOptions options;
  options.minibatch = 1;
  options.add_bias = false;  // the constant coordinate is already a feature
  options.normalize_loss = normalize_loss;
  options.norm_bound = norm_bound;
  return LogisticTask(finite_logistic_dataset(spec), options);
}

QuadraticTask::QuadraticTask(std::vector<double> targets, double spread, double norm_bound)
    : targets_(std::move(targets)), spread_(spread), bound_(norm_bound) {
  if (targets_.empty()) throw_argument("quadratic task needs at least one component");
  if (!(bound_ > 0.0) || !(spread_ >= 0.0)) throw_argument("quadratic task needs B > 0, spread >= 0");
  for (double t : targets_) {
    if (std::abs(t) + spread_ > bound_) {
      throw_argument(fmt::format("target {} +/- {} leaves [-B, B]", t, spread_));
    }
  }
}

Sample QuadraticTask::draw(int component, Rng& rng) const {
  Sample z;
  z.component = component;
  z.point = Vector::Constant(1, targets_.at(static_cast<std::size_t>(component)) +
                                    (rng.bernoulli(0.5) ? spread_ : -spread_));
  return z;
}

double QuadraticTask::loss(const Vector& w, const Sample& z) const {
  const double r = w[0] - z.point[0];
  return r * r / (4.0 * bound_);
}

Vector QuadraticTask::gradient(const Vector& w, const Sample& z) const {
  return Vector::Constant(1, (w[0] - z.point[0]) / (2.0 * bound_));
}

std::vector<WeightedSample> QuadraticTask::support(int component) const {
  std::vector<WeightedSample> out;
  for (double s : {-spread_, spread_}) {
    Sample z;
    z.component = component;
    z.point = Vector::Constant(1, targets_.at(static_cast<std::size_t>(component)) + s);
    out.push_back({std::move(z), 0.5});
  }
  return out;
}

std::optional<Vector> QuadraticTask::reference_optimum() const {
  const double mean = std::accumulate(targets_.begin(), targets_.end(), 0.0) /
                      static_cast<double>(targets_.size());
  return Vector::Constant(1, mean);
}

double QuadraticTask::loss_bound(double radius) const {
  return (radius + bound_) * (radius + bound_) / (4.0 * bound_);
}

HardInstance two_point_conflict_task(double norm_bound, long cycles, long block_size, HardVariant variant) {
  HardInstanceConfig config;
  config.norm_bound = norm_bound;
  config.cycles = cycles;
  config.blocks = 2;
  config.block_size = block_size;
  config.variant = variant;
  return HardInstance(config);
}

}  // namespace semicyclic
