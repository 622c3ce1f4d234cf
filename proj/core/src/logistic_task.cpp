#include "semicyclic/logistic_task.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

namespace {

// ln(1 + e^{-m}) without overflow
double log_loss(double margin) {
  return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

// d/dm ln(1 + e^{-m}) = -1 / (1 + e^m)
double log_loss_slope(double margin) {
  if (margin > 0.0) {
    const double e = std::exp(-margin);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(margin));
}

}  // namespace

LogisticTask::LogisticTask(std::shared_ptr<const Dataset> data, LogisticOptions options)
    : data_(std::move(data)), options_(options) {
  if (!data_) throw_argument("logistic task needs a dataset");
  data_->validate();
  if (options_.minibatch < 1) throw_argument("minibatch size must be >= 1");
  if (!(options_.norm_bound > 0.0)) throw_argument("norm bound must be positive");
  dimension_ = data_->features + (options_.add_bias ? 1 : 0);
  if (options_.normalize_loss) {
    loss_scale_ = options_.norm_bound / std::log1p(std::exp(options_.norm_bound));
  }

  pools_.assign(static_cast<std::size_t>(data_->components), {});
  rows_.reserve(data_->train.size());
  for (std::size_t r = 0; r < data_->train.size(); ++r) {
    const Example& e = data_->train[r];
    Row row;
    row.begin = cols_.size();
    row.label = static_cast<double>(e.label);
    double sq = 0.0;
    for (std::size_t k = 0; k < e.indices.size(); ++k) {
      const double v = e.values.empty() ? 1.0 : e.values[k];
      cols_.push_back(e.indices[k]);
      vals_.push_back(v);
      sq += v * v;
    }
    if (options_.add_bias) {
      cols_.push_back(static_cast<std::uint32_t>(data_->features));
      vals_.push_back(1.0);
      sq += 1.0;
    }
    row.end = cols_.size();
    if (options_.unit_norm && sq > 0.0) {
      const double s = 1.0 / std::sqrt(sq);
      for (std::size_t k = row.begin; k < row.end; ++k) vals_[k] *= s;
      sq = 1.0;
    }
    max_norm_ = std::max(max_norm_, std::sqrt(sq));
    rows_.push_back(row);
    pools_[static_cast<std::size_t>(e.component)].push_back(static_cast<std::uint32_t>(r));
  }
  for (std::size_t i = 0; i < pools_.size(); ++i) {
    if (pools_[i].empty()) throw_argument(fmt::format("component {} has no training examples", i + 1));
  }
}

const std::vector<std::uint32_t>& LogisticTask::pool(int component) const {
  if (component < 0 || component >= data_->components) {
    throw_argument(fmt::format("component {} outside 0..{}", component, data_->components - 1));
  }
  return pools_[static_cast<std::size_t>(component)];
}

double LogisticTask::row_margin(const Vector& w, const Row& row) const {
  double dot = 0.0;
  for (std::size_t k = row.begin; k < row.end; ++k) dot += w[cols_[k]] * vals_[k];
  return row.label * dot;
}

double LogisticTask::margin(const Vector& w, std::uint32_t index) const {
  return row_margin(w, rows_.at(index));
}

double LogisticTask::margin(const Vector& w, const Example& e) const {
  double dot = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < e.indices.size(); ++k) {
    const double v = e.values.empty() ? 1.0 : e.values[k];
    if (e.indices[k] < static_cast<std::uint32_t>(data_->features)) dot += w[e.indices[k]] * v;
    sq += v * v;
  }
  if (options_.add_bias) {
    dot += w[data_->features];
    sq += 1.0;
  }
  if (options_.unit_norm && sq > 0.0) dot /= std::sqrt(sq);
  return static_cast<double>(e.label) * dot;
}

double LogisticTask::batch(const Vector& w, std::span<const std::uint32_t> items, Vector* grad) const {
  if (w.size() != dimension_) {
    throw_argument(fmt::format("logistic task: dimension {} != {}", w.size(), dimension_));
  }
  if (items.empty()) throw_argument("logistic task: empty minibatch");
  if (grad) *grad = Vector::Zero(dimension_);
  double total = 0.0;
  for (auto idx : items) {
    const Row& row = rows_.at(idx);
    const double m = row_margin(w, row);
    total += log_loss(m);
    if (grad) {
      const double c = log_loss_slope(m) * row.label;
      for (std::size_t k = row.begin; k < row.end; ++k) (*grad)[cols_[k]] += c * vals_[k];
    }
  }
  const double scale = loss_scale_ / static_cast<double>(items.size());
  if (grad) *grad *= scale;
  return total * scale;
}

Sample LogisticTask::draw(int component, Rng& rng) const {
  const auto& p = pool(component);
  Sample z;
  z.component = component;
  z.items.reserve(static_cast<std::size_t>(options_.minibatch));
  for (int b = 0; b < options_.minibatch; ++b) z.items.push_back(p[rng.uniform_index(p.size())]);
  return z;
}

double LogisticTask::loss(const Vector& w, const Sample& z) const { return batch(w, z.items, nullptr); }

Vector LogisticTask::gradient(const Vector& w, const Sample& z) const {
  Vector g;
  batch(w, z.items, &g);
  return g;
}

double LogisticTask::loss_and_gradient(const Vector& w, const Sample& z, Vector& grad) const {
  return batch(w, z.items, &grad);
}

std::vector<WeightedSample> LogisticTask::support(int component) const {
  const auto& p = pool(component);
  std::vector<WeightedSample> out;
  out.reserve(p.size());
  const double weight = 1.0 / static_cast<double>(p.size());
  for (auto idx : p) {
    Sample z;
    z.component = component;
    z.items = {idx};
    out.push_back({std::move(z), weight});
  }
  return out;
}

double LogisticTask::expected_loss(int component, const Vector& w) const {
  return batch(w, pool(component), nullptr);
}

Vector LogisticTask::expected_gradient(int component, const Vector& w) const {
  Vector g;
  batch(w, pool(component), &g);
  return g;
}

double LogisticTask::loss_bound(double radius) const {
  return loss_scale_ * log_loss(-radius * max_norm_);
}

double accuracy(const LogisticTask& task, const Vector& w, std::span<const Example* const> examples) {
  if (examples.empty()) return std::nan("");
  long correct = 0;
  for (const Example* e : examples) correct += task.margin(w, *e) > 0.0 ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

std::vector<double> component_accuracies(const LogisticTask& task, const Vector& w) {
  const Dataset& data = task.data();
  std::vector<long> correct(static_cast<std::size_t>(data.components), 0);
  std::vector<long> total(static_cast<std::size_t>(data.components), 0);
  for (const auto& e : data.test) {
    const auto c = static_cast<std::size_t>(e.component);
    ++total[c];
    correct[c] += task.margin(w, e) > 0.0 ? 1 : 0;
  }
  std::vector<double> out(correct.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = total[c] == 0 ? std::nan("")
                           : static_cast<double>(correct[c]) / static_cast<double>(total[c]);
  }
  return out;
}

std::vector<Sample> block_cyclic_stream(const LogisticTask& task, const ScheduleConfig& schedule,
                                        Rng rng) {
  schedule.validate();
  const int m = schedule.blocks;
  if (m != task.num_components()) {
    throw_argument(fmt::format("schedule has {} blocks, task has {} components", m, task.num_components()));
  }
  const auto b = static_cast<std::size_t>(task.options().minibatch);
  const std::size_t per_day = static_cast<std::size_t>(schedule.block_size) * b;

  std::vector<std::vector<std::uint32_t>> shuffled(static_cast<std::size_t>(m));
  std::vector<Rng> draws;
  for (int i = 0; i < m; ++i) {
    draws.push_back(rng.split(static_cast<std::uint64_t>(i)));
    const auto& p = task.pool(i);
    if (p.size() >= per_day * static_cast<std::size_t>(schedule.cycles)) {
      shuffled[static_cast<std::size_t>(i)] = p;
      draws.back().shuffle(shuffled[static_cast<std::size_t>(i)].begin(),
                           shuffled[static_cast<std::size_t>(i)].end());
    }
  }

  std::vector<Sample> stream;
  stream.reserve(static_cast<std::size_t>(schedule.total_steps()));
  for (long k = 0; k < schedule.cycles; ++k) {
    for (int i = 0; i < m; ++i) {
      const auto& chunk = shuffled[static_cast<std::size_t>(i)];
      for (long j = 0; j < schedule.block_size; ++j) {
        if (chunk.empty()) {
          stream.push_back(task.draw(i, draws[static_cast<std::size_t>(i)]));
          continue;
        }
        Sample z;
        z.component = i;
        const std::size_t start = static_cast<std::size_t>(k) * per_day + static_cast<std::size_t>(j) * b;
        z.items.assign(chunk.begin() + static_cast<std::ptrdiff_t>(start),
                       chunk.begin() + static_cast<std::ptrdiff_t>(start + b));
        stream.push_back(std::move(z));
      }
    }
  }
  return stream;
}

std::vector<Sample> shuffled_stream(const std::vector<Sample>& cyclic, const ScheduleConfig& schedule,
                                    Rng rng) {
  if (static_cast<long>(cyclic.size()) != schedule.total_steps()) {
    throw_argument(fmt::format("stream has {} samples, schedule needs {}", cyclic.size(), schedule.total_steps()));
  }
  std::vector<std::uint32_t> items;
  for (const auto& z : cyclic) items.insert(items.end(), z.items.begin(), z.items.end());
  rng.shuffle(items.begin(), items.end());

  std::vector<Sample> out;
  out.reserve(cyclic.size());
  std::size_t pos = 0;
  for (std::size_t t = 0; t < cyclic.size(); ++t) {
    Sample z;
    z.component = block_of_iteration(static_cast<long>(t + 1), schedule).block - 1;
    const std::size_t len = cyclic[t].items.size();
    z.items.assign(items.begin() + static_cast<std::ptrdiff_t>(pos),
                   items.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
    out.push_back(std::move(z));
  }
  return out;
}

std::uint64_t stream_content_hash(const std::vector<Sample>& stream) {
  std::vector<std::uint32_t> items;
  for (const auto& z : stream) items.insert(items.end(), z.items.begin(), z.items.end());
  std::sort(items.begin(), items.end());
  std::uint64_t h = fnv1a_u64(items.size());
  for (auto idx : items) h = fnv1a_u64(idx, h);
  return h;
}

}  // namespace semicyclic
