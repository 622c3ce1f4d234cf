#include "semicyclic/hard_instance.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "semicyclic/convex_solver.hpp"
#include "semicyclic/error.hpp"
#include "semicyclic/sgd.hpp"
#include "semicyclic/strategies.hpp"

namespace semicyclic {

std::string_view to_string(HardVariant variant) {
  return variant == HardVariant::kLipschitz ? "lipschitz" : "smooth";
}

HardVariant parse_hard_variant(std::string_view name) {
  if (name == "lipschitz") return HardVariant::kLipschitz;
  if (name == "smooth") return HardVariant::kSmooth;
  throw_argument(fmt::format("unknown hard-instance variant '{}'", name));
}

void HardInstanceConfig::validate() const {
  if (!(norm_bound > 0.0)) throw_argument("hard instance needs B > 0");
  if (cycles < 1 || block_size < 1) throw_argument("hard instance needs K, n >= 1");
  if (blocks < 2) throw_argument("hard instance needs m > 1");
  if (dimension != 0 && dimension < 4 * cycles + 1) {
    throw_argument(fmt::format("hard instance dimension {} below 4K + 1 = {}", dimension,
                               4 * cycles + 1));
  }
}

void PhiShape::validate() const {
  if (!(a > 0.0) || !(a <= gamma) || !std::isfinite(gamma)) {
    throw_argument(fmt::format("phi breakpoints need 0 < a/2 < a <= gamma (a={}, gamma={})", a, gamma));
  }
}

double phi(double x, const PhiShape& shape) {
  const double ax = std::abs(x);
  const double half = 0.5 * shape.a;
  if (ax <= half) return 0.0;
  if (ax <= shape.a) return 2.0 * (ax - half) * (ax - half);
  if (ax <= shape.gamma) return x * x - 0.5 * shape.a * shape.a;
  return 2.0 * shape.gamma * ax - shape.gamma * shape.gamma - 0.5 * shape.a * shape.a;
}

double phi_derivative(double x, const PhiShape& shape) {
  const double ax = std::abs(x);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  const double half = 0.5 * shape.a;
  if (ax <= half) return 0.0;
  if (ax <= shape.a) return 4.0 * (ax - half) * sign;
  if (ax <= shape.gamma) return 2.0 * x;
  return 2.0 * shape.gamma * sign;
}

namespace {

std::vector<Vector> canonical_directions(long count, int dimension) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long r = 0; r < count; ++r) out.push_back(Vector::Unit(dimension, r));
  return out;
}

}  // namespace

HardInstance::HardInstance(const HardInstanceConfig& config)
    : HardInstance(config, canonical_directions(4 * config.cycles, config.resolved_dimension())) {}

HardInstance::HardInstance(const HardInstanceConfig& config, std::vector<Vector> directions)
    : config_(config), dimension_(config.resolved_dimension()), directions_(std::move(directions)) {
  config_.validate();
  const double B = config_.norm_bound;
  const double K = static_cast<double>(config_.cycles);
  scale_ = config_.variant == HardVariant::kLipschitz ? 4.0 * B * K : B * B;
  shape_.gamma = 2.0 * B / (scale_ * std::sqrt(K));
  shape_.a = 1.0 / std::sqrt(64.0 * K * K * K);
  shape_.validate();

  if (static_cast<long>(directions_.size()) != 4 * config_.cycles) {
    throw_argument(fmt::format("hard instance needs 4K = {} directions, got {}",
                               4 * config_.cycles, directions_.size()));
  }
  for (std::size_t r = 0; r < directions_.size(); ++r) {
    if (directions_[r].size() != dimension_) throw_argument("direction dimension mismatch");
    for (std::size_t s = 0; s <= r; ++s) {
      const double expected = r == s ? 1.0 : 0.0;
      if (std::abs(directions_[r].dot(directions_[s]) - expected) > 1e-12) {
        throw_argument(fmt::format("directions {} and {} are not orthonormal", r + 1, s + 1));
      }
    }
  }
}

int HardInstance::label_of_block(int block) const {
  if (block < 0 || block >= config_.blocks) {
    throw_argument(fmt::format("block {} outside 0..{}", block, config_.blocks - 1));
  }
  return 2 * block < config_.blocks ? 1 : 2;
}

std::vector<double> HardInstance::coefficients(const Vector& w) const {
  if (w.size() != dimension_) throw_argument("hard instance: dimension mismatch");
  std::vector<double> c(directions_.size());
  for (std::size_t r = 0; r < directions_.size(); ++r) c[r] = directions_[r].dot(w);
  return c;
}

double HardInstance::hard_loss(const Vector& w, int label) const {
  const auto c = coefficients(w);
  const long K = config_.cycles;
  double total = 0.0;
  // c[r - 1] holds <v_r, w>
  if (label == 1) {
    total -= 2.0 * shape_.a * c[0];
    total += phi(c[static_cast<std::size_t>(4 * K - 1)], shape_);
    for (long k = 1; k <= 2 * K - 1; ++k) {
      total += phi(c[static_cast<std::size_t>(2 * k - 1)] - c[static_cast<std::size_t>(2 * k)], shape_);
    }
  } else if (label == 2) {
    for (long k = 1; k <= 2 * K; ++k) {
      total += phi(c[static_cast<std::size_t>(2 * k - 2)] - c[static_cast<std::size_t>(2 * k - 1)], shape_);
    }
  } else {
    throw_argument(fmt::format("hard instance label must be 1 or 2, got {}", label));
  }
  return scale_ / 8.0 * total;
}

Vector HardInstance::hard_gradient(const Vector& w, int label) const {
  const auto c = coefficients(w);
  const long K = config_.cycles;
  std::vector<double> g(c.size(), 0.0);
  if (label == 1) {
    g[0] -= 2.0 * shape_.a;
    g[static_cast<std::size_t>(4 * K - 1)] += phi_derivative(c[static_cast<std::size_t>(4 * K - 1)], shape_);
    for (long k = 1; k <= 2 * K - 1; ++k) {
      const auto lo = static_cast<std::size_t>(2 * k - 1);
      const double d = phi_derivative(c[lo] - c[lo + 1], shape_);
      g[lo] += d;
      g[lo + 1] -= d;
    }
  } else if (label == 2) {
    for (long k = 1; k <= 2 * K; ++k) {
      const auto lo = static_cast<std::size_t>(2 * k - 2);
      const double d = phi_derivative(c[lo] - c[lo + 1], shape_);
      g[lo] += d;
      g[lo + 1] -= d;
    }
  } else {
    throw_argument(fmt::format("hard instance label must be 1 or 2, got {}", label));
  }
  for (double& x : g) x *= scale_ / 8.0;
  return combine(g);
}

Vector HardInstance::combine(const std::vector<double>& coefficient_weights) const {
  Vector out = Vector::Zero(dimension_);
  for (std::size_t r = 0; r < directions_.size(); ++r) {
    if (coefficient_weights[r] != 0.0) out += coefficient_weights[r] * directions_[r];
  }
  return out;
}

Sample HardInstance::draw(int component, Rng&) const {
  Sample z;
  z.component = component;
  z.items = {static_cast<std::uint32_t>(label_of_block(component))};
  return z;
}

double HardInstance::loss(const Vector& w, const Sample& z) const {
  return hard_loss(w, static_cast<int>(z.items.at(0)));
}

Vector HardInstance::gradient(const Vector& w, const Sample& z) const {
  return hard_gradient(w, static_cast<int>(z.items.at(0)));
}

std::vector<WeightedSample> HardInstance::support(int component) const {
  Rng unused(0);
  return {{draw(component, unused), 1.0}};
}

double HardInstance::expected_loss(int component, const Vector& w) const {
  return hard_loss(w, label_of_block(component));
}

Vector HardInstance::expected_gradient(int component, const Vector& w) const {
  return hard_gradient(w, label_of_block(component));
}

double max_coefficient_beyond(const HardInstance& instance, const Vector& w, int frontier) {
  const auto c = instance.coefficients(w);
  double worst = 0.0;
  for (std::size_t r = static_cast<std::size_t>(std::max(frontier, 0)); r < c.size(); ++r) {
    worst = std::max(worst, std::abs(c[r]));
  }
  return worst;
}

namespace {

struct VerifiedOptimum {
  double value;
  double check;
  double gradient_mapping;
};

VerifiedOptimum solve_twice(const HardInstance& instance, const Subspace& subspace,
                            const StallOptions& options, Rng& rng, std::string_view label) {
  BallSolverOptions solver;
  solver.radius = instance.config().norm_bound;
  solver.smoothness = instance.smoothness();
  solver.tolerance = options.solver_tolerance;

  const auto objective = [&](const Vector& w) { return mixture_objective(instance, w); };
  const auto gradient = [&](const Vector& w) { return mixture_gradient(instance, w); };

  const Vector zero = Vector::Zero(instance.dimension());
  Vector random_start(instance.dimension());
  for (int i = 0; i < random_start.size(); ++i) random_start[i] = rng.normal();
  random_start = subspace.project(random_start);
  if (random_start.norm() > 0.0) {
    random_start *= 0.5 * solver.radius / random_start.norm();
  }

  const auto first = minimize_on_ball(objective, gradient, zero, subspace, solver);
  const auto second = minimize_on_ball(objective, gradient, random_start, subspace, solver);
  if (!first.converged || !second.converged) {
    throw Error(ErrorCategory::kSolver,
                fmt::format("{} optimum did not reach gradient-mapping norm {} (got {} and {})",
                            label, solver.tolerance, first.gradient_mapping_norm,
                            second.gradient_mapping_norm));
  }
  if (std::abs(first.value - second.value) > 1e-9) {
    throw Error(ErrorCategory::kSolver,
                fmt::format("{} optimum disagrees between starts: {} vs {}", label, first.value,
                            second.value));
  }
  return {std::min(first.value, second.value), std::max(first.value, second.value),
          std::max(first.gradient_mapping_norm, second.gradient_mapping_norm)};
}

}  // namespace

StallReport stall_demo(const HardInstanceConfig& config, const StallOptions& options) {
  const HardInstance instance(config);
  StallReport report;
  report.config = config;
  report.scale = instance.scale();
  report.a = instance.shape().a;
  report.gamma = instance.shape().gamma;

  const double B = config.norm_bound;
  const long K = config.cycles;
  Rng rng = Rng(options.seed).split(7);

  const auto full = solve_twice(instance, Subspace{}, options, rng, "full-span");
  std::vector<Vector> leading(instance.directions().begin(),
                              instance.directions().begin() + 2 * K);
  const auto restricted = solve_twice(instance, Subspace(leading), options, rng, "restricted-span");
  report.full_optimum = full.value;
  report.full_optimum_check = full.check;
  report.full_gradient_mapping = full.gradient_mapping;
  report.restricted_optimum = restricted.value;
  report.restricted_optimum_check = restricted.check;
  report.restricted_gradient_mapping = restricted.gradient_mapping;
  report.restricted_gap = restricted.value - full.value;
  report.gap_constant = config.variant == HardVariant::kLipschitz
                            ? B / (96.0 * static_cast<double>(K))
                            : B * B / (256.0 * static_cast<double>(K));
  report.gap_check_passed = report.restricted_gap >= report.gap_constant;
  if (config.variant == HardVariant::kSmooth) {
    report.notes.push_back(fmt::format(
        "smooth variant: the lower-bound statement is Omega(B^2/K^2) while its proof quotes a "
        "B^2/(256K) gap; measured restricted-span gap {:.6g} vs B^2/(256K) = {:.6g}",
        report.restricted_gap, report.gap_constant));
  }

  // cyclic consensus run, tracking span confinement at every query point
  const ScheduleConfig schedule = config.schedule();
  SgdConfig sgd;
  sgd.norm_bound = B;
  auto chain = make_chain(instance.dimension(), schedule.blocks, sgd, schedule.total_steps());
  Rng unused(0);
  for (long k = 1; k <= K; ++k) {
    SpanSnapshot snapshot;
    snapshot.cycle = k;
    const int frontier = static_cast<int>(2 * k + 1);
    for (int i = 0; i < schedule.blocks; ++i) {
      const Sample z = instance.draw(i, unused);
      for (long j = 0; j < schedule.block_size; ++j) {
        snapshot.max_beyond_frontier = std::max(
            snapshot.max_beyond_frontier, max_coefficient_beyond(instance, chain.iterate, frontier));
        step(chain, z, i, sgd, instance);
      }
    }
    snapshot.max_beyond_frontier = std::max(
        snapshot.max_beyond_frontier, max_coefficient_beyond(instance, chain.iterate, frontier));
    snapshot.coefficients = instance.coefficients(chain.iterate);
    for (std::size_t r = 0; r < snapshot.coefficients.size(); ++r) {
      if (snapshot.coefficients[r] != 0.0) snapshot.highest_revealed = static_cast<int>(r + 1);
    }
    report.max_span_leak = std::max(report.max_span_leak, snapshot.max_beyond_frontier);
    report.span_profile.push_back(std::move(snapshot));
  }
  report.excess_last = mixture_objective(instance, chain.iterate) - report.full_optimum;
  report.excess_average = mixture_objective(instance, full_average(chain)) - report.full_optimum;

  for (int rep = 0; rep < options.iid_repetitions; ++rep) {
    const auto run = run_iid(instance, schedule, sgd, Rng(options.seed).split(100 + rep).seed());
    report.iid_excess_last.push_back(mixture_objective(instance, run.final_iterate) -
                                     report.full_optimum);
    report.iid_excess_average.push_back(mixture_objective(instance, run.full_average) -
                                        report.full_optimum);
  }
  if (!report.iid_excess_last.empty()) {
    double last = 0.0, avg = 0.0;
    for (std::size_t r = 0; r < report.iid_excess_last.size(); ++r) {
      last += report.iid_excess_last[r];
      avg += report.iid_excess_average[r];
    }
    report.iid_mean_excess_last = last / static_cast<double>(report.iid_excess_last.size());
    report.iid_mean_excess_average = avg / static_cast<double>(report.iid_excess_average.size());
  }
  return report;
}

}  // namespace semicyclic
