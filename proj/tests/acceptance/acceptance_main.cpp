// Acceptance battery: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "semicyclic/convex_solver.hpp"
#include "semicyclic/error.hpp"
#include "semicyclic/experiment.hpp"
#include "semicyclic/hard_instance.hpp"
#include "semicyclic/prod.hpp"
#include "semicyclic/report.hpp"
#include "semicyclic/sgd.hpp"
#include "semicyclic/strategies.hpp"
#include "semicyclic/synthetic_tasks.hpp"

namespace sc = semicyclic;
using sc::Vector;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// ---------------------------------------------------------------- AC1
// f_t(w) = <g, w> + lambda |w - z|^2 / 8 with |g| <= 1/2, |z| <= 1, lambda in [0, 1],
// so |grad f_t| <= 1 on the unit ball. Packed into Sample::point as (g, z, lambda).
class OnlineSequence final : public sc::StochasticProblem {
 public:
  explicit OnlineSequence(int dim) : dim_(dim) {}
  int dimension() const override { return dim_; }
  int num_components() const override { return 1; }
  sc::Sample draw(int, sc::Rng&) const override { throw sc::Error(sc::ErrorCategory::kContract, "replay only"); }
  double loss(const Vector& w, const sc::Sample& z) const override {
    const auto g = z.point.head(dim_);
    const auto c = z.point.segment(dim_, dim_);
    return g.dot(w) + z.point[2 * dim_] * (w - c).squaredNorm() / 8.0;
  }
  Vector gradient(const Vector& w, const sc::Sample& z) const override {
    return z.point.head(dim_) + z.point[2 * dim_] * (w - z.point.segment(dim_, dim_)) / 4.0;
  }

 private:
  int dim_;
};

// Exact best fixed point in the unit ball: the objective is an isotropic
// quadratic (or linear) so the constrained minimiser is a projection.
double best_fixed_loss(const OnlineSequence& p, const std::vector<sc::Sample>& seq, int dim) {
  Vector g = Vector::Zero(dim), lz = Vector::Zero(dim);
  double lambda = 0;
  for (const auto& s : seq) {
    g += s.point.head(dim);
    lz += s.point[2 * dim] * s.point.segment(dim, dim);
    lambda += s.point[2 * dim];
  }
  Vector u;
  if (lambda > 1e-12) {
    u = sc::project((lz / 4.0 - g) * (4.0 / lambda), 1.0);
  } else {
    u = g.norm() > 0 ? Vector(-g / g.norm()) : Vector(Vector::Zero(dim));
  }
  double total = 0;
  for (const auto& s : seq) total += p.loss(u, s);
  return total;
}

Vector random_vector(sc::Rng& rng, int dim, double radius) {
  Vector v(dim);
  for (int c = 0; c < dim; ++c) v[c] = rng.normal();
  return v * (radius * rng.uniform() / v.norm());
}

Outcome ac1() {
  const int dim = 5;
  const OnlineSequence problem(dim);
  sc::Rng rng(101);
  long runs = 0, violations = 0;
  double worst_ratio = 0;
  auto check = [&](const std::vector<sc::Sample>& seq) {
    const long T = static_cast<long>(seq.size());
    sc::SgdConfig cfg;  // B = 1, eta = B / sqrt(2T), w_1 = 0
    auto chain = sc::make_chain(dim, 1, cfg, T);
    for (const auto& s : seq) sc::step(chain, s, 0, cfg, problem);
    const double regret = chain.cumulative_loss - best_fixed_loss(problem, seq, dim);
    const double bound = std::sqrt(2.0 * T);
    ++runs;
    if (regret > bound) ++violations;
    worst_ratio = std::max(worst_ratio, regret / bound);
  };
  for (long T : {100L, 1000L}) {
    for (int r = 0; r < 1000; ++r) {
      std::vector<sc::Sample> seq;
      const int kind = r % 3;  // linear, quadratic, mixed
      for (long t = 0; t < T; ++t) {
        Vector point = Vector::Zero(2 * dim + 1);
        if (kind != 1) point.head(dim) = random_vector(rng, dim, 0.5);
        if (kind != 0) {
          point.segment(dim, dim) = random_vector(rng, dim, 1.0);
          point[2 * dim] = rng.uniform();
        }
        seq.push_back({0, {}, point});
      }
      check(seq);
    }
    // adversarial alternating linear losses +-e1/2 and a drifting variant
    for (int variant = 0; variant < 2; ++variant) {
      std::vector<sc::Sample> seq;
      for (long t = 0; t < T; ++t) {
        Vector point = Vector::Zero(2 * dim + 1);
        const double sign = (t % 2 == 0) ? 1.0 : -1.0;
        point[0] = variant == 0 ? 0.5 * sign : (t < T / 2 ? 0.5 : -0.5);
        seq.push_back({0, {}, point});
      }
      check(seq);
    }
  }
  return {violations == 0, fmt::format("{} sequences, {} violations, worst regret/bound {:.3f}", runs, violations,
                                       worst_ratio)};
}

// ---------------------------------------------------------------- AC2 / AC3
std::vector<std::vector<double>> loss_battery(sc::Rng& rng, int experts, long T, int pattern) {
  std::vector<std::vector<double>> losses(static_cast<std::size_t>(T), std::vector<double>(experts + 1));
  std::vector<double> bias(experts + 1);
  for (auto& b : bias) b = rng.uniform() - 0.5;
  for (long t = 0; t < T; ++t) {
    for (int j = 0; j <= experts; ++j) {
      double l = 0;
      switch (pattern) {
        case 0: l = 2 * rng.uniform() - 1; break;                                // i.i.d. uniform
        case 1: l = std::clamp(bias[j] + 0.5 * (2 * rng.uniform() - 1), -1.0, 1.0); break;  // biased experts
        default: {                                                               // regime switches
          const bool flip = (t / 500) % 2 == 1;
          l = ((j == 0) != flip) ? 1.0 : -1.0 + 0.2 * rng.uniform();
        }
      }
      losses[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = l;
    }
  }
  return losses;
}

// Direct multiplicative-weights computation with renormalisation.
std::vector<double> direct_prod_regret(const std::vector<std::vector<double>>& losses, double eta) {
  const int n = static_cast<int>(losses[0].size());
  std::vector<double> q(n, eta / (n - 1));
  q[0] = 1 - eta;
  double expected = 0;
  std::vector<double> totals(n, 0.0);
  for (const auto& l : losses) {
    double z = 0;
    for (double x : q) z += x;
    for (int j = 0; j < n; ++j) {
      expected += q[j] / z * l[j];
      totals[j] += l[j];
    }
    for (int j = 1; j < n; ++j) q[j] *= 1 + eta * (l[0] - l[j]);
    double s = 0;
    for (double x : q) s += x;
    for (double& x : q) x /= s;
  }
  std::vector<double> regret(n);
  for (int j = 0; j < n; ++j) regret[j] = expected - totals[j];
  return regret;
}

struct ProdBattery {
  long runs = 0, anchor_violations = 0, expert_violations = 0, oracle_mismatches = 0;
  double worst_anchor = -1e300, worst_expert = -1e300;
};

ProdBattery prod_battery() {
  ProdBattery b;
  const long T = 10000;
  const double M = 1.0;
  sc::Rng rng(202);
  for (int r = 0; r < 1000; ++r) {
    const int experts = std::array<int, 3>{1, 2, 4}[static_cast<std::size_t>(r % 3)];
    const auto losses = loss_battery(rng, experts, T, (r / 3) % 3);
    ++b.runs;
    const double anchor_rate = 1.0 / (4.0 * M);
    const auto a = sc::run_prod(losses, anchor_rate, M);
    const auto oracle = direct_prod_regret(losses, anchor_rate);
    if (std::abs(oracle[0] - a.regret[0]) > 1e-6 * std::max(1.0, std::abs(oracle[0]))) ++b.oracle_mismatches;
    if (a.regret[0] > 1.0 + anchor_rate) ++b.anchor_violations;
    b.worst_anchor = std::max(b.worst_anchor, a.regret[0] - (1.0 + anchor_rate));

    const double eta = (1.0 / (2 * M)) * std::sqrt(std::log(experts * M * T) / T);
    const auto c = sc::run_prod(losses, eta, M);
    const double bound = 4 * eta * M * M * T + std::log(experts / eta) / eta;
    for (int j = 1; j <= experts; ++j) {
      if (c.regret[j] > bound) ++b.expert_violations;
      b.worst_expert = std::max(b.worst_expert, c.regret[j] - bound);
    }
  }
  return b;
}

// ---------------------------------------------------------------- AC4
Outcome ac4() {
  const long points = 100000;
  long violations = 0;
  for (long k = 1; k <= points; ++k) {
    const double z = -0.499 + 10.499 * static_cast<double>(k) / points;
    const double l = std::log1p(z);
    if (z - z * z > l + 1e-12 || l > z + 1e-12) ++violations;
  }
  return {violations == 0, fmt::format("{} grid points, {} violations", points, violations)};
}

// ---------------------------------------------------------------- AC5
Outcome ac5() {
  bool ok = true;
  std::string detail;
  for (long K : {2L, 4L}) {
    std::vector<double> excess;
    for (long n : {500L, 1000L}) {
      sc::HardInstanceConfig c;
      c.cycles = K;
      c.blocks = 2;
      c.block_size = n;
      sc::StallOptions options;
      options.seed = 5;
      options.iid_repetitions = 1;
      const auto r = sc::stall_demo(c, options);
      const bool confined = r.max_span_leak < 1e-9;
      const bool oracle = r.full_gradient_mapping < 1e-8 && r.restricted_gradient_mapping < 1e-8 &&
                          std::abs(r.full_optimum - r.full_optimum_check) < 1e-9 &&
                          std::abs(r.restricted_optimum - r.restricted_optimum_check) < 1e-9;
      const bool gap = r.restricted_gap >= 1.0 / (96.0 * K);
      ok = ok && confined && oracle && gap;
      excess.push_back(r.excess_last);
      detail += fmt::format("K={} n={}: leak {:.1e} gap {:.5f}>={:.5f} excess {:.5f}; ", K, n, r.max_span_leak,
                            r.restricted_gap, 1.0 / (96.0 * K), r.excess_last);
    }
    const bool stalls = excess[1] >= 0.99 * excess[0];
    ok = ok && stalls;
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- AC6
double pluralistic_excess(const sc::StochasticProblem& task, const sc::ScheduleConfig& schedule, double optimum,
                          std::uint64_t seed) {
  sc::SgdConfig cfg;
  const auto r = sc::run_pluralistic_averaging(task, schedule, cfg, seed);
  return sc::pluralistic_objective(task, r.model.per_component) - optimum;
}

double mixture_optimum(const sc::StochasticProblem& task, double smoothness) {
  sc::BallSolverOptions o;
  o.smoothness = smoothness;
  o.tolerance = 1e-10;
  const auto r = sc::minimize_mixture(task, Vector::Zero(task.dimension()), o);
  if (!r.converged) throw sc::Error(sc::ErrorCategory::kSolver, "mixture optimum did not converge");
  return r.value;
}

Outcome ac6() {
  sc::FiniteLogisticSpec spec;
  spec.seed = 61;
  const auto task = sc::finite_logistic_task(spec);
  const double optimum = mixture_optimum(task, 0.25);
  std::vector<double> means;
  std::string detail;
  bool ok = true;
  for (long K : {10L, 100L}) {
    const sc::ScheduleConfig schedule{K, 2, 300};
    const double T = static_cast<double>(K * 2 * 300);
    std::vector<double> ex;
    for (std::uint64_t s = 0; s < 10; ++s) ex.push_back(pluralistic_excess(task, schedule, optimum, 600 + s));
    const double bound = 3.0 * std::sqrt(2.0 / T);
    means.push_back(mean(ex));
    ok = ok && means.back() <= bound;
    detail += fmt::format("T={:.0f}: excess {:.5f} <= {:.5f}; ", T, means.back(), bound);
  }
  const double ratio = means[1] / means[0];
  ok = ok && ratio >= 0.2 && ratio <= 0.7;
  detail += fmt::format("ratio {:.3f} in [0.2, 0.7]", ratio);
  return {ok, detail};
}

// ---------------------------------------------------------------- AC7
Outcome ac7() {
  sc::FiniteLogisticSpec spec;
  spec.kind = sc::FiniteTaskKind::kIdentical;
  spec.components = 12;
  spec.seed = 71;
  const auto base = sc::finite_logistic_task(spec);
  const long T = 6000;
  std::vector<double> excess_by_m;
  std::string detail;
  for (int m : {2, 6, 12}) {
    spec.components = m;
    const auto task = sc::finite_logistic_task(spec);
    const double optimum = mixture_optimum(task, 0.25);
    const sc::ScheduleConfig schedule{10, m, T / (10 * m)};
    std::vector<double> ex;
    for (std::uint64_t s = 0; s < 10; ++s) {
      // the same stream for every m: draws from one pool, tagged with the block in force
      sc::Rng rng(sc::Rng(700 + s).split(sc::kSampleStream));
      std::vector<sc::Sample> stream;
      for (long t = 1; t <= T; ++t) {
        auto z = base.draw(0, rng);
        z.component = sc::block_of_iteration(t, schedule).block - 1;
        stream.push_back(std::move(z));
      }
      sc::ReplaySource source(std::move(stream));
      sc::SgdConfig cfg;
      const auto r = sc::run_pluralistic_averaging(task, schedule, cfg, source);
      ex.push_back(sc::pluralistic_objective(task, r.model.per_component) - optimum);
    }
    excess_by_m.push_back(mean(ex));
    detail += fmt::format("m={}: {:.5f}; ", m, excess_by_m.back());
  }
  double worst = 0;
  for (double e : excess_by_m) worst = std::max(worst, std::abs(e - excess_by_m[0]) / excess_by_m[0]);
  detail += fmt::format("max relative change {:.3f}", worst);
  return {worst < 0.25, detail};
}

// ---------------------------------------------------------------- AC8
Outcome ac8() {
  const sc::QuadraticTask task({0.3}, 0.5, 1.0);
  sc::FiniteLogisticSpec spec;
  spec.components = 1;
  spec.skew = sc::SkewSpec{{0.5}};
  spec.seed = 81;
  const auto logistic = sc::finite_logistic_task(spec);
  bool ok = true;
  long compared = 0;
  for (const sc::StochasticProblem* p : {static_cast<const sc::StochasticProblem*>(&task),
                                         static_cast<const sc::StochasticProblem*>(&logistic)}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const sc::ScheduleConfig schedule{7, 1, 50};
      sc::SgdConfig cfg;
      const auto plural = sc::run_pluralistic_averaging(*p, schedule, cfg, seed);
      const auto averaged = sc::run_consensus(*p, schedule, cfg, seed);
      const Vector& a = plural.model.per_component.at(0);
      const Vector& b = averaged.full_average;
      ok = ok && a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
      ++compared;
    }
  }
  return {ok, fmt::format("{} seeded runs compared bitwise", compared)};
}

// ---------------------------------------------------------------- AC9
Outcome ac9() {
  const double B = 1.0;
  const int m = 6;
  const sc::ScheduleConfig schedule{10, m, 1000};
  const double T = 60000;
  const double slack = 4.0 * std::sqrt(B * B * std::log(B * T / m) / (T / m));
  bool ok = true;
  std::string detail;
  for (auto kind : {sc::FiniteTaskKind::kIdentical, sc::FiniteTaskKind::kConflicting}) {
    sc::FiniteLogisticSpec spec;
    spec.kind = kind;
    spec.components = m;
    spec.seed = 91;
    const auto task = sc::finite_logistic_task(spec, true, B);
    std::vector<double> hedged, plural, separate;
    for (std::uint64_t s = 0; s < 10; ++s) {
      sc::SgdConfig cfg;
      cfg.norm_bound = B;
      const std::uint64_t seed = 900 + s;
      hedged.push_back(sc::pluralistic_objective(task, sc::run_pluralistic_hedging(task, schedule, cfg, seed).model.per_component));
      plural.push_back(sc::pluralistic_objective(task, sc::run_pluralistic_averaging(task, schedule, cfg, seed).model.per_component));
      separate.push_back(sc::pluralistic_objective(task, sc::run_per_component(task, schedule, cfg, seed).model.per_component));
    }
    const double h = mean(hedged), p = mean(plural), q = mean(separate);
    const bool pass = h <= std::min(p, q) + slack;
    ok = ok && pass;
    detail += fmt::format("{}: hedged {:.4f} plural {:.4f} separate {:.4f}; ",
                          kind == sc::FiniteTaskKind::kIdentical ? "identical" : "conflicting", h, p, q);
  }
  detail += fmt::format("slack {:.4f}", slack);
  return {ok, detail};
}

// ---------------------------------------------------------------- AC10 / AC11
const sc::DayStat& final_day(const sc::EvaluationReport& r, std::size_t s) { return r.aggregate[s].back(); }

std::size_t strategy_index(const sc::EvaluationReport& r, sc::StrategyKind kind) {
  const auto& v = r.config.strategies;
  const auto it = std::find(v.begin(), v.end(), kind);
  if (it == v.end()) throw sc::Error(sc::ErrorCategory::kArgument, "strategy missing from config");
  return static_cast<std::size_t>(it - v.begin());
}

Outcome ac10(const sc::EvaluationReport& r) {
  const auto cons = strategy_index(r, sc::StrategyKind::kConsensus);
  const auto plur = strategy_index(r, sc::StrategyKind::kPluralisticAveraging);
  const auto sep = strategy_index(r, sc::StrategyKind::kPerComponent);
  const auto iid = strategy_index(r, sc::StrategyKind::kIid);
  const auto& c = final_day(r, cons);
  const auto& p = final_day(r, plur);
  const auto& i = final_day(r, iid);
  const double pooled = std::sqrt(0.5 * (c.stddev * c.stddev + p.stddev * p.stddev));
  const bool gap = p.mean - c.mean > pooled;
  bool early = true;
  for (std::size_t k = 0; k < 3 && k < r.aggregate[sep].size(); ++k) early = early && r.aggregate[sep][k].mean < r.aggregate[plur][k].mean;
  const bool iid_ok = i.mean < p.mean;
  return {gap && early && iid_ok,
          fmt::format("final: pluralistic {:.4f} consensus {:.4f} (pooled sd {:.4f}) iid {:.4f}{}; "
                      "per-component below pluralistic on days 1-3: {}",
                      p.mean, c.mean, pooled, i.mean, (i.mean >= c.mean && i.mean <= p.mean) ? " (between)" : "",
                      early ? "yes" : "no")};
}

Outcome ac11(const sc::EvaluationReport& first) {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "semicyclic_acceptance";
  fs::remove_all(root);
  const auto a = sc::emit_report(first, (root / "a").string());
  const auto replay = sc::run_experiment(sc::load_experiment_config(a.manifest_path));
  const auto b = sc::emit_report(replay, (root / "b").string());
  bool same = a.artifacts.size() == b.artifacts.size();
  for (std::size_t k = 0; same && k < a.artifacts.size(); ++k) {
    same = sc::read_file((root / "a" / a.artifacts[k].name).string()) ==
           sc::read_file((root / "b" / b.artifacts[k].name).string());
  }
  same = same && sc::read_file(a.manifest_path) == sc::read_file(b.manifest_path);
  fs::remove_all(root);
  return {same, fmt::format("{} CSVs and manifest re-run from manifest: {}", a.artifacts.size(),
                            same ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const std::string& id, double limit, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    const double secs = seconds_since(start);
    if (limit > 0 && secs > limit) {
      o.pass = false;
      o.detail += fmt::format(" [over the {:.0f} s budget]", limit);
    }
    if (!o.pass) ++failures;
    fmt::print("{} {} ({:.1f} s) {}\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail);
    std::fflush(stdout);
  };

  report("AC1", 30, ac1);
  ProdBattery prod;
  report("AC2", 30, [&] {
    prod = prod_battery();
    return Outcome{prod.anchor_violations == 0 && prod.oracle_mismatches == 0,
                   fmt::format("{} runs, {} violations of 1 + eta, worst margin {:.3g}, {} oracle mismatches",
                               prod.runs, prod.anchor_violations, prod.worst_anchor, prod.oracle_mismatches)};
  });
  report("AC3", 0, [&] {
    return Outcome{prod.runs == 1000 && prod.expert_violations == 0,
                   fmt::format("{} runs, {} expert-bound violations, worst margin {:.3g}", prod.runs,
                               prod.expert_violations, prod.worst_expert)};
  });
  report("AC4", 0, ac4);
  report("AC5", 120, ac5);
  report("AC6", 0, ac6);
  report("AC7", 0, ac7);
  report("AC8", 0, ac8);
  report("AC9", 0, ac9);

  std::optional<sc::EvaluationReport> desk;
  report("AC10", 300, [&] {
    desk = sc::run_experiment(sc::load_experiment_config(SEMICYCLIC_DESK_CONFIG));
    return ac10(*desk);
  });
  report("AC11", 0, [&] {
    if (!desk) return Outcome{false, "desk run unavailable"};
    return ac11(*desk);
  });

  fmt::print("{} of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
