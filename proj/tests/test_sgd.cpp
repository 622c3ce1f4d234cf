#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "semicyclic/error.hpp"
#include "semicyclic/sgd.hpp"

using namespace semicyclic;

namespace {

// f(w, z) = <z.point, w>; the sample carries its own gradient
class Linear final : public StochasticProblem {
 public:
  explicit Linear(int dim, int comps = 1) : dim_(dim), comps_(comps) {}
  int dimension() const override { return dim_; }
  int num_components() const override { return comps_; }
  Sample draw(int component, Rng& rng) const override {
    Sample z;
    z.component = component;
    z.point = Vector(dim_);
    for (int c = 0; c < dim_; ++c) z.point[c] = rng.uniform(-1.0, 1.0);
    return z;
  }
  double loss(const Vector& w, const Sample& z) const override { return z.point.dot(w); }
  Vector gradient(const Vector&, const Sample& z) const override { return z.point; }

 private:
  int dim_, comps_;
};

Sample with_point(Vector p, int component = 0) {
  Sample z;
  z.component = component;
  z.point = std::move(p);
  return z;
}

}  // namespace

TEST(Project, InsideBallUnchanged) {
  const Vector w = (Vector(2) << 3, 4).finished();
  EXPECT_EQ(project(w, 10.0), w);
}

TEST(Project, ScalesOntoSphere) {
  const Vector p = project((Vector(2) << 3, 4).finished(), 1.0);
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
  EXPECT_EQ(project(Vector::Zero(3), 0.5), Vector::Zero(3));
}

TEST(Project, Idempotent) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Vector w(4);
    for (int c = 0; c < 4; ++c) w[c] = 3.0 * rng.normal();
    const Vector once = project(w, 1.5);
    EXPECT_LE(once.norm(), 1.5 + 1e-12);
    EXPECT_TRUE(project(once, 1.5).isApprox(once, 1e-15));
  }
}

TEST(StepSize, HorizonDefault) {
  EXPECT_DOUBLE_EQ(StepSize::horizon_default().resolve(1.0, 2), 0.5);
  EXPECT_DOUBLE_EQ(StepSize::horizon_default().resolve(2.0, 8), 0.5);
  EXPECT_DOUBLE_EQ(StepSize::constant(0.3).resolve(1.0, 100), 0.3);
  EXPECT_THROW(StepSize::constant(-1.0).resolve(1.0, 10), Error);
}

TEST(Step, SingleExplicitStep) {
  const Linear problem(3);
  SgdConfig cfg;
  cfg.step_size = StepSize::constant(0.5);
  cfg.use_projection = false;
  auto chain = make_chain(3, 1, cfg, 10);
  const double loss = step(chain, with_point(Vector::Unit(3, 0)), 0, cfg, problem);
  EXPECT_EQ(loss, 0.0);
  EXPECT_EQ(chain.iterate, (Vector(3) << -0.5, 0, 0).finished());
  EXPECT_EQ(chain.steps, 1);
}

TEST(Step, ZeroGradientIsFixedPoint) {
  const Linear problem(2);
  SgdConfig cfg;
  cfg.initial_iterate = (Vector(2) << 0.1, -0.2).finished();
  auto chain = make_chain(2, 1, cfg, 5);
  for (int k = 0; k < 5; ++k) step(chain, with_point(Vector::Zero(2)), 0, cfg, problem);
  EXPECT_EQ(chain.iterate, *cfg.initial_iterate);
}

TEST(Step, RecordsPreUpdateIterateAndLoss) {
  const Linear problem(1, 2);
  SgdConfig cfg;
  cfg.step_size = StepSize::constant(0.25);
  cfg.use_projection = false;
  auto chain = make_chain(1, 2, cfg, 4);
  // w1 = 0, g = 1 -> w2 = -0.25 ; loss at w1 = 0
  step(chain, with_point(Vector::Constant(1, 1.0), 0), 0, cfg, problem);
  // loss at w2 = -0.25 * 2 = -0.5 ; w3 = -0.75
  const double l2 = step(chain, with_point(Vector::Constant(1, 2.0), 1), 1, cfg, problem);
  EXPECT_DOUBLE_EQ(l2, -0.5);
  EXPECT_DOUBLE_EQ(chain.cumulative_loss, -0.5);
  EXPECT_DOUBLE_EQ(chain.block_sums[0][0], 0.0);
  EXPECT_DOUBLE_EQ(chain.block_sums[1][0], -0.25);
  EXPECT_DOUBLE_EQ(chain.total_sum[0], -0.25);
  EXPECT_DOUBLE_EQ(chain.iterate[0], -0.75);
  EXPECT_EQ(chain.block_counts[0] + chain.block_counts[1], chain.steps);
}

TEST(Step, ComponentMismatchRejected) {
  const Linear problem(1, 2);
  SgdConfig cfg;
  auto chain = make_chain(1, 2, cfg, 4);
  EXPECT_THROW(step(chain, with_point(Vector::Zero(1), 1), 0, cfg, problem), Error);
}

TEST(Step, NonFiniteGradientDiverges) {
  const Linear problem(2);
  SgdConfig cfg;
  auto chain = make_chain(2, 1, cfg, 4);
  step(chain, with_point(Vector::Constant(2, 0.1)), 0, cfg, problem);
  try {
    step(chain, with_point((Vector(2) << std::numeric_limits<double>::infinity(), 0).finished()), 0, cfg, problem);
    FAIL() << "no divergence error";
  } catch (const ChainDivergedError& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kDiverged);
    EXPECT_EQ(e.step(), 2);
  }
}

TEST(Step, ProjectionKeepsIterateInBall) {
  const Linear problem(3);
  SgdConfig cfg;
  cfg.norm_bound = 0.7;
  cfg.step_size = StepSize::constant(2.0);
  auto chain = make_chain(3, 1, cfg, 100);
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    step(chain, problem.draw(0, rng), 0, cfg, problem);
    ASSERT_LE(chain.iterate.norm(), 0.7 + 1e-12);
  }
}

TEST(Regret, ConstantLossesAgainstOrigin) {
  const Linear problem(2);
  SgdConfig cfg;
  auto chain = make_chain(2, 1, cfg, 3);
  // zero gradients keep w at 0: regret against w = 0 on these losses is 0
  std::vector<double> comparator;
  for (int k = 0; k < 3; ++k) {
    step(chain, with_point(Vector::Zero(2)), 0, cfg, problem);
    comparator.push_back(0.0);
  }
  EXPECT_EQ(regret_against(chain, comparator), 0.0);
  comparator.pop_back();
  EXPECT_THROW(regret_against(chain, comparator), Error);
}

TEST(Regret, SingleSample) {
  const Linear problem(2);
  SgdConfig cfg;
  cfg.initial_iterate = (Vector(2) << 0.2, 0.1).finished();
  auto chain = make_chain(2, 1, cfg, 1);
  const Sample z = with_point((Vector(2) << 1.0, -1.0).finished());
  const Vector u = (Vector(2) << -0.5, 0.5).finished();
  step(chain, z, 0, cfg, problem);
  const double expected = problem.loss(*cfg.initial_iterate, z) - problem.loss(u, z);
  EXPECT_DOUBLE_EQ(regret_against(chain, std::vector<double>{problem.loss(u, z)}), expected);
}

TEST(Regret, AlternatingLinearLossesWithinCertificate) {
  const Linear problem(1);
  SgdConfig cfg;  // B = 1, eta = 1/sqrt(2T)
  const long T = 100;
  auto chain = make_chain(1, 1, cfg, T);
  double sum_g = 0.0;
  for (long t = 0; t < T; ++t) {
    // the adversary plays against the sign of the current iterate
    const double g = chain.iterate[0] > 0 ? 1.0 : -1.0;
    sum_g += g;
    step(chain, with_point(Vector::Constant(1, g)), 0, cfg, problem);
  }
  // best fixed comparator in [-1, 1]: -|sum g|
  const double regret = chain.cumulative_loss + std::abs(sum_g);
  EXPECT_LE(regret, std::sqrt(2.0 * T));
  EXPECT_NEAR(std::sqrt(2.0 * T), 14.142135623730951, 1e-12);
}

TEST(Averages, BlockAndFull) {
  const Linear problem(2, 2);
  SgdConfig cfg;
  cfg.step_size = StepSize::constant(1.0);
  cfg.use_projection = false;
  auto chain = make_chain(2, 2, cfg, 2);
  // block 0 sees w1 = 0 then w2 = (1, 0)
  step(chain, with_point((Vector(2) << -1, 0).finished(), 0), 0, cfg, problem);
  step(chain, with_point(Vector::Zero(2), 0), 0, cfg, problem);
  EXPECT_EQ(block_average(chain, 0), (Vector(2) << 0.5, 0).finished());
  EXPECT_THROW(block_average(chain, 1), Error);
  EXPECT_EQ(full_average(chain), (Vector(2) << 0.5, 0).finished());
}

TEST(Averages, IdenticalIteratesAverageToThemselves) {
  const Linear problem(2);
  SgdConfig cfg;
  cfg.initial_iterate = (Vector(2) << 0.3, 0.4).finished();
  auto chain = make_chain(2, 1, cfg, 7);
  for (int k = 0; k < 7; ++k) step(chain, with_point(Vector::Zero(2)), 0, cfg, problem);
  EXPECT_TRUE(block_average(chain, 0).isApprox(*cfg.initial_iterate, 1e-15));
  EXPECT_TRUE(full_average(chain).isApprox(*cfg.initial_iterate, 1e-15));
}

TEST(Config, Validation) {
  SgdConfig cfg;
  cfg.norm_bound = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.norm_bound = 1.0;
  cfg.step_size = StepSize::constant(0.0);
  EXPECT_THROW(cfg.validate(), Error);
}
