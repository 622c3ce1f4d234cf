#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>

#include "semicyclic/error.hpp"
#include "semicyclic/rng.hpp"
#include "semicyclic/schedule.hpp"
#include "semicyclic/synthetic_tasks.hpp"

using namespace semicyclic;

TEST(Schedule, FirstIterationIsOne) {
  EXPECT_EQ(schedule_index(1, 1, 1, {3, 4, 10}), 1);
  EXPECT_EQ(schedule_index(1, 1, 1, {1, 1, 1}), 1);
}

TEST(Schedule, IndexOfInteriorTuple) {
  // enumerate in cycle/block/step order and find (2, 3, 5)
  const ScheduleConfig cfg{3, 4, 10};
  long t = 0, found = -1;
  for (long k = 1; k <= 3; ++k)
    for (int i = 1; i <= 4; ++i)
      for (long j = 1; j <= 10; ++j) {
        ++t;
        if (k == 2 && i == 3 && j == 5) found = t;
      }
  EXPECT_EQ(found, 65);
  EXPECT_EQ(schedule_index(2, 3, 5, cfg), 65);
  EXPECT_EQ(block_of_iteration(65, cfg), (BlockPosition{2, 3, 5}));
}

TEST(Schedule, LastIterationIsT) {
  const ScheduleConfig cfg{3, 4, 10};
  EXPECT_EQ(schedule_index(3, 4, 10, cfg), cfg.total_steps());
  EXPECT_EQ(block_of_iteration(120, cfg), (BlockPosition{3, 4, 10}));
  EXPECT_EQ(block_of_iteration(1, cfg), (BlockPosition{1, 1, 1}));
}

TEST(Schedule, BijectionOnSmallConfigs) {
  for (long K = 1; K <= 3; ++K)
    for (int m = 1; m <= 4; ++m)
      for (long n = 1; n <= 3; ++n) {
        const ScheduleConfig cfg{K, m, n};
        std::set<long> seen;
        std::vector<long> per_block(static_cast<std::size_t>(m), 0);
        for (long k = 1; k <= K; ++k)
          for (int i = 1; i <= m; ++i)
            for (long j = 1; j <= n; ++j) {
              const long t = schedule_index(k, i, j, cfg);
              ASSERT_GE(t, 1);
              ASSERT_LE(t, cfg.total_steps());
              seen.insert(t);
              EXPECT_EQ(block_of_iteration(t, cfg), (BlockPosition{k, i, j}));
              ++per_block[static_cast<std::size_t>(i - 1)];
            }
        EXPECT_EQ(static_cast<long>(seen.size()), cfg.total_steps());
        for (long c : per_block) EXPECT_EQ(c, cfg.steps_per_block());
      }
}

TEST(Schedule, OutOfRangeIsArgumentError) {
  const ScheduleConfig cfg{2, 3, 4};
  for (auto bad : {std::array<long, 3>{0, 1, 1}, {3, 1, 1}, {1, 0, 1}, {1, 4, 1}, {1, 1, 0}, {1, 1, 5}}) {
    try {
      schedule_index(bad[0], static_cast<int>(bad[1]), bad[2], cfg);
      FAIL() << "accepted out-of-range tuple";
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::kArgument);
    }
  }
  EXPECT_THROW(block_of_iteration(0, cfg), Error);
  EXPECT_THROW(block_of_iteration(25, cfg), Error);
  EXPECT_THROW((ScheduleConfig{0, 1, 1}.validate()), Error);
}

TEST(Rng, ReproducibleAndSplitIndependentOfConsumption) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
  const Rng fresh(42);
  Rng child1 = fresh.split(3);
  Rng child2 = a.split(3);  // parent already consumed
  EXPECT_EQ(child1.next_u64(), child2.next_u64());
  EXPECT_NE(Rng(42).split(1).next_u64(), Rng(42).split(2).next_u64());
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(7);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
  std::vector<int> counts(5, 0);
  for (int k = 0; k < 50000; ++k) ++counts[rng.uniform_index(5)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Mixture, TwoPointProblemIsHalfSum) {
  const HardInstance task = two_point_conflict_task(1.0, 2);
  Rng rng(1);
  Vector w(task.dimension());
  for (int trial = 0; trial < 20; ++trial) {
    for (int c = 0; c < w.size(); ++c) w[c] = rng.uniform(-0.2, 0.2);
    const double expected = 0.5 * task.hard_loss(w, 1) + 0.5 * task.hard_loss(w, 2);
    EXPECT_NEAR(mixture_objective(task, w), expected, 1e-15);
  }
  // each component's sampler always returns its single support point
  for (int trial = 0; trial < 10; ++trial) {
    EXPECT_EQ(task.draw(0, rng).items, std::vector<std::uint32_t>{1});
    EXPECT_EQ(task.draw(1, rng).items, std::vector<std::uint32_t>{2});
  }
  EXPECT_EQ(task.num_components(), 2);
}

TEST(Mixture, SingleComponentEqualsComponentExpectation) {
  const QuadraticTask task({0.3}, 0.2, 1.0);
  const Vector w = Vector::Constant(1, -0.4);
  EXPECT_DOUBLE_EQ(mixture_objective(task, w), component_objective(task, 0, w));
  // (w - z)^2 / 4 averaged over z = 0.1, 0.5
  EXPECT_NEAR(mixture_objective(task, w), 0.5 * (0.25 + 0.81) / 4.0, 1e-15);
}

TEST(Mixture, HardInstanceVanishesAtOrigin) {
  const HardInstance task = two_point_conflict_task(1.0, 3);
  EXPECT_EQ(mixture_objective(task, Vector::Zero(task.dimension())), 0.0);
}

TEST(Mixture, MonteCarloMatchesExactOnFiniteSupport) {
  const QuadraticTask task({0.5, -0.5}, 0.3, 1.0);
  Rng rng(9);
  const Vector w = Vector::Constant(1, 0.1);
  // finite support: the budgeted overload is exact too
  EXPECT_DOUBLE_EQ(mixture_objective(task, w, 5, rng), mixture_objective(task, w));
  EXPECT_THROW(mixture_objective(task, Vector::Zero(2)), Error);
}

TEST(Errors, ExitCodesAreDistinct) {
  std::set<int> codes;
  for (auto c : {ErrorCategory::kArgument, ErrorCategory::kContract, ErrorCategory::kDiverged, ErrorCategory::kSolver,
                 ErrorCategory::kIngestion, ErrorCategory::kIo}) {
    codes.insert(exit_code(c));
    EXPECT_NE(exit_code(c), 0);
  }
  EXPECT_EQ(codes.size(), 6u);
}
