#pragma once

#include <functional>
#include <span>
#include <vector>

#include "semicyclic/problem.hpp"

namespace semicyclic {

/// Orthogonal projector onto span{basis}; an empty basis means the whole space.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::vector<Vector> orthonormal_basis);

  Vector project(const Vector& x) const;
  bool is_full() const noexcept { return basis_.empty(); }

 private:
  std::vector<Vector> basis_;
};

struct BallSolverOptions {
  double radius = 1.0;
  double smoothness = 1.0;  // Lipschitz constant of the gradient
  double tolerance = 1e-8;  // on the gradient-mapping norm
  long max_iterations = 2'000'000;
};

struct BallSolverResult {
  Vector minimizer;
  double value = 0.0;
  double gradient_mapping_norm = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Minimises a smooth convex function over {x in subspace : |x| <= radius}
/// by accelerated projected gradient with function-value restarts. The
/// stopping test is L |x - P(x - grad(x)/L)| < tolerance.
BallSolverResult minimize_on_ball(const std::function<double(const Vector&)>& objective,
                                  const std::function<Vector(const Vector&)>& gradient,
                                  const Vector& start, const Subspace& subspace,
                                  const BallSolverOptions& options);

/// Minimises the exact mixture objective of a finite-support problem over the
/// radius ball, from `start`. Used as the reference F(w*) oracle.
BallSolverResult minimize_mixture(const StochasticProblem& problem, const Vector& start,
                                  const BallSolverOptions& options);

/// Same for a single component F_i.
BallSolverResult minimize_component(const StochasticProblem& problem, int component,
                                    const Vector& start, const BallSolverOptions& options);

}  // namespace semicyclic
