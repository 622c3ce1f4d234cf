#include "semicyclic/convex_solver.hpp"

#include <cmath>

#include "semicyclic/error.hpp"
#include "semicyclic/sgd.hpp"

namespace semicyclic {

Subspace::Subspace(std::vector<Vector> orthonormal_basis) : basis_(std::move(orthonormal_basis)) {}

Vector Subspace::project(const Vector& x) const {
  if (basis_.empty()) return x;
  Vector out = Vector::Zero(x.size());
  for (const auto& v : basis_) out += v.dot(x) * v;
  return out;
}

BallSolverResult minimize_on_ball(const std::function<double(const Vector&)>& objective,
                                  const std::function<Vector(const Vector&)>& gradient,
                                  const Vector& start, const Subspace& subspace,
                                  const BallSolverOptions& options) {
  if (!(options.radius > 0.0) || !(options.smoothness > 0.0)) {
    throw_argument("ball solver needs positive radius and smoothness");
  }
  const double lipschitz = options.smoothness;
  const auto prox = [&](const Vector& y, const Vector& g) {
    return project(subspace.project(y - g / lipschitz), options.radius);
  };
  const auto mapping_norm = [&](const Vector& x, const Vector& g) {
    return lipschitz * (x - prox(x, g)).norm();
  };

  BallSolverResult result;
  Vector x = project(subspace.project(start), options.radius);
  double fx = objective(x);
  Vector y = x;
  double momentum = 1.0;
  for (long it = 1; it <= options.max_iterations; ++it) {
    const Vector next = prox(y, gradient(y));
    const double f_next = objective(next);
    result.iterations = it;
    if (f_next > fx) {
      const double gm = mapping_norm(x, gradient(x));
      if (gm < options.tolerance) {
        result.converged = true;
        result.gradient_mapping_norm = gm;
        break;
      }
      if (momentum > 1.0) {
        // restart from the last accepted point
        y = x;
        momentum = 1.0;
        continue;
      }
      // a plain projected step went uphill: rounding noise, take it anyway
    }
    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next + ((momentum - 1.0) / momentum_next) * (next - x);
    x = next;
    fx = f_next;
    momentum = momentum_next;
    result.iterations = it;
    if (it % 16 == 0 || it < 16) {
      const double gm = mapping_norm(x, gradient(x));
      if (gm < options.tolerance) {
        result.converged = true;
        result.gradient_mapping_norm = gm;
        break;
      }
    }
  }
  result.minimizer = x;
  result.value = fx;
  if (!result.converged) result.gradient_mapping_norm = mapping_norm(x, gradient(x));
  return result;
}

BallSolverResult minimize_mixture(const StochasticProblem& problem, const Vector& start,
                                  const BallSolverOptions& options) {
  return minimize_on_ball([&](const Vector& w) { return mixture_objective(problem, w); },
                          [&](const Vector& w) { return mixture_gradient(problem, w); }, start,
                          Subspace{}, options);
}

BallSolverResult minimize_component(const StochasticProblem& problem, int component,
                                    const Vector& start, const BallSolverOptions& options) {
  return minimize_on_ball(
      [&](const Vector& w) { return problem.expected_loss(component, w); },
      [&](const Vector& w) { return problem.expected_gradient(component, w); }, start, Subspace{},
      options);
}

}  // namespace semicyclic
