#pragma once

#include <functional>

#include "sno/problem.hpp"

namespace sno {

struct NewtonOptions {
  int max_iterations = 50;
  double step_tol = 1e-12;
  double residual_tol = 1e-10;
  int max_halvings = 40;
};

struct NewtonSolve {
  bool converged = false;
  Vector z;
  double residual = 0.0;  // Euclidean norm at z
  int iterations = 0;
};

/// Fills the residual at z and, when the matrix pointer is non-null, its Jacobian.
using SquareSystem = std::function<void(const Vector& z, Vector& residual, Matrix* jacobian)>;

/// Newton's method with a halving line search. A trial step is taken when it
/// lowers the residual norm or passes the natural monotonicity test. A
/// DomainError during evaluation counts as an infinite residual. Iteration
/// stops once a step is shorter than `step_tol` or no trial step is accepted;
/// converged means the residual norm is then at most `residual_tol`.
NewtonSolve damped_newton(const SquareSystem& system, Vector z0, const NewtonOptions& options = {});

}  // namespace sno
