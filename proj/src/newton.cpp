#include "sno/newton.hpp"

#include <cmath>
#include <limits>

#include "sno/errors.hpp"

namespace sno {

namespace {

double residual_norm(const SquareSystem& system, const Vector& z, Vector& r) {
  try {
    system(z, r, nullptr);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
  const double norm = r.norm();
  return std::isfinite(norm) ? norm : std::numeric_limits<double>::infinity();
}

// Ruiz equilibration: D_r J D_c with unit row and column max-norms. KKT
// Jacobians mix multipliers of size 1/sqrt(t) with gradients of size sqrt(t);
// unscaled, the rank-revealing QR drops the constraint rows.
struct Scaling {
  Vector row;
  Vector col;
};

Scaling equilibrate(const Matrix& jac) {
  Scaling s{Vector::Ones(jac.rows()), Vector::Ones(jac.cols())};
  Matrix a = jac;
  for (int sweep = 0; sweep < 20; ++sweep) {
    bool done = true;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double m = a.row(i).cwiseAbs().maxCoeff();
      if (m > 0.0 && std::isfinite(m)) {
        const double f = 1.0 / std::sqrt(m);
        a.row(i) *= f;
        s.row(i) *= f;
        if (std::abs(1.0 - m) > 1e-3) done = false;
      }
    }
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double m = a.col(j).cwiseAbs().maxCoeff();
      if (m > 0.0 && std::isfinite(m)) {
        const double f = 1.0 / std::sqrt(m);
        a.col(j) *= f;
        s.col(j) *= f;
        if (std::abs(1.0 - m) > 1e-3) done = false;
      }
    }
    if (done) break;
  }
  return s;
}

}  // namespace

NewtonSolve damped_newton(const SquareSystem& system, Vector z0, const NewtonOptions& options) {
  NewtonSolve out;
  out.z = std::move(z0);
  Vector r;
  Matrix jac;
  out.residual = residual_norm(system, out.z, r);
  if (!std::isfinite(out.residual)) return out;

  for (; out.iterations < options.max_iterations; ++out.iterations) {
    // Keep going past residual_tol until the steps vanish: at singular roots
    // the residual is quadratic in the error and says little about accuracy.
    if (out.residual == 0.0) break;
    try {
      system(out.z, r, &jac);
    } catch (const DomainError&) {
      break;
    }
    const Scaling sc = equilibrate(jac);
    const auto qr = (sc.row.asDiagonal() * jac * sc.col.asDiagonal()).colPivHouseholderQr();
    auto solve = [&](const Vector& rhs) -> Vector { return sc.col.asDiagonal() * qr.solve(sc.row.asDiagonal() * rhs); };
    const Vector step = solve(-r);
    if (!step.allFinite()) break;
    const double step_norm = step.norm();

    // Accept on residual decrease, or on the natural monotonicity test: the
    // simplified Newton correction at the trial point must shrink. The latter
    // is affine invariant and does not stall on badly scaled rows.
    double alpha = 1.0;
    Vector trial_r;
    Vector trial;
    double trial_norm = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, alpha *= 0.5) {
      trial = out.z + alpha * step;
      trial_norm = residual_norm(system, trial, trial_r);
      if (!std::isfinite(trial_norm)) continue;
      if (trial_norm < out.residual) {
        accepted = true;
        break;
      }
      const Vector simplified = solve(-trial_r);
      if (simplified.allFinite() && simplified.norm() <= (1.0 - alpha / 4.0) * step_norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    out.z = std::move(trial);
    out.residual = trial_norm;
    if (alpha * step_norm <= options.step_tol) {
      ++out.iterations;
      break;
    }
  }
  out.converged = out.residual <= options.residual_tol;
  return out;
}

}  // namespace sno
