#pragma once

#include <optional>

#include "sno/problem.hpp"

namespace sno {

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k belongs to values(k)
};

/// Cyclic Jacobi rotations for a small dense symmetric matrix. Only the
/// upper triangle of `a` is read.
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-15, int max_sweeps = 100);

struct RankInfo {
  int rank = 0;
  std::optional<double> smallest_singular_value;  // empty for a matrix without rows
  double largest_singular_value = 0.0;
  Matrix null_space;  // orthonormal columns spanning {v : rows * v = 0}
};

/// Singular values below 1e-10 * max(1, sigma_max) count as zero.
RankInfo rank_and_null_space(const Matrix& rows, double relative_tol = 1e-10);

}  // namespace sno
