#include "sno/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sno {

SymmetricEigen jacobi_eigen(const Matrix& a, double tol, int max_sweeps) {
  const Eigen::Index n = a.rows();
  Matrix m = a.selfadjointView<Eigen::Upper>();
  Matrix v = Matrix::Identity(n, n);

  const double scale = n > 0 ? std::max(1.0, m.cwiseAbs().maxCoeff()) : 1.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (std::sqrt(off) <= tol * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        // Rotation annihilating m(p, q), with |t| <= 1 for stability.
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return m(i, i) < m(j, j); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = m(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

RankInfo rank_and_null_space(const Matrix& rows, double relative_tol) {
  const Eigen::Index n = rows.cols();
  RankInfo info;
  if (rows.rows() == 0) {
    info.null_space = Matrix::Identity(n, n);
    return info;
  }
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  info.largest_singular_value = sigma.size() ? sigma(0) : 0.0;
  // A wide matrix has fewer singular values than rows; the missing ones are zero.
  info.smallest_singular_value = rows.rows() > n ? 0.0 : (sigma.size() ? sigma(sigma.size() - 1) : 0.0);
  const double threshold = relative_tol * std::max(1.0, info.largest_singular_value);
  for (Eigen::Index k = 0; k < sigma.size(); ++k) info.rank += sigma(k) > threshold;
  info.null_space = svd.matrixV().rightCols(n - info.rank);
  return info;
}

}  // namespace sno
