#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sno/errors.hpp"
#include "sno/morse.hpp"
#include "sno/reference_problems.hpp"
#include "sno/report.hpp"

using namespace sno;

namespace {

Vector pt(double a, double b) { return (Vector(2) << a, b).finished(); }
const Box kBox{{{-0.5, 1.5}, {-0.5, 1.5}}};

bool has_point(const ScanResult& s, const Vector& x, double tol = 1e-8) {
  for (const auto& r : s.points) {
    if ((r.point - x).cwiseAbs().maxCoeff() <= tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("Lagrangian Hessian and tangent space") {
  const auto p = regular_saddle();
  const auto pat = active_pattern(p, pt(0, 0), 1e-8);
  const auto ms = solve_multipliers(p, pat, pt(0, 0));
  CHECK(lagrangian_hessian(p, pt(0, 0), ms).isApprox(2 * Matrix::Identity(2, 2)));
  CHECK(tangent_basis(p, pat, pt(0, 0), ms, 1e-9).cols() == 0);

  const auto s = singular_saddle_1();
  const auto ms1 = solve_multipliers(s, pt(0, 0), 1e-8);
  Matrix expected(2, 2);
  expected << 1, 0, 0, -2;
  CHECK(lagrangian_hessian(s, pt(0, 0), ms1).isApprox(expected));

  const auto pat10 = active_pattern(p, pt(1, 0), 1e-8);
  const auto ms10 = solve_multipliers(p, pat10, pt(1, 0));
  const Matrix basis = tangent_basis(p, pat10, pt(1, 0), ms10, 1e-9);
  REQUIRE(basis.cols() == 1);
  CHECK(std::abs(basis(1, 0)) < 1e-14);
  CHECK(std::abs(std::abs(basis(0, 0)) - 1) < 1e-14);

  // Disjunctive constraint with both components positive: nothing active, d = n.
  const auto d = SnoProblem::from_strings(2, "x1^2 + x2^2", {{"x1 + 1", "x2 + 1"}}, ConeKind::Disjunctive);
  const auto patd = active_pattern(d, pt(0, 0), 1e-8);
  const auto msd = solve_multipliers(d, patd, pt(0, 0));
  CHECK(tangent_basis(d, patd, pt(0, 0), msd, 1e-9).isApprox(Matrix::Identity(2, 2)));
}

TEST_CASE("quadratic and biactive indices") {
  auto q = quadratic_index(Matrix(0, 0), 1e-8);
  CHECK(q.qi == 0);
  CHECK(q.nd3);
  Matrix h(2, 2);
  h << -1, 0, 0, 2;
  q = quadratic_index(h, 1e-8);
  CHECK(q.qi == 1);
  CHECK(q.nd3);
  h << 1, 0, 0, 0;
  CHECK_FALSE(quadratic_index(h, 1e-8).nd3);

  // Perturbed instance at (0, t2): restricted Hessian 2 - 6 t2^2 < 0.
  const auto pe = singular_saddle_2(0.05);
  const double t2 = oracle::bisect([](double s) { return -0.05 + 2 * s - 2 * s * s * s; }, 0.5, 1.5);
  const auto r = analyze_point(pe, pt(0, t2), {});
  CHECK(r.lagrange.restricted_hessian.rows() == 1);
  CHECK(r.lagrange.restricted_hessian(0, 0) == doctest::Approx(2 - 6 * t2 * t2).epsilon(1e-6));
  CHECK(r.morse.qi == 1);

  const auto pat = active_pattern(regular_saddle(), pt(0, 0), 1e-8);
  MultiplierSet ms;
  ms.point = pt(0, 0);
  ms.pairs = {{-2.0, -2.0}};
  CHECK(biactive_index(ms, pat, ConeKind::Complementarity, 1e-9) == 1);
  ms.pairs = {{-1.0, 0.0}};
  CHECK(biactive_index(ms, pat, ConeKind::Complementarity, 1e-9) == 0);
  ms.pairs = {{3.0, -1.0}};
  CHECK(biactive_index(ms, pat, ConeKind::Switching, 1e-9) == 1);
  ms.pairs = {{3.0, 1.0}};
  CHECK(biactive_index(ms, pat, ConeKind::Complementarity, 1e-9) == 0);
}

TEST_CASE("QI against a characteristic-polynomial oracle on tangent spaces of dimension up to 3") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> entry(-4, 4);
  int bad = 0;
  for (int k = 0; k < 300; ++k) {
    // x1 = 0 is an active equality, the tangent space is spanned by e2..e4.
    std::vector<std::vector<double>> a(3, std::vector<double>(3));
    std::string f = "3*x1";
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = entry(rng);
        const double c = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * (i == j ? 0.5 : 1.0);
        f += " + " + std::to_string(c) + "*x" + std::to_string(i + 2) + "*x" + std::to_string(j + 2);
      }
    }
    const auto p = SnoProblem::from_strings(4, f, {{"x1", "x2 + 1"}}, ConeKind::Complementarity);
    const auto r = analyze_point(p, Vector::Zero(4), {});
    if (r.lagrange.tangent_basis.cols() != 3) ++bad;
    const auto roots = oracle::char_poly(a);
    if (roots.front() == 0.0) continue;  // singular block; QI is then ambiguous
    if (r.morse.qi != oracle::negative_root_count(roots)) ++bad;
    if (r.morse.ti != r.morse.qi + r.morse.bi) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("restricted Hessian matches finite differences of L along tangent directions") {
  for (const auto& ref : reference_problems()) {
    const auto scan = stratified_scan(ref.problem, kBox);
    for (const auto& r : scan.points) {
      const Matrix& b = r.lagrange.tangent_basis;
      if (b.cols() == 0) continue;
      const auto lag = [&](const std::vector<double>& y) {
        const Vector x = Eigen::Map<const Vector>(y.data(), 2);
        double v = ref.problem.objective().value(x);
        const auto c = ref.problem.constraint_value(0, x);
        const auto& m = r.multipliers.pairs[0];
        if (m.first) v -= *m.first * c.a1;
        if (m.second) v -= *m.second * c.a2;
        return v;
      };
      for (Eigen::Index i = 0; i < b.cols(); ++i) {
        const double h = 1e-4;
        auto along = [&](double s) {
          const Vector y = r.point + s * b.col(i);
          return lag({y(0), y(1)});
        };
        const double fd = (along(h) - 2 * along(0) + along(-h)) / (h * h);
        CHECK(r.lagrange.restricted_hessian(i, i) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("nondegeneracy and verdicts") {
  auto r = analyze_point(regular_saddle(), pt(0, 0), {});
  CHECK((r.morse.nd.nd1 && r.morse.nd.nd2 && r.morse.nd.nd3));
  CHECK(r.morse.qi == 0);
  CHECK(r.morse.bi == 1);
  CHECK(r.morse.ti == 1);
  CHECK(r.morse.verdict == Verdict::NondegenerateSaddle);

  r = analyze_point(regular_saddle(), pt(1, 0), {});
  CHECK(r.morse.ti == 0);
  CHECK(r.morse.verdict == Verdict::NondegenerateLocalMin);

  r = analyze_point(singular_saddle_1(), pt(0, 0), {});
  CHECK_FALSE(r.morse.nd.nd2);
  CHECK(r.morse.verdict == Verdict::Degenerate);

  r = analyze_point(second_order_saddle(), pt(0, 0), {});
  CHECK_FALSE(r.morse.nd.nd2);

  r = analyze_point(non_t_stationary(), pt(0, 0), {});
  CHECK(r.morse.verdict == Verdict::NotTStationary);

  CHECK_THROWS_AS(analyze_point(regular_saddle(), pt(0.3, 0.3), {}), InfeasiblePointError);
  const auto dep = SnoProblem::from_strings(2, "x1", {{"x1", "2*x1"}}, ConeKind::Switching);
  CHECK_THROWS_AS(analyze_point(dep, pt(0, 0), {}), LicqError);
}

TEST_CASE("scans of the reference problems") {
  auto s = stratified_scan(regular_saddle(), kBox);
  CHECK(s.points.size() == 3);
  CHECK(has_point(s, pt(0, 0)));
  CHECK(has_point(s, pt(1, 0)));
  CHECK(has_point(s, pt(0, 1)));

  s = stratified_scan(singular_saddle_1(), kBox);
  CHECK(s.points.size() == 3);
  CHECK(has_point(s, pt(0, 0)));
  CHECK(has_point(s, pt(1, 0)));
  CHECK(has_point(s, pt(0, 1)));

  s = stratified_scan(singular_saddle_2(), kBox);
  CHECK(s.points.size() == 3);
  for (const auto& r : s.points) {
    if ((r.point - pt(1, 0)).norm() < 1e-8) CHECK(r.morse.verdict == Verdict::NondegenerateLocalMin);
    if ((r.point - pt(0, 0)).norm() < 1e-8) CHECK(r.saddle.is_singular);
  }

  s = stratified_scan(non_t_stationary(), kBox);
  std::vector<Vector> t_points;
  for (const auto& r : s.points) {
    if (r.flags.t_stationary) t_points.push_back(r.point);
  }
  REQUIRE(t_points.size() == 2);
  CHECK((t_points[0] - pt(0, 1)).norm() < 1e-8);
  CHECK((t_points[1] - pt(1, 0)).norm() < 1e-8);

  CHECK(stratified_scan(regular_saddle(), Box{}).points.empty());
  CHECK(stratified_scan(regular_saddle(), Box{{{1, 0}, {0, 1}}}).points.empty());
  CHECK_THROWS_AS(stratified_scan(regular_saddle(), Box{{{0, 1}}}), InvalidArgument);
}

TEST_CASE("perturbed scan against a bisection oracle") {
  const auto s = stratified_scan(singular_saddle_2(0.05), kBox);
  const auto roots = oracle::roots([](double v) { return -0.05 + 2 * v - 2 * v * v * v; }, -0.5, 1.5);
  int matched = 0;
  for (double root : roots) {
    if (root > 0 && has_point(s, pt(0, root))) ++matched;
  }
  // Two positive roots lie in the box; both are found together with (0,0) and (1,0).
  CHECK(matched == 2);
  CHECK(has_point(s, pt(0, 0)));
  CHECK(has_point(s, pt(1, 0)));
  CHECK(s.points.size() == 4);
  const auto origin = analyze_point(singular_saddle_2(0.05), pt(0, 0), {});
  CHECK(*origin.multipliers.pairs[0].first == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(*origin.multipliers.pairs[0].second == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK(origin.saddle.is_regular);
}

TEST_CASE("local minimizers and saddle descent directions") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& ref : reference_problems()) {
    const auto& p = ref.problem;
    for (const auto& r : stratified_scan(p, kBox).points) {
      if (r.morse.verdict == Verdict::NondegenerateLocalMin) {
        int lower = 0;
        for (int k = 0; k < 1000; ++k) {
          Vector d(2);
          d << g(rng), g(rng);
          Vector y = r.point + 1e-3 * u(rng) * d.normalized();
          // F = (x1, x2): the projection of the constraint image is a feasible point.
          const ConePoint c = cone_project(p.cone(), {y(0), y(1)});
          y << c.a1, c.a2;
          if (p.objective().value(y) < r.objective - 1e-13) ++lower;
        }
        CHECK_MESSAGE(lower == 0, ref.key);
      }
      if (r.morse.verdict == Verdict::NondegenerateSaddle && r.morse.bi >= 1 && p.cone() == ConeKind::Complementarity) {
        const Vector grad = p.objective().gradient(r.point);
        CHECK(grad(0) < 0);
        CHECK(grad(1) < 0);
      }
    }
  }
}

TEST_CASE("scan output does not depend on the thread count") {
  ScanOptions one;
  one.threads = 1;
  ScanOptions many;
  many.threads = 8;
  const auto p = singular_saddle_2(0.05);
  CHECK(to_json(stratified_scan(p, kBox, one)).dump() == to_json(stratified_scan(p, kBox, many)).dump());
}
