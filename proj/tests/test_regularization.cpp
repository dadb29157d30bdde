#include <doctest.h>

#include <cmath>

#include "sno/errors.hpp"
#include "sno/reference_problems.hpp"
#include "sno/regularization.hpp"

using namespace sno;

namespace {

Vector pt(double a, double b) { return (Vector(2) << a, b).finished(); }
const Box kBox{{{-0.5, 1.5}, {-0.5, 1.5}}};

bool has_point(const std::vector<KktPoint>& pts, const Vector& x, double tol) {
  for (const auto& k : pts) {
    if ((k.x - x).cwiseAbs().maxCoeff() <= tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("relaxed problem") {
  const auto p = scholtes_example();
  const ScholtesNlp nlp(p, 0.01);
  CHECK(nlp.constraint_count() == 3);
  const Vector g = nlp.constraint(0).gradient(pt(0.1, 0.1));
  CHECK(g(0) == doctest::Approx(-0.1));
  CHECK(g(1) == doctest::Approx(-0.1));
  CHECK_THROWS_AS(ScholtesNlp(p, 0.0), InvalidArgument);
  const auto v = SnoProblem::from_strings(2, "x1", {{"x1", "x2"}}, ConeKind::Vanishing);
  CHECK_THROWS_AS(ScholtesNlp(v, 0.01), UnsupportedError);

  const auto big = SnoProblem::from_strings(
      10, "x1", {{"x1", "x2"}, {"x3", "x4"}, {"x5", "x6"}, {"x7", "x8"}, {"x9", "x10"}}, ConeKind::Complementarity);
  CHECK_THROWS_AS(kkt_points_at(ScholtesNlp(big, 0.01), Box{std::vector<std::pair<double, double>>(10, {0, 1})}),
                  InvalidArgument);
}

TEST_CASE("KKT points at t = 0.01 match the closed forms") {
  const double t = 0.01;
  const auto pts = kkt_points_at(ScholtesNlp(scholtes_example(), t), kBox);
  CHECK(pts.size() == 3);
  const double r = std::sqrt(1 - 4 * t);
  CHECK(has_point(pts, pt(std::sqrt(t), std::sqrt(t)), 1e-8));
  CHECK(has_point(pts, pt((1 + r) / 2, (1 - r) / 2), 1e-8));
  CHECK(has_point(pts, pt((1 - r) / 2, (1 + r) / 2), 1e-8));
  CHECK_FALSE(has_point(pts, pt(1, 1), 1e-3));
  for (const auto& k : pts) CHECK(k.residual <= 1e-8);
}

TEST_CASE("KKT points at t = 0.25 coincide") {
  const auto pts = kkt_points_at(ScholtesNlp(scholtes_example(), 0.25), kBox);
  REQUIRE_FALSE(pts.empty());
  // Double root: the residual grows like the cube of the error along the
  // branch, so the location is only determined to about eps^(1/3).
  for (const auto& k : pts) CHECK((k.x - pt(0.5, 0.5)).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("path from (0.1, 0.1)") {
  const auto path = path_follow(scholtes_example(), pt(0.1, 0.1));
  REQUIRE(path.completed);
  REQUIRE(path.states.size() == 7);
  for (const auto& s : path.states) {
    CHECK(s.residual <= 1e-8);
    CHECK((s.x - pt(std::sqrt(s.t), std::sqrt(s.t))).cwiseAbs().maxCoeff() <= 1e-8);
  }
  CHECK(path.limit_polished.norm() <= 1e-3);
  REQUIRE(path.limit_report);
  CHECK(path.limit_report->flags.w);
  CHECK(path.limit_report->flags.t_stationary);
  CHECK_FALSE(path.limit_report->flags.limiting);
  CHECK_FALSE(path.limit_report->flags.frechet_hat);
}

TEST_CASE("path along the branch through (1, 0)") {
  const double r = std::sqrt(1 - 4 * 0.01);
  const auto path = path_follow(scholtes_example(), pt((1 + r) / 2, (1 - r) / 2));
  REQUIRE(path.completed);
  for (const auto& s : path.states) {
    const double rt = std::sqrt(1 - 4 * s.t);
    CHECK((s.x - pt((1 + rt) / 2, (1 - rt) / 2)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  CHECK((path.limit_polished - pt(1, 0)).norm() <= 1e-8);
  REQUIRE(path.limit_report);
  CHECK(path.limit_report->flags.t_stationary);
}

TEST_CASE("schedule edge cases") {
  PathOptions o;
  o.steps = 0;
  const auto path = path_follow(scholtes_example(), pt(0.1, 0.1), o);
  CHECK(path.states.size() == 1);
  CHECK(path.states[0].t == 0.01);
  o.theta = 1.0;
  CHECK_THROWS_AS(path_follow(scholtes_example(), pt(0.1, 0.1), o), InvalidArgument);
  o.theta = 0.0;
  CHECK_THROWS_AS(path_follow(scholtes_example(), pt(0.1, 0.1), o), InvalidArgument);
  o.theta = 0.1;
  o.t0 = -1;
  CHECK_THROWS_AS(path_follow(scholtes_example(), pt(0.1, 0.1), o), InvalidArgument);
}
