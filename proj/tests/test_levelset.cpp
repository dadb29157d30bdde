#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>

#include "sno/errors.hpp"
#include "sno/levelset.hpp"
#include "sno/reference_problems.hpp"

using namespace sno;

namespace {

const Box kBox{{{-0.5, 1.5}, {-0.5, 1.5}}};

// Flood fill over cells with f <= a whose center is within 1.5 h of the
// complementarity set {x >= 0, y >= 0, xy = 0} (distance written out directly).
int oracle_components(double (*f)(double, double), double a, int res) {
  const double h = 2.0 / res;
  auto dist = [](double x, double y) {
    const double to_x_axis = std::hypot(std::min(x, 0.0), y);  // nearest point (max(x,0), 0)
    const double to_y_axis = std::hypot(x, std::min(y, 0.0));
    return std::min(to_x_axis, to_y_axis);
  };
  std::vector<char> mark(static_cast<std::size_t>(res * res), 0);
  for (int r = 0; r < res; ++r) {
    for (int c = 0; c < res; ++c) {
      const double x = -0.5 + (c + 0.5) * h;
      const double y = -0.5 + (r + 0.5) * h;
      mark[static_cast<std::size_t>(r * res + c)] = f(x, y) <= a && dist(x, y) <= 1.5 * h;
    }
  }
  int comps = 0;
  for (int start = 0; start < res * res; ++start) {
    if (mark[static_cast<std::size_t>(start)] != 1) continue;
    ++comps;
    std::queue<int> q;
    q.push(start);
    mark[static_cast<std::size_t>(start)] = 2;
    while (!q.empty()) {
      const int cell = q.front();
      q.pop();
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int r = cell / res + dr;
          const int c = cell % res + dc;
          if (r < 0 || c < 0 || r >= res || c >= res) continue;
          auto& m = mark[static_cast<std::size_t>(r * res + c)];
          if (m == 1) {
            m = 2;
            q.push(r * res + c);
          }
        }
      }
    }
  }
  return comps;
}

double regular_f(double x, double y) { return (x - 1) * (x - 1) + (y - 1) * (y - 1); }
double singular_f(double x, double y) { return -x + 0.5 * x * x - y * y + 0.5 * y * y * y * y; }

}  // namespace

TEST_CASE("union-find") {
  UnionFind uf(5);
  uf.unite(0, 1);
  uf.unite(3, 4);
  uf.unite(1, 0);
  CHECK(uf.set_count() == 3);
  CHECK(uf.find(0) == uf.find(1));
  CHECK(uf.find(2) != uf.find(3));
}

TEST_CASE("component counts of the regular-saddle instance") {
  const auto p = regular_saddle();
  CHECK(grid_components(p, kBox, 400, 1.5).components == 2);
  CHECK(grid_components(p, kBox, 400, 2.5).components == 1);
  CHECK(grid_components(p, kBox, 400, 0.5).components == 0);
  CHECK(grid_components(p, kBox, 400, 0.5).feasible_cells == 0);
  const FeasibleGrid grid(p, kBox, 400);
  for (double a : {0.9, 1.01, 1.3, 1.9, 1.99, 2.01, 2.2, 3.0}) {
    CHECK_MESSAGE(grid.components_below(a).components == oracle_components(regular_f, a, 400), a);
  }
  const FeasibleGrid g2(singular_saddle_1(), kBox, 200);
  for (double a : {-0.6, -0.4, -0.1, 0.05, 0.2}) {
    CHECK_MESSAGE(g2.components_below(a).components == oracle_components(singular_f, a, 200), a);
  }
}

TEST_CASE("sweeps") {
  SweepOptions o;
  o.a_min = 0.5;
  o.a_max = 2.5;
  o.steps = 21;
  const auto prof = sweep(regular_saddle(), kBox, o);
  REQUIRE(prof.entries.size() == 21);
  CHECK(std::is_sorted(prof.entries.begin(), prof.entries.end(), [](auto& x, auto& y) { return x.a < y.a; }));
  REQUIRE(prof.change_levels.size() == 2);
  CHECK(std::abs(prof.change_levels[0] - 1.0) <= 0.1);
  CHECK(std::abs(prof.change_levels[1] - 2.0) <= 0.1);
  for (const auto& m : prof.matches) {
    REQUIRE(m.nearest_value);
    CHECK(m.gap <= 0.1);
  }

  o.a_min = -0.75;
  o.a_max = 0.25;
  const auto s1 = sweep(singular_saddle_1(), kBox, o);
  const double step = (o.a_max - o.a_min) / (o.steps - 1);
  CHECK(std::any_of(s1.change_levels.begin(), s1.change_levels.end(), [&](double l) { return std::abs(l) <= step; }));
  CHECK(s1.entries.front().components == 0);
  CHECK(s1.entries.back().components == 1);

  const auto empty = sweep(regular_saddle(), Box{{{0.5, 1.5}, {0.5, 1.5}}}, o);
  for (const auto& e : empty.entries) CHECK(e.components == 0);

  CHECK_THROWS_AS(sweep(regular_saddle(), kBox, SweepOptions{400, 1.0, 0.0, 21, 1.5, {}}), InvalidArgument);
  CHECK_THROWS_AS(sweep(regular_saddle(), kBox, SweepOptions{400, 0.0, 1.0, 1, 1.5, {}}), InvalidArgument);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(FeasibleGrid(regular_saddle(), kBox, 8), InvalidArgument);
  const auto p3 = SnoProblem::from_strings(3, "x1", {{"x1", "x2"}}, ConeKind::Complementarity);
  CHECK_THROWS_AS(FeasibleGrid(p3, Box{{{0, 1}, {0, 1}, {0, 1}}}, 64), UnsupportedError);
}

TEST_CASE("counts change only at critical values and are stable under refinement") {
  for (const auto& ref : reference_problems()) {
    SweepOptions o;
    o.resolution = 400;
    o.a_min = -1.5;
    o.a_max = 2.5;
    o.steps = 41;
    const auto coarse = sweep(ref.problem, kBox, o);
    o.resolution = 800;
    const auto fine = sweep(ref.problem, kBox, o);
    // The box cuts the axes at (1.5, 0) and (0, 1.5); components of the
    // truncated set can also be born there.
    std::vector<double> critical = coarse.critical_values;
    critical.push_back(ref.problem.objective().value((Vector(2) << 1.5, 0).finished()));
    critical.push_back(ref.problem.objective().value((Vector(2) << 0, 1.5).finished()));
    auto near_critical = [&](double a, double r) {
      return std::any_of(critical.begin(), critical.end(), [&](double v) { return std::abs(v - a) <= r; });
    };
    for (std::size_t k = 0; k < coarse.entries.size(); ++k) {
      if (near_critical(coarse.entries[k].a, 0.02)) continue;  // thickening decides ties at critical levels
      CHECK_MESSAGE(coarse.entries[k].components == fine.entries[k].components, ref.key << " a=" << coarse.entries[k].a);
    }
    for (std::size_t k = 1; k < coarse.entries.size(); ++k) {
      const double lo = coarse.entries[k - 1].a;
      const double hi = coarse.entries[k].a;
      const bool bracket = std::any_of(critical.begin(), critical.end(), [&](double v) { return v > lo - 0.02 && v <= hi + 0.02; });
      if (!bracket) CHECK_MESSAGE(coarse.entries[k].components == coarse.entries[k - 1].components, ref.key << " a=" << hi);
    }
  }
}

TEST_CASE("components above the minimum values equal the number of local minimizers") {
  for (const auto& ref : reference_problems()) {
    const auto scan = stratified_scan(ref.problem, kBox);
    std::vector<double> minima;
    std::vector<double> others;
    for (const auto& r : scan.points) {
      (r.morse.verdict == Verdict::NondegenerateLocalMin ? minima : others).push_back(r.objective);
    }
    if (minima.empty()) continue;
    const double top = *std::max_element(minima.begin(), minima.end());
    double next = top + 0.5;
    for (double v : others) {
      if (v > top) next = std::min(next, v);
    }
    const double a = top + 0.25 * (next - top);
    const int comps = grid_components(ref.problem, kBox, 400, a).components;
    CHECK_MESSAGE(comps == static_cast<int>(minima.size()), ref.key);
  }
}
