#include "sno/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "sno/errors.hpp"

namespace sno {

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t i) {
  while (parent_[i] != i) {
    parent_[i] = parent_[parent_[i]];
    i = parent_[i];
  }
  return i;
}

void UnionFind::unite(std::size_t i, std::size_t j) {
  i = find(i);
  j = find(j);
  if (i == j) return;
  if (size_[i] < size_[j]) std::swap(i, j);
  parent_[j] = i;
  size_[i] += size_[j];
  --sets_;
}

FeasibleGrid::FeasibleGrid(const SnoProblem& p, const Box& box, int resolution, double feas_scale)
    : resolution_(resolution) {
  if (p.dimension() != 2) throw UnsupportedError("level-set analysis needs a 2-dimensional problem");
  if (resolution < 16) throw InvalidArgument("resolution must be at least 16");
  if (box.bounds.size() != 2 && !box.bounds.empty()) throw InvalidArgument("box must be 2-dimensional");

  const auto cells = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
  values_.assign(cells, std::numeric_limits<double>::quiet_NaN());
  if (box.empty()) {
    spacing_ = 0.0;
    return;
  }
  const auto [lo1, hi1] = box.bounds[0];
  const auto [lo2, hi2] = box.bounds[1];
  const double h1 = (hi1 - lo1) / resolution;
  const double h2 = (hi2 - lo2) / resolution;
  spacing_ = std::max(h1, h2);
  const double reach = feas_scale * spacing_;

  auto fill_row = [&](int row) {
    Vector c(2);
    c(1) = lo2 + (row + 0.5) * h2;
    for (int col = 0; col < resolution; ++col) {
      c(0) = lo1 + (col + 0.5) * h1;
      try {
        bool ok = true;
        for (std::size_t i = 0; i < p.size() && ok; ++i) {
          ok = cone_distance(p.cone(), p.constraint_value(i, c)) <= reach;
        }
        if (ok) values_[static_cast<std::size_t>(row) * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(col)] =
            p.objective().value(c);
      } catch (const DomainError&) {
      }
    }
  };

  const unsigned threads = std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(resolution)));
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int row = static_cast<int>(t); row < resolution; row += static_cast<int>(threads)) fill_row(row);
    });
  }
}

FeasibleGrid::Count FeasibleGrid::components_below(double a) const {
  const auto r = static_cast<std::size_t>(resolution_);
  auto marked = [&](std::size_t row, std::size_t col) {
    const double v = values_[row * r + col];
    return !std::isnan(v) && v <= a;
  };

  Count out;
  UnionFind uf(values_.size());
  for (std::size_t row = 0; row < r; ++row) {
    for (std::size_t col = 0; col < r; ++col) {
      if (!marked(row, col)) continue;
      ++out.feasible_cells;
      const std::size_t here = row * r + col;
      // Left, and the three neighbours of the previous row.
      if (col > 0 && marked(row, col - 1)) uf.unite(here, here - 1);
      if (row > 0) {
        if (marked(row - 1, col)) uf.unite(here, here - r);
        if (col > 0 && marked(row - 1, col - 1)) uf.unite(here, here - r - 1);
        if (col + 1 < r && marked(row - 1, col + 1)) uf.unite(here, here - r + 1);
      }
    }
  }
  // Unmarked cells remain singleton sets.
  out.components = static_cast<int>(uf.set_count() - (values_.size() - static_cast<std::size_t>(out.feasible_cells)));
  return out;
}

FeasibleGrid::Count grid_components(const SnoProblem& p, const Box& box, int resolution, double a, double feas_scale) {
  return FeasibleGrid(p, box, resolution, feas_scale).components_below(a);
}

LevelProfile sweep(const SnoProblem& p, const Box& box, const SweepOptions& options) {
  if (!(options.a_min < options.a_max)) throw InvalidArgument("level range must satisfy a_min < a_max");
  if (options.steps < 2) throw InvalidArgument("a sweep needs at least 2 levels");

  const FeasibleGrid grid(p, box, options.resolution, options.feas_scale);
  LevelProfile profile;
  profile.box = box;
  profile.resolution = options.resolution;
  for (int k = 0; k < options.steps; ++k) {
    const double a = options.a_min + (options.a_max - options.a_min) * k / (options.steps - 1);
    const auto count = grid.components_below(a);
    profile.entries.push_back({a, count.components, count.feasible_cells});
  }
  for (std::size_t k = 1; k < profile.entries.size(); ++k) {
    if (profile.entries[k].components != profile.entries[k - 1].components) {
      profile.change_levels.push_back(0.5 * (profile.entries[k].a + profile.entries[k - 1].a));
    }
  }

  for (const auto& r : stratified_scan(p, box, options.scan).points) {
    if (r.flags.t_stationary) profile.critical_values.push_back(r.objective);
  }
  std::sort(profile.critical_values.begin(), profile.critical_values.end());
  for (double level : profile.change_levels) {
    LevelChange m{level, std::nullopt, 0.0};
    for (double v : profile.critical_values) {
      if (!m.nearest_value || std::abs(v - level) < m.gap) {
        m.nearest_value = v;
        m.gap = std::abs(v - level);
      }
    }
    profile.matches.push_back(m);
  }
  return profile;
}

}  // namespace sno
