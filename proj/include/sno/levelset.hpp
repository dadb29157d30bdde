#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sno/morse.hpp"
#include "sno/problem.hpp"

namespace sno {

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t i);
  void unite(std::size_t i, std::size_t j);
  std::size_t set_count() const { return sets_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t sets_;
};

/// Objective values and thickened feasibility of the cell centers of a
/// regular grid over a 2-D box. A cell of spacing h is feasible when every
/// constraint image lies within feas_scale * h of the cone.
class FeasibleGrid {
 public:
  /// Throws UnsupportedError unless n = 2, InvalidArgument if resolution < 16.
  FeasibleGrid(const SnoProblem& p, const Box& box, int resolution, double feas_scale = 1.5);

  int resolution() const { return resolution_; }
  double spacing() const { return spacing_; }

  struct Count {
    int components = 0;
    long feasible_cells = 0;
  };

  /// Connected components (8-neighbourhood) of the feasible cells with f <= a.
  Count components_below(double a) const;

 private:
  int resolution_;
  double spacing_;
  std::vector<double> values_;  // row-major, NaN where f is undefined or the cell is infeasible
};

FeasibleGrid::Count grid_components(const SnoProblem& p, const Box& box, int resolution, double a,
                                    double feas_scale = 1.5);

struct LevelEntry {
  double a = 0.0;
  int components = 0;
  long feasible_cells = 0;
};

struct LevelChange {
  double level = 0.0;                   // midpoint between the two sweep levels
  std::optional<double> nearest_value;  // closest T-stationary objective value
  double gap = 0.0;
};

struct LevelProfile {
  Box box;
  int resolution = 0;
  std::vector<LevelEntry> entries;  // ascending in a
  std::vector<double> change_levels;
  std::vector<LevelChange> matches;
  std::vector<double> critical_values;  // objective values of the T-stationary scan points
};

struct SweepOptions {
  int resolution = 400;
  double a_min = 0.0;
  double a_max = 1.0;
  int steps = 21;
  double feas_scale = 1.5;
  ScanOptions scan;
};

LevelProfile sweep(const SnoProblem& p, const Box& box, const SweepOptions& options);

}  // namespace sno
