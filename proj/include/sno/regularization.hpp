#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sno/morse.hpp"
#include "sno/problem.hpp"

namespace sno {

/// Smooth relaxation of a complementarity problem: per constraint pair the
/// inequalities t - F1*F2 >= 0, F1 >= 0, F2 >= 0.
class ScholtesNlp {
 public:
  /// Throws UnsupportedError unless the cone is complementarity, and
  /// InvalidArgument unless t > 0.
  ScholtesNlp(const SnoProblem& problem, double t);

  const SnoProblem& problem() const { return *problem_; }
  double t() const { return t_; }

  /// Constraint 3i is t - F1_i F2_i, 3i+1 is F1_i, 3i+2 is F2_i; all read g >= 0.
  std::size_t constraint_count() const { return constraints_.size(); }
  const SmoothFunction& constraint(std::size_t j) const { return constraints_[j]; }

  /// ||grad f - sum mu grad g|| + sum |mu_j g_j| + sum max(0, -g_j) + sum max(0, -mu_j)
  double kkt_residual(const Vector& x, const Vector& mu) const;

 private:
  const SnoProblem* problem_;
  double t_;
  std::vector<SmoothFunction> constraints_;
};

struct KktOptions {
  int seeds_per_axis = 8;
  NewtonOptions newton;
  double feasibility_tol = 1e-9;
  double zero_tol = 1e-9;
  double dedupe_radius = 1e-6;
  unsigned threads = 0;
};

struct KktPoint {
  Vector x;
  Vector mu;  // one entry per NLP constraint, zero when inactive
  double residual = 0.0;
  std::vector<std::size_t> active;
};

/// All KKT points found by enumerating active sets; sorted lexicographically.
/// Throws InvalidArgument when more than 12 inequalities would have to be enumerated.
std::vector<KktPoint> kkt_points_at(const ScholtesNlp& nlp, const Box& box, const KktOptions& options = {});

/// Newton on the equality KKT system of one active set, warm-started at (x0, mu0).
std::optional<KktPoint> solve_active_set(const ScholtesNlp& nlp, const std::vector<std::size_t>& active,
                                         const Vector& x0, const Vector& mu0, const KktOptions& options = {});

struct PathState {
  double t = 0.0;
  Vector x;
  Vector mu;
  double residual = 0.0;
};

struct PathOptions {
  double t0 = 0.01;
  double theta = 0.1;
  int steps = 6;
  int max_pivots = 5;
  KktOptions kkt;
  Tolerances tols;
};

struct ScholtesPath {
  std::vector<double> schedule;
  std::vector<PathState> states;
  bool completed = false;
  std::string message;  // why the path stopped early

  Vector limit;           // last state's x
  Vector limit_polished;  // limit pushed onto the branch its near-zero components indicate
  std::optional<StationarityReport> limit_report;  // of the original problem, at limit_polished
};

/// Follows the KKT point nearest to `start` along t_k = t0 * theta^k, k = 0..steps.
ScholtesPath path_follow(const SnoProblem& p, const Vector& start, const PathOptions& options = {});

}  // namespace sno
