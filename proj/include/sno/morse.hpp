#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "sno/newton.hpp"
#include "sno/problem.hpp"
#include "sno/stationarity.hpp"

namespace sno {

/// Axis-aligned bounds, one (lo, hi) interval per coordinate.
struct Box {
  std::vector<std::pair<double, double>> bounds;

  /// No coordinates, or some interval with lo > hi.
  bool empty() const;
  bool contains(const Vector& x, double slack = 0.0) const;
};

/// Sets coordinates with |x_i| <= tol to exactly zero; Newton leaves noise
/// like 1e-32 there, which would otherwise decide the lexicographic order.
void snap_roundoff(Vector& x, double tol = 1e-14);

/// Uniform grid with `per_axis` points per coordinate, endpoints included.
std::vector<Vector> grid_seeds(const Box& box, int per_axis);

struct LagrangeData {
  Matrix hessian_L;           // D^2 L(x), n x n
  Matrix tangent_basis;       // n x d, orthonormal columns
  Matrix restricted_hessian;  // d x d
  Vector eigenvalues;         // ascending
};

/// D^2 f(x) - sum over active components of lambda * D^2 F(x).
Matrix lagrangian_hessian(const SnoProblem& p, const Vector& x, const MultiplierSet& ms);

/// Null space of the gradients that define the tangent space: both components
/// of biactive constraints, reduced equalities, and reduced inequalities whose
/// multiplier is nonzero. Throws LicqError if those gradients are dependent.
Matrix tangent_basis(const SnoProblem& p, const ActivePattern& pattern, const Vector& x,
                     const MultiplierSet& ms, double zero_tol);

LagrangeData lagrange_data(const SnoProblem& p, const ActivePattern& pattern, const Vector& x,
                           const MultiplierSet& ms, const Tolerances& tols = {});

struct QuadraticIndex {
  int qi = 0;
  bool nd3 = true;
};

/// Counts eigenvalues below -eig_tol * max(1, max |eigenvalue|).
QuadraticIndex quadratic_index(const Matrix& restricted_hessian, double eig_tol);

int biactive_index(const MultiplierSet& ms, const ActivePattern& pattern, ConeKind cone, double zero_tol);

struct Nondegeneracy {
  bool nd1 = false;
  bool nd2 = false;
  bool nd3 = false;
  bool all() const { return nd1 && nd2 && nd3; }
};

Nondegeneracy nondegeneracy(const SnoProblem& p, const Vector& x, const ActivePattern& pattern,
                            const MultiplierSet& ms, const LagrangeData& lag, const Tolerances& tols = {});

enum class Verdict { NondegenerateLocalMin, NondegenerateSaddle, Degenerate, NotTStationary };

std::string_view to_string(Verdict v);

struct MorseReport {
  int qi = 0;
  int bi = 0;
  int ti = 0;
  Nondegeneracy nd;
  Verdict verdict = Verdict::NotTStationary;
};

MorseReport morse_verdict(const NotionFlags& flags, const Nondegeneracy& nd, int qi, int bi);

/// Everything known about one feasible point.
struct StationarityReport {
  Vector point;
  double objective = 0.0;
  ActivePattern pattern;
  LicqReport licq;
  MultiplierSet multipliers;
  NotionFlags flags;
  std::optional<bool> c_stationary;  // only for complementarity and disjunctive cones
  SaddleClass saddle;
  LagrangeData lagrange;
  MorseReport morse;
};

/// Throws InfeasiblePointError or LicqError.
StationarityReport analyze_point(const SnoProblem& p, const Vector& x, const Tolerances& tols = {});

struct ScanOptions {
  int seeds_per_axis = 8;
  Tolerances tols;
  int max_iterations = 50;
  double step_tol = 1e-12;
  double residual_tol = 1e-10;
  double dedupe_radius = 1e-6;  // max norm
  unsigned threads = 0;         // 0 picks the hardware concurrency
};

struct ScanResult {
  std::vector<StationarityReport> points;  // sorted lexicographically by coordinates
  std::size_t newton_runs = 0;
  std::size_t nonconvergent = 0;
};

/// Finds the W-stationary points inside `box` by solving, for every branch
/// pattern in {F1=0, F2=0, both, none}^m, the square system of pattern
/// equalities and stationarity from every seed of a uniform grid.
ScanResult stratified_scan(const SnoProblem& p, const Box& box, const ScanOptions& options = {});

/// Which components of each constraint are held at zero.
enum class Branch { First, Second, Both, None };

struct BranchSolution {
  bool converged = false;
  Vector x;
  Vector lambda;  // one entry per held component, pattern order
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton on {F_c(x) = 0 for held components c; grad f - sum lambda_c grad F_c = 0},
/// with a halving line search on the residual norm.
BranchSolution solve_branch_system(const SnoProblem& p, const std::vector<Branch>& branches,
                                   const Vector& x0, const NewtonOptions& options = {});

}  // namespace sno
