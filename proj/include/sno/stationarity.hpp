#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "sno/problem.hpp"

namespace sno {

struct LicqReport {
  bool holds = false;
  Matrix active_gradients;  // one row per active component
  int rank = 0;
  std::optional<double> smallest_singular_value;
};

LicqReport licq(const SnoProblem& p, const ActivePattern& pattern, const Vector& x);
/// Throws InfeasiblePointError if x is infeasible at `tol`.
LicqReport licq(const SnoProblem& p, const Vector& x, double tol);

/// Multipliers of one constraint pair; a component that is not active has
/// no multiplier at all.
struct PairMultipliers {
  std::optional<double> first;
  std::optional<double> second;
};

/// Least-squares solution of grad f(x) = sum lambda * grad F over the active
/// components, with the residual norm of that system.
struct MultiplierSet {
  Vector point;
  std::vector<PairMultipliers> pairs;
  double residual = 0.0;
};

/// Throws LicqError when the active gradients are linearly dependent.
MultiplierSet solve_multipliers(const SnoProblem& p, const ActivePattern& pattern, const Vector& x);
MultiplierSet solve_multipliers(const SnoProblem& p, const Vector& x, double tol);

enum class Sign { Negative, Zero, Positive };

inline Sign sign_of(double v, double zero_tol) {
  if (v > zero_tol) return Sign::Positive;
  if (v < -zero_tol) return Sign::Negative;
  return Sign::Zero;
}

enum class Notion { FrechetHat, Limiting, ClarkeBar, T };

std::string_view to_string(Notion n);

/// Sign condition that a biactive multiplier pair must meet for `notion`.
bool biactive_condition(Notion notion, ConeKind cone, Sign l1, Sign l2);

/// Sign region of a biactive pair that witnesses a saddle point of first order.
bool saddle_condition(ConeKind cone, Sign l1, Sign l2);

struct NotionFlags {
  bool w = false;
  bool frechet_hat = false;  // N-hat
  bool limiting = false;     // N
  bool clarke_bar = false;   // N-bar
  bool t_stationary = false;
};

NotionFlags classify_notions(const MultiplierSet& ms, const ActivePattern& pattern, ConeKind cone,
                             double zero_tol, double w_tol = Tolerances{}.w);

enum class SaddleLabel { NotSaddleIndex, SingularSaddleIndex, RegularSaddleIndex };

std::string_view to_string(SaddleLabel l);

struct SaddleClass {
  std::vector<std::pair<std::size_t, SaddleLabel>> per_index;  // biactive constraint -> label
  bool is_first_order_saddle = false;
  bool is_singular = false;
  bool is_regular = false;
};

/// Non-T-stationary points get NotSaddleIndex everywhere.
SaddleClass classify_saddle(const MultiplierSet& ms, const ActivePattern& pattern, ConeKind cone,
                            double zero_tol, double w_tol = Tolerances{}.w);

/// Clarke stationarity through the convex-combination form of the Clarke
/// subdifferential of min{F1, F2} (complementarity) or max{F1, F2}
/// (disjunctive). Throws UnsupportedError for the other cones.
bool c_stationarity_check(ConeKind cone, const MultiplierSet& ms, const ActivePattern& pattern,
                          double zero_tol, double w_tol = Tolerances{}.w);
bool c_stationarity_check(const SnoProblem& p, const Vector& x, const MultiplierSet& ms,
                          const Tolerances& tols = {});

inline bool c_stationarity_applicable(ConeKind cone) {
  return cone == ConeKind::Complementarity || cone == ConeKind::Disjunctive;
}

}  // namespace sno
