#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sno/expr.hpp"

namespace sno {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ConeKind { Complementarity, Vanishing, Orthogonality, Switching, Disjunctive };

std::string_view to_string(ConeKind cone);
/// Accepts the lowercase names used in problem files.
ConeKind cone_from_string(std::string_view name);

/// Numerical thresholds shared by the analysis modules.
struct Tolerances {
  double activity = 1e-8;  // |F| <= activity marks a component active
  double zero = 1e-9;      // |lambda| <= zero counts as a vanishing multiplier
  double w = 1e-8;         // stationarity residual bound for W-stationarity
  double eig = 1e-8;       // eigenvalue threshold, scaled by max(1, max |eigenvalue|)
};

/// A point (a1, a2) in the plane that contains the cone.
struct ConePoint {
  double a1 = 0.0;
  double a2 = 0.0;
  friend bool operator==(const ConePoint&, const ConePoint&) = default;
};

bool cone_membership(ConeKind cone, ConePoint a, double tol);

/// Nearest point of the cone. Ties go to the candidate with the larger
/// maximal coordinate, then to the candidate on the first axis.
ConePoint cone_project(ConeKind cone, ConePoint a);

double cone_distance(ConeKind cone, ConePoint a);

/// Twice differentiable function with its symbolic gradient and Hessian.
class SmoothFunction {
 public:
  explicit SmoothFunction(Expr e);

  const Expr& expr() const { return expr_; }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;

 private:
  Expr expr_;
  std::vector<Expr> gradient_;
  std::vector<std::vector<Expr>> hessian_;
};

struct ConstraintPair {
  SmoothFunction first;
  SmoothFunction second;
};

/// min f(x) s.t. (F1_i(x), F2_i(x)) in K for i = 1..m.
class SnoProblem {
 public:
  SnoProblem(int dimension, Expr objective, std::vector<std::pair<Expr, Expr>> constraints,
             ConeKind cone);

  /// Parses every expression over `dimension` variables.
  static SnoProblem from_strings(int dimension, std::string_view objective,
                                 const std::vector<std::pair<std::string, std::string>>& constraints,
                                 ConeKind cone);
  /// { "n", "cone", "objective", "constraints": [ {"F1", "F2"}, ... ] }
  static SnoProblem from_json(const nlohmann::json& j);
  static SnoProblem from_file(const std::filesystem::path& path);

  nlohmann::json to_json() const;

  int dimension() const { return dimension_; }
  ConeKind cone() const { return cone_; }
  const SmoothFunction& objective() const { return objective_; }
  const std::vector<ConstraintPair>& constraints() const { return constraints_; }
  std::size_t size() const { return constraints_.size(); }

  ConePoint constraint_value(std::size_t i, const Vector& x) const;

 private:
  int dimension_;
  SmoothFunction objective_;
  std::vector<ConstraintPair> constraints_;
  ConeKind cone_;
};

bool feasible(const SnoProblem& p, const Vector& x, double tol);

enum class ActiveStatus { Biactive, FirstActive, SecondActive, Inactive };

/// How an active component enters the local description of the feasible set.
/// Components of biactive constraints keep the nonsmooth cone structure;
/// the other active components reduce to a smooth equality or inequality.
enum class ComponentRole {
  Inactive,
  Biactive,
  Equality,     // F = 0, multiplier unrestricted
  Nonnegative,  // F >= 0, multiplier >= 0
  Nonpositive,  // F <= 0, multiplier <= 0
};

struct ConstraintActivity {
  ActiveStatus status = ActiveStatus::Inactive;
  ComponentRole first = ComponentRole::Inactive;
  ComponentRole second = ComponentRole::Inactive;
  ConePoint value;
};

struct ActivePattern {
  std::vector<ConstraintActivity> constraints;
  double tol = 0.0;
  std::vector<std::size_t> biactive;  // I00, 0-based

  std::size_t active_count() const;
};

inline bool is_active(ComponentRole r) { return r != ComponentRole::Inactive; }

std::string_view to_string(ActiveStatus s);

/// Throws InfeasiblePointError when x is not feasible at `tol`.
ActivePattern active_pattern(const SnoProblem& p, const Vector& x, double tol);

/// Stacked gradients of all active components, in constraint order with the
/// first component before the second.
Matrix active_gradients(const SnoProblem& p, const ActivePattern& pattern, const Vector& x);

}  // namespace sno
