#include "sno/problem.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "sno/errors.hpp"

namespace sno {

namespace {

constexpr std::array<std::pair<std::string_view, ConeKind>, 5> kConeNames = {{
    {"complementarity", ConeKind::Complementarity},
    {"vanishing", ConeKind::Vanishing},
    {"orthogonality", ConeKind::Orthogonality},
    {"switching", ConeKind::Switching},
    {"disjunctive", ConeKind::Disjunctive},
}};

double dist2(ConePoint a, ConePoint b) {
  const double d1 = a.a1 - b.a1;
  const double d2 = a.a2 - b.a2;
  return d1 * d1 + d2 * d2;
}

}  // namespace

std::string_view to_string(ConeKind cone) {
  for (const auto& [name, kind] : kConeNames) {
    if (kind == cone) return name;
  }
  return "unknown";
}

ConeKind cone_from_string(std::string_view name) {
  for (const auto& [n, kind] : kConeNames) {
    if (n == name) return kind;
  }
  throw ParseError("unknown cone '" + std::string(name) + "'");
}

bool cone_membership(ConeKind cone, ConePoint a, double tol) {
  const double prod = a.a1 * a.a2;
  switch (cone) {
    case ConeKind::Complementarity:
      return std::abs(prod) <= tol && a.a1 >= -tol && a.a2 >= -tol;
    case ConeKind::Vanishing: return a.a1 >= -tol && prod <= tol;
    case ConeKind::Orthogonality: return std::abs(prod) <= tol && a.a2 >= -tol;
    case ConeKind::Switching: return std::abs(prod) <= tol;
    case ConeKind::Disjunctive: return a.a1 >= -tol || a.a2 >= -tol;
  }
  return false;
}

ConePoint cone_project(ConeKind cone, ConePoint a) {
  if (cone_membership(cone, a, 0.0)) return a;

  // Every cone is a union of at most two closed convex pieces; project onto
  // each piece and keep the closest.
  std::array<ConePoint, 2> candidates;
  switch (cone) {
    case ConeKind::Complementarity:
      candidates = {ConePoint{std::max(a.a1, 0.0), 0.0}, ConePoint{0.0, std::max(a.a2, 0.0)}};
      break;
    case ConeKind::Vanishing:
      candidates = {ConePoint{std::max(a.a1, 0.0), std::min(a.a2, 0.0)}, ConePoint{0.0, a.a2}};
      break;
    case ConeKind::Orthogonality:
      candidates = {ConePoint{a.a1, 0.0}, ConePoint{0.0, std::max(a.a2, 0.0)}};
      break;
    case ConeKind::Switching:
      candidates = {ConePoint{a.a1, 0.0}, ConePoint{0.0, a.a2}};
      break;
    case ConeKind::Disjunctive:
      // Only the open third quadrant lies outside.
      candidates = {ConePoint{a.a1, 0.0}, ConePoint{0.0, a.a2}};
      break;
  }

  const auto& [c1, c2] = candidates;
  const double d1 = dist2(a, c1);
  const double d2 = dist2(a, c2);
  if (d1 < d2) return c1;
  if (d2 < d1) return c2;
  const double m1 = std::max(c1.a1, c1.a2);
  const double m2 = std::max(c2.a1, c2.a2);
  if (m2 > m1) return c2;
  return c1;
}

double cone_distance(ConeKind cone, ConePoint a) { return std::sqrt(dist2(a, cone_project(cone, a))); }

// ---------------------------------------------------------------------------

SmoothFunction::SmoothFunction(Expr e)
    : expr_(std::move(e)), gradient_(expr_.gradient()), hessian_(expr_.hessian()) {}

double SmoothFunction::value(const Vector& x) const { return expr_.eval({x.data(), static_cast<std::size_t>(x.size())}); }

Vector SmoothFunction::gradient(const Vector& x) const {
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  Vector g(static_cast<Eigen::Index>(gradient_.size()));
  for (std::size_t j = 0; j < gradient_.size(); ++j) g(static_cast<Eigen::Index>(j)) = gradient_[j].eval(xs);
  return g;
}

Matrix SmoothFunction::hessian(const Vector& x) const {
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  const auto n = static_cast<Eigen::Index>(hessian_.size());
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      h(i, j) = hessian_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(xs);
      h(j, i) = h(i, j);
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

namespace {

Expr lift(const Expr& e, int dimension) { return e.with_dimension(dimension); }

}  // namespace

SnoProblem::SnoProblem(int dimension, Expr objective, std::vector<std::pair<Expr, Expr>> constraints,
                       ConeKind cone)
    : dimension_(dimension), objective_(lift(objective, dimension)), cone_(cone) {
  if (dimension < 1) throw InvalidArgument("dimension must be positive");
  if (constraints.empty()) throw InvalidArgument("at least one constraint pair is required");
  constraints_.reserve(constraints.size());
  for (auto& [f1, f2] : constraints) {
    constraints_.push_back({SmoothFunction(lift(f1, dimension)), SmoothFunction(lift(f2, dimension))});
  }
}

SnoProblem SnoProblem::from_strings(int dimension, std::string_view objective,
                                    const std::vector<std::pair<std::string, std::string>>& constraints,
                                    ConeKind cone) {
  std::vector<std::pair<Expr, Expr>> pairs;
  pairs.reserve(constraints.size());
  for (const auto& [f1, f2] : constraints) pairs.emplace_back(parse(f1, dimension), parse(f2, dimension));
  return SnoProblem(dimension, parse(objective, dimension), std::move(pairs), cone);
}

SnoProblem SnoProblem::from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    if (n < 1) throw ParseError("problem dimension n must be positive");
    const ConeKind cone = cone_from_string(j.at("cone").get<std::string>());
    const auto objective = j.at("objective").get<std::string>();
    std::vector<std::pair<std::string, std::string>> constraints;
    for (const auto& c : j.at("constraints")) {
      constraints.emplace_back(c.at("F1").get<std::string>(), c.at("F2").get<std::string>());
    }
    if (constraints.empty()) throw ParseError("problem needs at least one constraint pair");
    return from_strings(n, objective, constraints, cone);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid problem file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

SnoProblem SnoProblem::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json SnoProblem::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : constraints_) {
    cs.push_back({{"F1", c.first.expr().to_string()}, {"F2", c.second.expr().to_string()}});
  }
  return {{"n", dimension_},
          {"cone", std::string(to_string(cone_))},
          {"objective", objective_.expr().to_string()},
          {"constraints", cs}};
}

ConePoint SnoProblem::constraint_value(std::size_t i, const Vector& x) const {
  return {constraints_[i].first.value(x), constraints_[i].second.value(x)};
}

bool feasible(const SnoProblem& p, const Vector& x, double tol) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!cone_membership(p.cone(), p.constraint_value(i, x), tol)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ActiveStatus s) {
  switch (s) {
    case ActiveStatus::Biactive: return "biactive";
    case ActiveStatus::FirstActive: return "first-active";
    case ActiveStatus::SecondActive: return "second-active";
    case ActiveStatus::Inactive: return "inactive";
  }
  return "?";
}

std::size_t ActivePattern::active_count() const {
  std::size_t k = 0;
  for (const auto& c : constraints) k += is_active(c.first) + is_active(c.second);
  return k;
}

namespace {

// Local reduction of a constraint with exactly one vanishing component.
// `other` is the value of the nonvanishing component, |other| > tol.
ComponentRole reduced_role(ConeKind cone, bool first_vanishes, double other) {
  const bool other_pos = other > 0.0;
  switch (cone) {
    case ConeKind::Complementarity:
    case ConeKind::Switching: return ComponentRole::Equality;
    case ConeKind::Vanishing:
      if (first_vanishes) return other_pos ? ComponentRole::Equality : ComponentRole::Nonnegative;
      return ComponentRole::Nonpositive;  // F1 > 0 forces F2 <= 0
    case ConeKind::Orthogonality: return ComponentRole::Equality;
    case ConeKind::Disjunctive:
      return other_pos ? ComponentRole::Inactive : ComponentRole::Nonnegative;
  }
  return ComponentRole::Inactive;
}

}  // namespace

ActivePattern active_pattern(const SnoProblem& p, const Vector& x, double tol) {
  if (!feasible(p, x, tol)) throw InfeasiblePointError("point is not feasible");
  ActivePattern pattern;
  pattern.tol = tol;
  pattern.constraints.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    ConstraintActivity c;
    c.value = p.constraint_value(i, x);
    const bool z1 = std::abs(c.value.a1) <= tol;
    const bool z2 = std::abs(c.value.a2) <= tol;
    if (z1 && z2) {
      c.status = ActiveStatus::Biactive;
      c.first = c.second = ComponentRole::Biactive;
      pattern.biactive.push_back(i);
    } else if (z1) {
      c.first = reduced_role(p.cone(), true, c.value.a2);
      c.status = is_active(c.first) ? ActiveStatus::FirstActive : ActiveStatus::Inactive;
    } else if (z2) {
      c.second = reduced_role(p.cone(), false, c.value.a1);
      c.status = is_active(c.second) ? ActiveStatus::SecondActive : ActiveStatus::Inactive;
    }
    pattern.constraints.push_back(c);
  }
  return pattern;
}

Matrix active_gradients(const SnoProblem& p, const ActivePattern& pattern, const Vector& x) {
  Matrix rows(static_cast<Eigen::Index>(pattern.active_count()), p.dimension());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& c = pattern.constraints[i];
    if (is_active(c.first)) rows.row(r++) = p.constraints()[i].first.gradient(x).transpose();
    if (is_active(c.second)) rows.row(r++) = p.constraints()[i].second.gradient(x).transpose();
  }
  return rows;
}

}  // namespace sno
