#include "sno/reference_problems.hpp"

#include <cstdio>

namespace sno {

namespace {

SnoProblem planar(const std::string& objective) {
  return SnoProblem::from_strings(2, objective, {{"x1", "x2"}}, ConeKind::Complementarity);
}

}  // namespace

SnoProblem regular_saddle() { return planar("(x1 - 1)^2 + (x2 - 1)^2"); }

SnoProblem singular_saddle_1() { return planar("-x1 + 0.5*x1^2 - x2^2 + 0.5*x2^4"); }

SnoProblem singular_saddle_2(double eps) {
  if (eps == 0.0) return planar("-x1 + 0.5*x1^2 + x2^2 - 0.5*x2^4");
  char buf[128];
  std::snprintf(buf, sizeof buf, "-x1 + 0.5*x1^2 + x2^2 - 0.5*x2^4 - %.17g*x2", eps);
  return planar(buf);
}

SnoProblem second_order_saddle() { return planar("-x1^2 + 0.5*x1^4 - x2^2 + 0.5*x2^4"); }

SnoProblem not_first_order_saddle() { return planar("x1 - 0.5*x1^2 - x2^2 + 0.5*x2^4"); }

SnoProblem not_first_order_saddle_companion() { return planar("x1 - 0.5*x1^2 + x2^2 - 0.5*x2^4"); }

SnoProblem non_t_stationary() { return planar("x1 - 0.5*x1^2 - x2 + 0.5*x2^2"); }

SnoProblem scholtes_example() { return regular_saddle(); }

std::vector<ReferenceProblem> reference_problems() {
  return {
      {"regular_saddle", "Regular saddle points of first order", regular_saddle()},
      {"singular_saddle_1", "Singular saddle points of first order I", singular_saddle_1()},
      {"singular_saddle_2", "Singular saddle points of first order II", singular_saddle_2()},
      {"singular_saddle_2_perturbed", "Singular saddle points of first order II, eps = 0.05", singular_saddle_2(0.05)},
      {"second_order_saddle", "Saddle points of second order", second_order_saddle()},
      {"not_first_order_saddle", "Not saddle points of first order", not_first_order_saddle()},
      {"not_first_order_saddle_companion", "Not saddle points of first order, companion", not_first_order_saddle_companion()},
      {"non_t_stationary", "Non-T-stationary points", non_t_stationary()},
      {"scholtes", "Scholtes type regularization", scholtes_example()},
  };
}

}  // namespace sno
