#pragma once

#include <string>
#include <vector>

#include "sno/problem.hpp"

namespace sno {

struct ReferenceProblem {
  std::string key;    // file stem under data/problems
  std::string title;
  SnoProblem problem;
};

/// Two-variable complementarity instances with F1 = x1, F2 = x2.
SnoProblem regular_saddle();
SnoProblem singular_saddle_1();
SnoProblem singular_saddle_2(double eps = 0.0);
SnoProblem second_order_saddle();
SnoProblem not_first_order_saddle();
SnoProblem not_first_order_saddle_companion();
SnoProblem non_t_stationary();
/// Objective of the regular-saddle instance; its relaxation has closed-form KKT points.
SnoProblem scholtes_example();

std::vector<ReferenceProblem> reference_problems();

}  // namespace sno
