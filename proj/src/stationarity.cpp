#include "sno/stationarity.hpp"

#include "sno/errors.hpp"
#include "sno/linalg.hpp"

namespace sno {

LicqReport licq(const SnoProblem& p, const ActivePattern& pattern, const Vector& x) {
  LicqReport report;
  report.active_gradients = active_gradients(p, pattern, x);
  const RankInfo info = rank_and_null_space(report.active_gradients);
  report.rank = info.rank;
  report.smallest_singular_value = info.smallest_singular_value;
  report.holds = info.rank == report.active_gradients.rows();
  return report;
}

LicqReport licq(const SnoProblem& p, const Vector& x, double tol) {
  return licq(p, active_pattern(p, x, tol), x);
}

MultiplierSet solve_multipliers(const SnoProblem& p, const ActivePattern& pattern, const Vector& x) {
  const Matrix rows = active_gradients(p, pattern, x);
  if (rank_and_null_space(rows).rank != rows.rows()) {
    throw LicqError("active constraint gradients are linearly dependent");
  }
  const Vector grad = p.objective().gradient(x);
  // grad f = rows^T * lambda in the least-squares sense.
  Vector lambda = rows.rows() ? Vector(rows.transpose().householderQr().solve(grad)) : Vector(0);

  MultiplierSet ms;
  ms.point = x;
  ms.residual = (grad - rows.transpose() * lambda).norm();
  ms.pairs.resize(p.size());
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& c = pattern.constraints[i];
    if (is_active(c.first)) ms.pairs[i].first = lambda(k++);
    if (is_active(c.second)) ms.pairs[i].second = lambda(k++);
  }
  return ms;
}

MultiplierSet solve_multipliers(const SnoProblem& p, const Vector& x, double tol) {
  return solve_multipliers(p, active_pattern(p, x, tol), x);
}

std::string_view to_string(Notion n) {
  switch (n) {
    case Notion::FrechetHat: return "Nhat";
    case Notion::Limiting: return "N";
    case Notion::ClarkeBar: return "Nbar";
    case Notion::T: return "T";
  }
  return "?";
}

std::string_view to_string(SaddleLabel l) {
  switch (l) {
    case SaddleLabel::NotSaddleIndex: return "none";
    case SaddleLabel::SingularSaddleIndex: return "singular";
    case SaddleLabel::RegularSaddleIndex: return "regular";
  }
  return "?";
}

bool biactive_condition(Notion notion, ConeKind cone, Sign l1, Sign l2) {
  const bool z1 = l1 == Sign::Zero;
  const bool z2 = l2 == Sign::Zero;
  const bool nonneg1 = l1 != Sign::Negative;
  const bool nonneg2 = l2 != Sign::Negative;
  const bool nonpos2 = l2 != Sign::Positive;
  const bool product_zero = z1 || z2;
  // l1 * l2 >= 0 on sign classes: no strictly opposite signs.
  const bool product_nonneg = product_zero || l1 == l2;

  switch (notion) {
    case Notion::FrechetHat:
      switch (cone) {
        case ConeKind::Complementarity: return nonneg1 && nonneg2;
        case ConeKind::Vanishing: return nonneg1 && z2;
        case ConeKind::Orthogonality: return z1 && nonneg2;
        case ConeKind::Switching:
        case ConeKind::Disjunctive: return z1 && z2;
      }
      break;
    case Notion::Limiting:
      switch (cone) {
        case ConeKind::Complementarity:
          return (l1 == Sign::Positive && l2 == Sign::Positive) || product_zero;
        case ConeKind::Vanishing: return product_zero && nonpos2;
        case ConeKind::Orthogonality:
        case ConeKind::Switching: return product_zero;
        case ConeKind::Disjunctive: return product_zero && nonneg1 && nonneg2;
      }
      break;
    case Notion::ClarkeBar:
      switch (cone) {
        case ConeKind::Complementarity:
        case ConeKind::Orthogonality:
        case ConeKind::Switching: return true;
        case ConeKind::Vanishing: return nonpos2;
        case ConeKind::Disjunctive: return nonneg1 && nonneg2;
      }
      break;
    case Notion::T:
      switch (cone) {
        case ConeKind::Complementarity: return product_nonneg;
        case ConeKind::Vanishing: return product_nonneg && nonpos2;
        case ConeKind::Orthogonality: return z1 || nonpos2;
        case ConeKind::Switching: return true;
        case ConeKind::Disjunctive: return nonneg1 && nonneg2;
      }
      break;
  }
  return false;
}

bool saddle_condition(ConeKind cone, Sign l1, Sign l2) {
  const bool both_zero = l1 == Sign::Zero && l2 == Sign::Zero;
  if (both_zero) return false;
  switch (cone) {
    case ConeKind::Complementarity:
    case ConeKind::Vanishing: return l1 != Sign::Positive && l2 != Sign::Positive;
    case ConeKind::Orthogonality: return l2 != Sign::Positive;
    case ConeKind::Switching: return true;
    case ConeKind::Disjunctive: return l1 != Sign::Negative && l2 != Sign::Negative;
  }
  return false;
}

namespace {

bool role_condition(ComponentRole role, const std::optional<double>& lambda, double zero_tol) {
  if (!lambda) return true;
  const Sign s = sign_of(*lambda, zero_tol);
  switch (role) {
    case ComponentRole::Nonnegative: return s != Sign::Negative;
    case ComponentRole::Nonpositive: return s != Sign::Positive;
    default: return true;
  }
}

std::pair<Sign, Sign> biactive_signs(const PairMultipliers& m, double zero_tol) {
  return {sign_of(m.first.value_or(0.0), zero_tol), sign_of(m.second.value_or(0.0), zero_tol)};
}

}  // namespace

NotionFlags classify_notions(const MultiplierSet& ms, const ActivePattern& pattern, ConeKind cone,
                             double zero_tol, double w_tol) {
  NotionFlags flags;
  if (!(ms.residual <= w_tol)) return flags;
  flags.w = true;

  // Reduced inequality components carry the usual KKT sign in every notion.
  bool reduced_ok = true;
  for (std::size_t i = 0; i < pattern.constraints.size(); ++i) {
    const auto& c = pattern.constraints[i];
    if (c.status == ActiveStatus::Biactive) continue;
    reduced_ok = reduced_ok && role_condition(c.first, ms.pairs[i].first, zero_tol) &&
                 role_condition(c.second, ms.pairs[i].second, zero_tol);
  }

  auto holds = [&](Notion notion) {
    if (!reduced_ok) return false;
    for (std::size_t i : pattern.biactive) {
      const auto [s1, s2] = biactive_signs(ms.pairs[i], zero_tol);
      if (!biactive_condition(notion, cone, s1, s2)) return false;
    }
    return true;
  };
  flags.frechet_hat = holds(Notion::FrechetHat);
  flags.limiting = holds(Notion::Limiting);
  flags.clarke_bar = holds(Notion::ClarkeBar);
  flags.t_stationary = holds(Notion::T);
  return flags;
}

SaddleClass classify_saddle(const MultiplierSet& ms, const ActivePattern& pattern, ConeKind cone,
                            double zero_tol, double w_tol) {
  SaddleClass out;
  const bool t = classify_notions(ms, pattern, cone, zero_tol, w_tol).t_stationary;
  for (std::size_t i : pattern.biactive) {
    SaddleLabel label = SaddleLabel::NotSaddleIndex;
    const auto [s1, s2] = biactive_signs(ms.pairs[i], zero_tol);
    if (t && saddle_condition(cone, s1, s2)) {
      const bool one_zero = s1 == Sign::Zero || s2 == Sign::Zero;
      label = one_zero ? SaddleLabel::SingularSaddleIndex : SaddleLabel::RegularSaddleIndex;
    }
    out.per_index.emplace_back(i, label);
    out.is_singular = out.is_singular || label == SaddleLabel::SingularSaddleIndex;
    out.is_regular = out.is_regular || label == SaddleLabel::RegularSaddleIndex;
  }
  out.is_first_order_saddle = out.is_singular || out.is_regular;
  return out;
}

bool c_stationarity_check(ConeKind cone, const MultiplierSet& ms, const ActivePattern& pattern,
                          double zero_tol, double w_tol) {
  if (!c_stationarity_applicable(cone)) {
    throw UnsupportedError("C-stationarity is not defined for the " + std::string(to_string(cone)) +
                           " cone");
  }
  if (!(ms.residual <= w_tol)) return false;
  auto snap = [zero_tol](double v) { return std::abs(v) <= zero_tol ? 0.0 : v; };

  for (std::size_t i = 0; i < pattern.constraints.size(); ++i) {
    const auto& c = pattern.constraints[i];
    const auto& m = ms.pairs[i];
    if (c.status != ActiveStatus::Biactive) {
      // Locally max{F1, F2} >= 0 reduces to a single smooth inequality.
      if (cone == ConeKind::Disjunctive) {
        const double l = snap(m.first.value_or(0.0) + m.second.value_or(0.0));
        if (l < 0.0) return false;
      }
      continue;
    }
    // (l1, l2) = mu * (beta, 1 - beta) with beta in [0, 1]; mu >= 0 for max.
    const double l1 = snap(m.first.value_or(0.0));
    const double l2 = snap(m.second.value_or(0.0));
    if (l1 == 0.0 && l2 == 0.0) continue;
    const double mu = l1 + l2;
    if (mu == 0.0) return false;
    const double beta = l1 / mu;
    if (beta < 0.0 || beta > 1.0) return false;
    if (cone == ConeKind::Disjunctive && mu < 0.0) return false;
  }
  return true;
}

bool c_stationarity_check(const SnoProblem& p, const Vector& x, const MultiplierSet& ms,
                          const Tolerances& tols) {
  return c_stationarity_check(p.cone(), ms, active_pattern(p, x, tols.activity), tols.zero, tols.w);
}

}  // namespace sno
