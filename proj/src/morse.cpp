#include "sno/morse.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "sno/errors.hpp"
#include "sno/linalg.hpp"

namespace sno {

bool Box::empty() const {
  if (bounds.empty()) return true;
  return std::any_of(bounds.begin(), bounds.end(), [](const auto& b) { return b.first > b.second; });
}

bool Box::contains(const Vector& x, double slack) const {
  if (static_cast<std::size_t>(x.size()) != bounds.size()) return false;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    const double v = x(static_cast<Eigen::Index>(j));
    if (v < bounds[j].first - slack || v > bounds[j].second + slack) return false;
  }
  return true;
}

Matrix lagrangian_hessian(const SnoProblem& p, const Vector& x, const MultiplierSet& ms) {
  Matrix h = p.objective().hessian(x);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& m = ms.pairs[i];
    if (m.first && *m.first != 0.0) h -= *m.first * p.constraints()[i].first.hessian(x);
    if (m.second && *m.second != 0.0) h -= *m.second * p.constraints()[i].second.hessian(x);
  }
  return h;
}

namespace {

bool spans_tangent(ComponentRole role, const std::optional<double>& lambda, double zero_tol) {
  switch (role) {
    case ComponentRole::Biactive:
    case ComponentRole::Equality: return true;
    case ComponentRole::Nonnegative:
    case ComponentRole::Nonpositive: return lambda && std::abs(*lambda) > zero_tol;
    case ComponentRole::Inactive: return false;
  }
  return false;
}

}  // namespace

Matrix tangent_basis(const SnoProblem& p, const ActivePattern& pattern, const Vector& x,
                     const MultiplierSet& ms, double zero_tol) {
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& c = pattern.constraints[i];
    if (spans_tangent(c.first, ms.pairs[i].first, zero_tol)) rows.push_back(p.constraints()[i].first.gradient(x));
    if (spans_tangent(c.second, ms.pairs[i].second, zero_tol)) rows.push_back(p.constraints()[i].second.gradient(x));
  }
  Matrix a(static_cast<Eigen::Index>(rows.size()), p.dimension());
  for (std::size_t r = 0; r < rows.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  RankInfo info = rank_and_null_space(a);
  if (info.rank != a.rows()) throw LicqError("tangent space gradients are linearly dependent");
  return std::move(info.null_space);
}

LagrangeData lagrange_data(const SnoProblem& p, const ActivePattern& pattern, const Vector& x,
                           const MultiplierSet& ms, const Tolerances& tols) {
  LagrangeData lag;
  lag.hessian_L = lagrangian_hessian(p, x, ms);
  lag.tangent_basis = tangent_basis(p, pattern, x, ms, tols.zero);
  const Matrix r = lag.tangent_basis.transpose() * lag.hessian_L * lag.tangent_basis;
  lag.restricted_hessian = 0.5 * (r + r.transpose());
  lag.eigenvalues = jacobi_eigen(lag.restricted_hessian).values;
  return lag;
}

QuadraticIndex quadratic_index(const Matrix& restricted_hessian, double eig_tol) {
  QuadraticIndex out;
  if (restricted_hessian.rows() == 0) return out;
  const Vector eig = jacobi_eigen(restricted_hessian).values;
  const double tol = eig_tol * std::max(1.0, eig.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    out.qi += eig(k) < -tol;
    out.nd3 = out.nd3 && std::abs(eig(k)) > tol;
  }
  return out;
}

int biactive_index(const MultiplierSet& ms, const ActivePattern& pattern, ConeKind cone, double zero_tol) {
  int bi = 0;
  for (std::size_t i : pattern.biactive) {
    const Sign s1 = sign_of(ms.pairs[i].first.value_or(0.0), zero_tol);
    const Sign s2 = sign_of(ms.pairs[i].second.value_or(0.0), zero_tol);
    if (cone == ConeKind::Complementarity) {
      bi += s1 == Sign::Negative && s2 == Sign::Negative;
    } else {
      bi += s1 != Sign::Zero && s2 != Sign::Zero;
    }
  }
  return bi;
}

Nondegeneracy nondegeneracy(const SnoProblem& p, const Vector& x, const ActivePattern& pattern,
                            const MultiplierSet& ms, const LagrangeData& lag, const Tolerances& tols) {
  Nondegeneracy nd;
  nd.nd1 = licq(p, pattern, x).holds;
  nd.nd2 = true;
  for (std::size_t i : pattern.biactive) {
    nd.nd2 = nd.nd2 && sign_of(ms.pairs[i].first.value_or(0.0), tols.zero) != Sign::Zero &&
             sign_of(ms.pairs[i].second.value_or(0.0), tols.zero) != Sign::Zero;
  }
  nd.nd3 = quadratic_index(lag.restricted_hessian, tols.eig).nd3;
  return nd;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::NondegenerateLocalMin: return "nondegenerate-local-min";
    case Verdict::NondegenerateSaddle: return "nondegenerate-saddle";
    case Verdict::Degenerate: return "degenerate";
    case Verdict::NotTStationary: return "not-T-stationary";
  }
  return "?";
}

MorseReport morse_verdict(const NotionFlags& flags, const Nondegeneracy& nd, int qi, int bi) {
  MorseReport m;
  m.qi = qi;
  m.bi = bi;
  m.ti = qi + bi;
  m.nd = nd;
  if (!flags.t_stationary) {
    m.verdict = Verdict::NotTStationary;
  } else if (!nd.all()) {
    m.verdict = Verdict::Degenerate;
  } else {
    m.verdict = m.ti == 0 ? Verdict::NondegenerateLocalMin : Verdict::NondegenerateSaddle;
  }
  return m;
}

StationarityReport analyze_point(const SnoProblem& p, const Vector& x, const Tolerances& tols) {
  StationarityReport r;
  r.point = x;
  r.objective = p.objective().value(x);
  r.pattern = active_pattern(p, x, tols.activity);
  r.licq = licq(p, r.pattern, x);
  if (!r.licq.holds) throw LicqError("SNO-LICQ fails at the point");
  r.multipliers = solve_multipliers(p, r.pattern, x);
  r.flags = classify_notions(r.multipliers, r.pattern, p.cone(), tols.zero, tols.w);
  if (c_stationarity_applicable(p.cone())) {
    r.c_stationary = c_stationarity_check(p.cone(), r.multipliers, r.pattern, tols.zero, tols.w);
  }
  r.saddle = classify_saddle(r.multipliers, r.pattern, p.cone(), tols.zero, tols.w);
  r.lagrange = lagrange_data(p, r.pattern, x, r.multipliers, tols);
  const Nondegeneracy nd = nondegeneracy(p, x, r.pattern, r.multipliers, r.lagrange, tols);
  const int qi = quadratic_index(r.lagrange.restricted_hessian, tols.eig).qi;
  const int bi = biactive_index(r.multipliers, r.pattern, p.cone(), tols.zero);
  r.morse = morse_verdict(r.flags, nd, qi, bi);
  return r;
}

// ---------------------------------------------------------------------------
// Stratified scan

void snap_roundoff(Vector& x, double tol) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) <= tol) x(i) = 0.0;
  }
}

std::vector<Vector> grid_seeds(const Box& box, int per_axis) {
  const std::size_t n = box.bounds.size();
  std::vector<Vector> seeds;
  std::vector<int> idx(n, 0);
  for (;;) {
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const auto [lo, hi] = box.bounds[j];
      x(static_cast<Eigen::Index>(j)) = per_axis == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx[j] / (per_axis - 1);
    }
    seeds.push_back(std::move(x));
    std::size_t j = 0;
    while (j < n && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == n) break;
  }
  return seeds;
}

namespace {

struct HeldComponent {
  std::size_t constraint;
  bool first;
};

std::vector<HeldComponent> held_components(const std::vector<Branch>& branches) {
  std::vector<HeldComponent> held;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (branches[i] == Branch::First || branches[i] == Branch::Both) held.push_back({i, true});
    if (branches[i] == Branch::Second || branches[i] == Branch::Both) held.push_back({i, false});
  }
  return held;
}

const SmoothFunction& component(const SnoProblem& p, const HeldComponent& c) {
  return c.first ? p.constraints()[c.constraint].first : p.constraints()[c.constraint].second;
}

}  // namespace

BranchSolution solve_branch_system(const SnoProblem& p, const std::vector<Branch>& branches,
                                   const Vector& x0, const NewtonOptions& options) {
  const auto held = held_components(branches);
  const Eigen::Index n = p.dimension();
  const auto k = static_cast<Eigen::Index>(held.size());

  // Unknowns z = (x, lambda). Rows: stationarity (n), then held components (k).
  SquareSystem system = [&](const Vector& z, Vector& r, Matrix* jac) {
    const Vector x = z.head(n);
    const Vector lambda = z.tail(k);
    r.resize(n + k);
    r.head(n) = p.objective().gradient(x);
    if (jac) {
      jac->setZero(n + k, n + k);
      jac->topLeftCorner(n, n) = p.objective().hessian(x);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      const SmoothFunction& fc = component(p, held[static_cast<std::size_t>(c)]);
      const Vector g = fc.gradient(x);
      r.head(n) -= lambda(c) * g;
      r(n + c) = fc.value(x);
      if (jac) {
        jac->topLeftCorner(n, n) -= lambda(c) * fc.hessian(x);
        jac->block(0, n + c, n, 1) = -g;
        jac->block(n + c, 0, 1, n) = g.transpose();
      }
    }
  };

  Vector z0(n + k);
  z0.head(n) = x0;
  z0.tail(k).setZero();
  if (k > 0) {
    // Least-squares multipliers at the seed.
    try {
      Matrix g(k, n);
      for (Eigen::Index c = 0; c < k; ++c) g.row(c) = component(p, held[static_cast<std::size_t>(c)]).gradient(x0).transpose();
      const Vector lambda = g.transpose().colPivHouseholderQr().solve(p.objective().gradient(x0));
      if (lambda.allFinite()) z0.tail(k) = lambda;
    } catch (const DomainError&) {
    }
  }

  const NewtonSolve s = damped_newton(system, std::move(z0), options);
  BranchSolution out;
  out.converged = s.converged;
  out.x = s.z.head(n);
  out.lambda = s.z.tail(k);
  out.residual = s.residual;
  out.iterations = s.iterations;
  return out;
}

namespace {

std::vector<std::vector<Branch>> all_branch_patterns(std::size_t m) {
  std::vector<std::vector<Branch>> out;
  std::vector<int> idx(m, 0);
  static constexpr Branch kinds[] = {Branch::First, Branch::Second, Branch::Both, Branch::None};
  for (;;) {
    std::vector<Branch> pattern(m);
    for (std::size_t i = 0; i < m; ++i) pattern[i] = kinds[idx[i]];
    out.push_back(std::move(pattern));
    std::size_t i = 0;
    while (i < m && ++idx[i] == 4) idx[i++] = 0;
    if (i == m) break;
  }
  return out;
}

bool lex_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

ScanResult stratified_scan(const SnoProblem& p, const Box& box, const ScanOptions& options) {
  ScanResult result;
  if (box.empty()) return result;
  if (box.bounds.size() != static_cast<std::size_t>(p.dimension())) {
    throw InvalidArgument("box dimension does not match the problem");
  }
  if (options.seeds_per_axis < 2) throw InvalidArgument("seeds_per_axis must be at least 2");

  const auto patterns = all_branch_patterns(p.size());
  const auto seeds = grid_seeds(box, options.seeds_per_axis);
  const std::size_t jobs = patterns.size() * seeds.size();
  const NewtonOptions newton{options.max_iterations, options.step_tol, options.residual_tol};

  // One slot per job keeps the collected output independent of scheduling.
  std::vector<std::optional<Vector>> found(jobs);
  std::vector<char> converged(jobs, 0);
  auto run = [&](std::size_t job) {
    const auto& pattern = patterns[job / seeds.size()];
    const auto& seed = seeds[job % seeds.size()];
    const BranchSolution s = solve_branch_system(p, pattern, seed, newton);
    if (!s.converged) return;
    converged[job] = 1;
    if (!box.contains(s.x, 1e-9)) return;
    try {
      const ActivePattern ap = active_pattern(p, s.x, options.tols.activity);
      if (!licq(p, ap, s.x).holds) return;
      if (solve_multipliers(p, ap, s.x).residual > options.tols.w) return;
    } catch (const Error&) {
      return;
    }
    Vector x = s.x;
    snap_roundoff(x);
    found[job] = std::move(x);
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t job = t; job < jobs; job += threads) run(job);
      });
    }
  }

  result.newton_runs = jobs;
  std::vector<Vector> candidates;
  for (std::size_t job = 0; job < jobs; ++job) {
    result.nonconvergent += !converged[job];
    if (found[job]) candidates.push_back(*found[job]);
  }
  std::sort(candidates.begin(), candidates.end(), lex_less);

  std::vector<Vector> kept;
  for (const auto& c : candidates) {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const Vector& k) {
      return (k - c).cwiseAbs().maxCoeff() <= options.dedupe_radius;
    });
    if (!duplicate) kept.push_back(c);
  }
  for (const auto& x : kept) result.points.push_back(analyze_point(p, x, options.tols));
  return result;
}

}  // namespace sno
