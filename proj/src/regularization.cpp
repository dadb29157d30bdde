#include "sno/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "sno/errors.hpp"

namespace sno {

ScholtesNlp::ScholtesNlp(const SnoProblem& problem, double t) : problem_(&problem), t_(t) {
  if (problem.cone() != ConeKind::Complementarity) {
    throw UnsupportedError("regularization is implemented for the complementarity cone only");
  }
  if (!(t > 0.0)) throw InvalidArgument("regularization parameter t must be positive");
  const int n = problem.dimension();
  for (const auto& c : problem.constraints()) {
    constraints_.emplace_back(Expr::constant(t, n) - c.first.expr() * c.second.expr());
    constraints_.emplace_back(c.first.expr());
    constraints_.emplace_back(c.second.expr());
  }
}

double ScholtesNlp::kkt_residual(const Vector& x, const Vector& mu) const {
  Vector stat = problem_->objective().gradient(x);
  double comp = 0.0;
  double infeas = 0.0;
  double dual = 0.0;
  for (std::size_t j = 0; j < constraints_.size(); ++j) {
    const double mj = mu(static_cast<Eigen::Index>(j));
    const double g = constraints_[j].value(x);
    if (mj != 0.0) stat -= mj * constraints_[j].gradient(x);
    comp += std::abs(mj * g);
    infeas += std::max(0.0, -g);
    dual += std::max(0.0, -mj);
  }
  return stat.norm() + comp + infeas + dual;
}

std::optional<KktPoint> solve_active_set(const ScholtesNlp& nlp, const std::vector<std::size_t>& active,
                                         const Vector& x0, const Vector& mu0, const KktOptions& options) {
  const SnoProblem& p = nlp.problem();
  const Eigen::Index n = p.dimension();
  const auto k = static_cast<Eigen::Index>(active.size());

  SquareSystem system = [&](const Vector& z, Vector& r, Matrix* jac) {
    const Vector x = z.head(n);
    r.resize(n + k);
    r.head(n) = p.objective().gradient(x);
    if (jac) {
      jac->setZero(n + k, n + k);
      jac->topLeftCorner(n, n) = p.objective().hessian(x);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      const SmoothFunction& g = nlp.constraint(active[static_cast<std::size_t>(c)]);
      const Vector grad = g.gradient(x);
      r.head(n) -= z(n + c) * grad;
      r(n + c) = g.value(x);
      if (jac) {
        jac->topLeftCorner(n, n) -= z(n + c) * g.hessian(x);
        jac->block(0, n + c, n, 1) = -grad;
        jac->block(n + c, 0, 1, n) = grad.transpose();
      }
    }
  };

  Vector z0(n + k);
  z0.head(n) = x0;
  for (Eigen::Index c = 0; c < k; ++c) z0(n + c) = mu0(static_cast<Eigen::Index>(active[static_cast<std::size_t>(c)]));
  const NewtonSolve s = damped_newton(system, std::move(z0), options.newton);
  if (!s.converged) return std::nullopt;

  KktPoint pt;
  pt.x = s.z.head(n);
  pt.mu = Vector::Zero(static_cast<Eigen::Index>(nlp.constraint_count()));
  for (Eigen::Index c = 0; c < k; ++c) pt.mu(static_cast<Eigen::Index>(active[static_cast<std::size_t>(c)])) = s.z(n + c);
  pt.active = active;
  try {
    pt.residual = nlp.kkt_residual(pt.x, pt.mu);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  return pt;
}

namespace {

bool admissible(const ScholtesNlp& nlp, const KktPoint& pt, const KktOptions& options) {
  for (std::size_t j = 0; j < nlp.constraint_count(); ++j) {
    if (nlp.constraint(j).value(pt.x) < -options.feasibility_tol) return false;
    if (pt.mu(static_cast<Eigen::Index>(j)) < -options.zero_tol) return false;
  }
  return true;
}

std::vector<std::vector<std::size_t>> active_subsets(std::size_t count) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << count); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < count; ++j) {
      if (mask & (std::size_t{1} << j)) s.push_back(j);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void check_enumeration_size(const ScholtesNlp& nlp) {
  if (nlp.constraint_count() > 12) {
    throw InvalidArgument("active-set enumeration is capped at 4096 subsets (12 inequalities)");
  }
}

}  // namespace

std::vector<KktPoint> kkt_points_at(const ScholtesNlp& nlp, const Box& box, const KktOptions& options) {
  check_enumeration_size(nlp);
  if (box.empty()) return {};
  if (box.bounds.size() != static_cast<std::size_t>(nlp.problem().dimension())) {
    throw InvalidArgument("box dimension does not match the problem");
  }
  const auto subsets = active_subsets(nlp.constraint_count());
  const auto seeds = grid_seeds(box, options.seeds_per_axis);
  const std::size_t jobs = subsets.size() * seeds.size();
  const Vector mu0 = Vector::Zero(static_cast<Eigen::Index>(nlp.constraint_count()));

  std::vector<std::optional<KktPoint>> found(jobs);
  auto run = [&](std::size_t job) {
    auto pt = solve_active_set(nlp, subsets[job / seeds.size()], seeds[job % seeds.size()], mu0, options);
    if (pt && box.contains(pt->x, 1e-9) && admissible(nlp, *pt, options)) found[job] = std::move(pt);
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

  std::vector<KktPoint> candidates;
  for (auto& f : found) {
    if (f) {
      snap_roundoff(f->x);
      candidates.push_back(std::move(*f));
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const KktPoint& a, const KktPoint& b) {
    return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
  });
  std::vector<KktPoint> kept;
  for (auto& c : candidates) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const KktPoint& k) {
      return (k.x - c.x).cwiseAbs().maxCoeff() <= options.dedupe_radius;
    });
    if (!dup) kept.push_back(std::move(c));
  }
  return kept;
}

namespace {

// Solve with `active`, then drop negative multipliers / add violated
// constraints until the active set is consistent or the pivot budget is spent.
std::optional<KktPoint> revalidated_solve(const ScholtesNlp& nlp, std::vector<std::size_t> active,
                                          const Vector& x0, const Vector& mu0, const PathOptions& options) {
  for (int pivot = 0; pivot <= options.max_pivots; ++pivot) {
    auto pt = solve_active_set(nlp, active, x0, mu0, options.kkt);
    if (!pt) return std::nullopt;

    std::optional<std::size_t> drop;
    double most_negative = -options.kkt.zero_tol;
    for (std::size_t j : active) {
      if (pt->mu(static_cast<Eigen::Index>(j)) < most_negative) {
        most_negative = pt->mu(static_cast<Eigen::Index>(j));
        drop = j;
      }
    }
    std::optional<std::size_t> add;
    double most_violated = -options.kkt.feasibility_tol;
    for (std::size_t j = 0; j < nlp.constraint_count(); ++j) {
      if (std::find(active.begin(), active.end(), j) != active.end()) continue;
      const double g = nlp.constraint(j).value(pt->x);
      if (g < most_violated) {
        most_violated = g;
        add = j;
      }
    }
    if (!drop && !add) return pt;
    if (drop) active.erase(std::find(active.begin(), active.end(), *drop));
    if (add) active.insert(std::upper_bound(active.begin(), active.end(), *add), *add);
  }
  return std::nullopt;
}

}  // namespace

ScholtesPath path_follow(const SnoProblem& p, const Vector& start, const PathOptions& options) {
  if (!(options.theta > 0.0 && options.theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (!(options.t0 > 0.0)) throw InvalidArgument("t0 must be positive");
  if (options.steps < 0) throw InvalidArgument("number of steps must be nonnegative");
  if (start.size() != p.dimension()) throw InvalidArgument("start point has the wrong dimension");

  ScholtesPath path;
  for (int k = 0; k <= options.steps; ++k) path.schedule.push_back(options.t0 * std::pow(options.theta, k));

  std::vector<std::size_t> active;
  // Initial point: the admissible KKT point of NLP(t0) closest to `start`
  // over all active sets, each solved from `start`.
  {
    const ScholtesNlp nlp(p, options.t0);
    check_enumeration_size(nlp);
    const Vector mu0 = Vector::Zero(static_cast<Eigen::Index>(nlp.constraint_count()));
    std::optional<KktPoint> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& subset : active_subsets(nlp.constraint_count())) {
      auto pt = solve_active_set(nlp, subset, start, mu0, options.kkt);
      if (!pt || !admissible(nlp, *pt, options.kkt)) continue;
      const double d = (pt->x - start).norm();
      if (d < best_dist) {
        best_dist = d;
        best = std::move(pt);
      }
    }
    if (!best) {
      path.message = "no KKT point of the regularized problem found near the start point at t0";
      return path;
    }
    path.states.push_back({options.t0, best->x, best->mu, best->residual});
    active = best->active;
  }

  path.completed = true;
  for (int k = 1; k <= options.steps; ++k) {
    const double t = path.schedule[static_cast<std::size_t>(k)];
    const ScholtesNlp nlp(p, t);
    const PathState& prev = path.states.back();
    auto pt = revalidated_solve(nlp, active, prev.x, prev.mu, options);
    if (!pt) {
      path.completed = false;
      path.message = "Newton failed to converge at t = " + std::to_string(t);
      break;
    }
    active = pt->active;
    path.states.push_back({t, pt->x, pt->mu, pt->residual});
  }

  path.limit = path.states.back().x;

  // The last iterate sits O(sqrt(t)) away from its limit; hold every component
  // of that size at zero and solve the branch system of the original problem.
  const double hold_tol = std::max(options.tols.activity, 10.0 * std::sqrt(path.states.back().t));
  std::vector<Branch> branches;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const ConePoint v = p.constraint_value(i, path.limit);
    const bool z1 = std::abs(v.a1) <= hold_tol;
    const bool z2 = std::abs(v.a2) <= hold_tol;
    branches.push_back(z1 && z2 ? Branch::Both : z1 ? Branch::First : z2 ? Branch::Second : Branch::None);
  }
  const BranchSolution polished = solve_branch_system(p, branches, path.limit, options.kkt.newton);
  path.limit_polished = polished.converged ? polished.x : path.limit;
  try {
    path.limit_report = analyze_point(p, path.limit_polished, options.tols);
  } catch (const Error& e) {
    if (!path.message.empty()) path.message += "; ";
    path.message += std::string("limit not classified: ") + e.what();
  }
  return path;
}

}  // namespace sno
