#include "noma/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace noma {

namespace {

QpProblem k1_problem(const ObjectiveBundle& bundle) {
  const Index q = bundle.grid.q_count;
  const Matrix m1 = bundle.tensors[1].as_matrix();
  QpProblem p;
  p.hessian = bundle.traffic.weights[1] * (m1 + m1.transpose());
  p.cost = bundle.traffic.weights[0] * bundle.tensors[0].as_vector();
  p.eq_matrix.resize(2, q);
  p.eq_matrix.row(0).setOnes();
  p.eq_matrix.row(1) = bundle.grid.snr_linear.transpose();
  p.eq_rhs.resize(2);
  p.eq_rhs << 1.0, bundle.grid.target_mean_snr;
  return p;
}

bool uniform_is_feasible(const ObjectiveBundle& bundle) {
  const double mean = bundle.grid.snr_linear.mean();
  return std::abs(mean - bundle.grid.target_mean_snr) <=
         1e-9 * std::max(1.0, bundle.grid.target_mean_snr);
}

SolveReport solve_weighted_quadratic(const QpProblem& p, const ObjectiveBundle& bundle,
                                     const Vector* start, const OptimizerConfig& config) {
  SolveReport rep;
  if (start != nullptr)
    rep = solve_qp(p, *start, config.qp);
  else if (uniform_is_feasible(bundle))
    rep = solve_qp(p, Vector::Constant(p.cost.size(), 1.0 / double(p.cost.size())), config.qp);
  else
    rep = solve_qp(p, config.qp);
  if (rep.status == SolveStatus::Infeasible)
    throw std::invalid_argument("constraint set is empty: target mean SNR unreachable");
  return rep;
}

}  // namespace

std::pair<LevelDistribution, SolveReport> optimize_k1(const ObjectiveBundle& bundle,
                                                      const OptimizerConfig& config) {
  bundle.validate();
  require(bundle.traffic.k_max >= 1, "K = 1 optimization needs tensors up to order 2");
  const QpProblem p = k1_problem(bundle);
  const SolveReport rep = solve_weighted_quadratic(p, bundle, nullptr, config);
  LevelDistribution dist;
  dist.probs = rep.solution;
  dist.mean_constrained = true;
  dist.validate();
  return {dist, rep};
}

IterativeResult optimize_iterative(const ObjectiveBundle& bundle, const OptimizerConfig& config) {
  bundle.validate();
  require(config.max_iterations >= 1, "max_iterations must be positive");
  require(config.convergence_tol > 0.0, "convergence_tol must be positive");
  const int k_max = bundle.traffic.k_max;
  require(k_max >= 1, "iterative optimization needs at least the order-2 tensor");

  IterativeResult result;
  auto [d0, rep0] = optimize_k1(bundle, config);
  IterationRecord rec0;
  rec0.probs = d0.probs;
  rec0.objective = truncated_blep(d0.probs, bundle);
  rec0.qp_status = rep0.status;
  rec0.step_residual = 0.0;
  result.trace.push_back(rec0);
  result.best_iteration = 0;
  result.last_report = rep0;

  if (k_max == 1) {
    result.best = d0;
    result.converged = true;
    return result;
  }

  Vector prev = d0.probs;
  double best_obj = rec0.objective;
  Vector best_probs = d0.probs;
  for (int l = 1; l <= config.max_iterations; ++l) {
    QpProblem p = k1_problem(bundle);
    for (int k = 2; k <= k_max; ++k) {
      const Matrix mk = condition_tensor(bundle.tensors[static_cast<std::size_t>(k)], prev);
      p.hessian += bundle.traffic.weights[k] * (mk + mk.transpose());
    }
    const SolveReport rep = solve_weighted_quadratic(p, bundle, &prev, config);
    const Vector cur = rep.solution;
    IterationRecord rec;
    rec.probs = cur;
    rec.objective = truncated_blep(cur, bundle);
    rec.qp_status = rep.status;
    rec.step_residual = (cur - prev).cwiseAbs().maxCoeff();
    result.trace.push_back(rec);
    result.last_report = rep;
    if (rec.objective < best_obj) {
      best_obj = rec.objective;
      best_probs = cur;
      result.best_iteration = l;
    }
    if (rec.step_residual < config.convergence_tol) {
      result.converged = true;
      break;
    }
    prev = cur;
  }

  result.best.probs = best_probs;
  result.best.mean_constrained = true;
  result.best.validate();
  return result;
}

Vector tagged_cost_vector(const Vector& others, const ObjectiveBundle& bundle) {
  bundle.validate();
  require(others.size() == bundle.grid.q_count, "distribution length mismatch");
  Vector cost = Vector::Zero(bundle.grid.q_count);
  for (int k = 0; k <= bundle.traffic.k_max; ++k)
    cost += bundle.traffic.weights[k] *
            contract_to_tagged(bundle.tensors[static_cast<std::size_t>(k)], others);
  return cost;
}

double constrained_user_blep(const Vector& dist, const Vector& others,
                             const ObjectiveBundle& bundle) {
  require(dist.size() == bundle.grid.q_count, "distribution length mismatch");
  return tagged_cost_vector(others, bundle).dot(dist);
}

UserPowerConstraint max_power_cap(const PowerLevelGrid& grid, double gamma_max_db) {
  grid.validate();
  UserPowerConstraint c;
  c.reason = PowerConstraintReason::MaxPowerCap;
  for (Index q = 0; q < grid.q_count; ++q)
    if (grid.snr_db[q] <= gamma_max_db + 1e-12) c.allowed_levels.push_back(q);
  require(!c.allowed_levels.empty(), "power cap excludes every level");
  return c;
}

ConstrainedUserResult optimize_constrained_user_lp(const UserPowerConstraint& allowed,
                                                   const Vector& others,
                                                   const ObjectiveBundle& bundle,
                                                   MeanConstraintMode mode) {
  bundle.validate();
  require(!allowed.allowed_levels.empty(), "allowed level set must be nonempty");
  std::vector<Index> idx = allowed.allowed_levels;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  require(idx.front() >= 0 && idx.back() < bundle.grid.q_count, "allowed level index out of range");
  {
    LevelDistribution check;
    check.probs = others;
    check.validate();
  }

  const Vector cost = tagged_cost_vector(others, bundle);
  const Index na = static_cast<Index>(idx.size());
  Vector cost_sub(na), gamma_sub(na);
  for (Index k = 0; k < na; ++k) {
    cost_sub[k] = cost[idx[static_cast<std::size_t>(k)]];
    gamma_sub[k] = bundle.grid.snr_linear[idx[static_cast<std::size_t>(k)]];
  }

  const double gamma_bar = bundle.grid.target_mean_snr;
  bool impose = mode == MeanConstraintMode::ImposeWhenFeasible &&
                gamma_bar >= gamma_sub[0] && gamma_bar <= gamma_sub[na - 1];

  SolveReport rep;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Matrix a(impose ? 2 : 1, na);
    a.row(0).setOnes();
    if (impose) a.row(1) = gamma_sub.transpose();
    Vector b(impose ? 2 : 1);
    b[0] = 1.0;
    if (impose) b[1] = gamma_bar;
    rep = solve_lp(cost_sub, a, b);
    if (rep.status != SolveStatus::Infeasible || !impose) break;
    impose = false;  // restricted mean unreachable on the allowed levels
  }
  require(rep.status != SolveStatus::Infeasible, "allowed level set admits no distribution");

  ConstrainedUserResult out;
  out.mean_imposed = impose;
  out.tagged_cost = cost;
  out.dist.probs = Vector::Zero(bundle.grid.q_count);
  for (Index k = 0; k < na; ++k) out.dist.probs[idx[static_cast<std::size_t>(k)]] = rep.solution[k];
  out.dist.mean_constrained = impose;
  out.dist.validate();
  out.report = rep;
  out.report.solution = out.dist.probs;
  out.report.active_set.clear();
  for (Index i = 0; i < out.dist.probs.size(); ++i)
    if (out.dist.probs[i] == 0.0) out.report.active_set.push_back(i);
  return out;
}

LevelDistribution redistribute(const LevelDistribution& optimum, const UserPowerConstraint& allowed) {
  optimum.validate();
  require(!allowed.allowed_levels.empty(), "allowed level set must be nonempty");
  std::vector<Index> idx = allowed.allowed_levels;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  require(idx.front() >= 0 && idx.back() < optimum.size(), "allowed level index out of range");

  Vector probs = Vector::Zero(optimum.size());
  double kept = 0.0;
  for (const Index i : idx) {
    probs[i] = std::max(optimum.probs[i], 0.0);
    kept += probs[i];
  }
  if (kept > 0.0) {
    probs /= kept;
  } else {
    for (const Index i : idx) probs[i] = 1.0 / static_cast<double>(idx.size());
  }
  LevelDistribution out;
  out.probs = probs;
  out.mean_constrained = false;
  out.validate();
  return out;
}

}  // namespace noma
