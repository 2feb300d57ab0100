#pragma once

#include <utility>
#include <vector>

#include "noma/objective.hpp"
#include "noma/qp.hpp"

namespace noma {

struct OptimizerConfig {
  double convergence_tol = 1e-8;  // max-norm change between iterates
  int max_iterations = 50;
  QpOptions qp;
};

struct IterationRecord {
  Vector probs;
  double objective = 0.0;  // true truncated objective at this iterate
  SolveStatus qp_status = SolveStatus::Optimal;
  double step_residual = 0.0;  // max-norm change from the previous iterate
};

using IterationTrace = std::vector<IterationRecord>;

struct IterativeResult {
  LevelDistribution best;
  int best_iteration = 0;
  bool converged = false;
  IterationTrace trace;
  SolveReport last_report;
};

enum class PowerConstraintReason { MaxPowerCap, MinPowerFloor };

/// Levels a terminal may use, e.g. because its transmit power is capped.
struct UserPowerConstraint {
  std::vector<Index> allowed_levels;
  PowerConstraintReason reason = PowerConstraintReason::MaxPowerCap;
};

/// Levels whose received SNR stays at or below gamma_max_db.
UserPowerConstraint max_power_cap(const PowerLevelGrid& grid, double gamma_max_db);

/// K = 1 optimization: the truncated objective is an exact quadratic in the
/// distribution, solved over the constrained simplex. When the uniform
/// point is feasible the solve starts there, so the returned objective
/// never exceeds the uniform objective. Uses the order-1 and order-2
/// tensors only.
std::pair<LevelDistribution, SolveReport> optimize_k1(const ObjectiveBundle& bundle,
                                                      const OptimizerConfig& config = {});

/// K >= 2 successive approximation: iteration 0 solves the K = 1 quadratic;
/// iteration l >= 1 conditions every order >= 3 tensor on the previous
/// iterate, rebuilds the Poisson-weighted quadratic, and re-solves. Stops
/// when successive iterates agree within convergence_tol. Returns the
/// iterate with the best true truncated objective (earliest on ties), so
/// the result is never worse than iteration 0.
IterativeResult optimize_iterative(const ObjectiveBundle& bundle,
                                   const OptimizerConfig& config = {});

enum class MeanConstraintMode { ImposeWhenFeasible, Drop };

struct ConstrainedUserResult {
  LevelDistribution dist;
  bool mean_imposed = false;
  Vector tagged_cost;  // tagged truncated BLEP per own level, others fixed
  SolveReport report;
};

/// Per-level truncated BLEP of the tagged user when every other user draws
/// from `others`: cost[q] is the tagged objective if the tagged user sits
/// deterministically at level q.
Vector tagged_cost_vector(const Vector& others, const ObjectiveBundle& bundle);

double constrained_user_blep(const Vector& dist, const Vector& others,
                             const ObjectiveBundle& bundle);

/// Best selection distribution for one user restricted to the `allowed`
/// level indices while the rest of the population draws from `others`. The
/// tagged objective is linear in the tagged user's own distribution, so
/// this is an LP over the allowed sub-simplex. The restricted mean
/// constraint is imposed when the target mean is representable on the
/// allowed levels (and the mode allows it); otherwise it is dropped and
/// `mean_imposed` reports that.
ConstrainedUserResult optimize_constrained_user_lp(
    const UserPowerConstraint& allowed, const Vector& others, const ObjectiveBundle& bundle,
    MeanConstraintMode mode = MeanConstraintMode::ImposeWhenFeasible);

/// Heuristic alternative: zero the excluded levels of `optimum` and scale
/// the rest back to sum 1 (uniform over `allowed` when nothing remains).
LevelDistribution redistribute(const LevelDistribution& optimum, const UserPowerConstraint& allowed);

}  // namespace noma
