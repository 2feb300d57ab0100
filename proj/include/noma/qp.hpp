#pragma once

#include <functional>
#include <string>
#include <vector>

#include "noma/scenario.hpp"
#include "noma/types.hpp"

namespace noma {

enum class SolveStatus { Optimal, LocalOptimal, Infeasible, IterationLimit };

std::string to_string(SolveStatus status);

/// min 0.5 x' H x + c' x  subject to  A x = b, x >= 0. H may be indefinite;
/// the feasible set must be bounded (the probability-simplex slices used
/// here always are).
struct QpProblem {
  Matrix hessian;    // symmetric
  Vector cost;
  Matrix eq_matrix;  // m x n, m in {1, 2}
  Vector eq_rhs;

  void validate() const;
};

struct SolveReport {
  Vector solution;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Infeasible;
  double kkt_residual = 0.0;   // max of stationarity, dual feasibility,
                               // complementarity, scaled primal residual
  std::vector<Index> active_set;  // coordinates held at the zero bound
  int iterations = 0;
  double clamp_correction = 0.0;  // negative mass clamped on exit
  Vector eq_multipliers;
  Vector bound_multipliers;
};

struct QpOptions {
  int max_iterations = 500;
  int multi_starts = 8;  // deterministic restarts used when H is indefinite
};

/// Primal active-set solve. Convex instances (H positive semidefinite on
/// the equality null space) end Optimal; indefinite instances end
/// LocalOptimal with the best of the deterministic multi-start runs
/// (feasible-polytope vertices plus the uniform point). Fully deterministic.
SolveReport solve_qp(const QpProblem& problem, const QpOptions& options = {});
SolveReport solve_qp(const QpProblem& problem, const Vector& start, const QpOptions& options = {});

/// min c' x subject to A x = b, x >= 0 by enumerating basic solutions
/// (m <= 2 equality rows). Global; ties resolve to the lexicographically
/// smallest basis.
SolveReport solve_lp(const Vector& cost, const Matrix& eq_matrix, const Vector& eq_rhs);

struct BruteForceOptions {
  double step = 0.01;       // probability granularity h; >= 1e-3
  bool impose_mean = true;  // keep the mean-SNR row (satisfied exactly)
};

struct BruteForceResult {
  Vector solution;
  double objective = 0.0;
  long long evaluated = 0;
};

/// Exhaustive oracle over the feasible set at resolution h: all but the
/// last two coordinates run over multiples of h, and C1 plus the mean row
/// pin those two exactly, so every evaluated point is feasible. Without the
/// mean row, all entries are multiples of h summing to 1. Ties keep the
/// first point in lexicographic enumeration order. Guarded to Q <= 5.
BruteForceResult brute_force_simplex_search(const std::function<double(const Vector&)>& objective,
                                            const Vector& gamma, double gamma_bar,
                                            const BruteForceOptions& options = {});

/// Same search over a power-level grid: gamma and the mean target come from
/// the grid, step sets the granularity.
BruteForceResult brute_force_simplex_search(const std::function<double(const Vector&)>& objective,
                                            const PowerLevelGrid& grid, double step);

}  // namespace noma
