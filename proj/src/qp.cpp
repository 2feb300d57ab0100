#include "noma/qp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace noma {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::LocalOptimal: return "local-optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

void QpProblem::validate() const {
  const Index n = cost.size();
  require(n >= 1, "problem needs at least one variable");
  require(hessian.rows() == n && hessian.cols() == n, "hessian shape mismatch");
  const double h_scale = std::max(1.0, hessian.size() ? hessian.cwiseAbs().maxCoeff() : 0.0);
  require((hessian - hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * h_scale,
          "hessian must be symmetric");
  require(eq_matrix.rows() >= 1 && eq_matrix.rows() <= 2, "expected 1 or 2 equality rows");
  require(eq_matrix.cols() == n, "equality matrix shape mismatch");
  require(eq_rhs.size() == eq_matrix.rows(), "equality rhs length mismatch");
}

namespace {

constexpr double kBoundTol = 1e-12;

struct Basis {
  std::array<Index, 2> idx{{-1, -1}};
  Vector x;
};

// All basic solutions of {A x = b, x >= 0} with at most m positive entries.
std::vector<Basis> feasible_bases(const Matrix& A, const Vector& b) {
  const Index m = A.rows();
  const Index n = A.cols();
  const double a_scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  std::vector<Basis> out;
  if (m == 1) {
    for (Index i = 0; i < n; ++i) {
      if (std::abs(A(0, i)) <= 1e-14 * a_scale) continue;
      const double xi = b[0] / A(0, i);
      if (xi < -kBoundTol) continue;
      Basis bs;
      bs.idx = {{i, Index{-1}}};
      bs.x = Vector::Zero(n);
      bs.x[i] = std::max(xi, 0.0);
      out.push_back(std::move(bs));
    }
    return out;
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double det = A(0, i) * A(1, j) - A(0, j) * A(1, i);
      if (std::abs(det) <= 1e-12 * a_scale * a_scale) continue;
      const double xi = (b[0] * A(1, j) - b[1] * A(0, j)) / det;
      const double xj = (A(0, i) * b[1] - A(1, i) * b[0]) / det;
      if (xi < -kBoundTol || xj < -kBoundTol) continue;
      Basis bs;
      bs.idx = {{i, j}};
      bs.x = Vector::Zero(n);
      bs.x[i] = std::max(xi, 0.0);
      bs.x[j] = std::max(xj, 0.0);
      out.push_back(std::move(bs));
    }
  }
  return out;
}

Vector eq_multipliers_lsq(const Matrix& A, const Vector& g, const std::vector<Index>& support) {
  const Index m = A.rows();
  if (support.empty()) return Vector::Zero(m);
  Matrix aSt(static_cast<Index>(support.size()), m);
  Vector gS(static_cast<Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    aSt.row(static_cast<Index>(k)) = A.col(support[k]).transpose();
    gS[static_cast<Index>(k)] = g[support[k]];
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(aSt);
  return cod.solve(gS);
}

struct RunOutcome {
  Vector x;
  int iterations = 0;
  bool converged = false;
};

// Primal active-set iteration from a feasible start. Maintains A x = b and
// x >= 0 throughout; each step is either a Newton step on the free face, a
// normalized descent ray (zero or negative reduced curvature), a bound
// activation, or a most-negative-multiplier bound release.
RunOutcome run_active_set(const QpProblem& p, Vector x, int max_iter) {
  const Index n = p.cost.size();
  std::vector<char> active(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    if (x[i] <= kBoundTol) {
      x[i] = 0.0;
      active[static_cast<std::size_t>(i)] = 1;
    }
  }

  RunOutcome out;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::vector<Index> F;
    for (Index i = 0; i < n; ++i)
      if (!active[static_cast<std::size_t>(i)]) F.push_back(i);
    const Index nf = static_cast<Index>(F.size());
    const Vector g = p.hessian * x + p.cost;

    Vector dF;
    bool is_newton = false;
    Index rank = 0;
    Matrix aFt;
    if (nf > 0) {
      aFt.resize(nf, p.eq_matrix.rows());
      Vector gF(nf);
      Matrix hFF(nf, nf);
      for (Index a = 0; a < nf; ++a) {
        aFt.row(a) = p.eq_matrix.col(F[static_cast<std::size_t>(a)]).transpose();
        gF[a] = g[F[static_cast<std::size_t>(a)]];
        for (Index b = 0; b < nf; ++b)
          hFF(a, b) = p.hessian(F[static_cast<std::size_t>(a)], F[static_cast<std::size_t>(b)]);
      }
      Eigen::ColPivHouseholderQR<Matrix> qr(aFt);
      rank = qr.rank();
      const Index nz = nf - rank;
      dF = Vector::Zero(nf);
      if (nz > 0) {
        const Matrix qFull = qr.householderQ();
        const Matrix Z = qFull.rightCols(nz);
        const Vector gz = Z.transpose() * gF;
        const Matrix hz = Z.transpose() * hFF * Z;
        Eigen::SelfAdjointEigenSolver<Matrix> es(hz);
        const Vector& ev = es.eigenvalues();  // ascending
        const Matrix& V = es.eigenvectors();
        const double eps_curv = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
        const Vector a = V.transpose() * gz;
        Vector y = Vector::Zero(nz);
        for (Index t = 0; t < nz; ++t)
          if (ev[t] <= eps_curv) y -= a[t] * V.col(t);
        bool ray = false;
        if (y.cwiseAbs().maxCoeff() > 1e-11 * std::max(1.0, gz.cwiseAbs().maxCoeff())) {
          ray = true;  // gradient has weight on flat / concave directions
        } else if (ev[0] < -eps_curv) {
          y = (a[0] > 0.0 ? -1.0 : 1.0) * V.col(0);
          ray = true;
        } else {
          y.setZero();
          for (Index t = 0; t < nz; ++t)
            if (ev[t] > eps_curv) y -= (a[t] / ev[t]) * V.col(t);
          is_newton = true;
        }
        dF = Z * y;
        if (ray) {
          const double dmax = dF.cwiseAbs().maxCoeff();
          if (dmax > 0.0) dF /= dmax;
        }
      }
    }

    const double step_scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if (nf == 0 || dF.cwiseAbs().maxCoeff() <= 1e-12 * step_scale) {
      const Vector nu = eq_multipliers_lsq(p.eq_matrix, g, F);
      const Vector z = g - p.eq_matrix.transpose() * nu;
      const double eps_mult = 1e-9 * std::max(1.0, g.cwiseAbs().maxCoeff());
      Index drop = -1;
      double worst = -eps_mult;
      for (Index i = 0; i < n; ++i) {
        if (active[static_cast<std::size_t>(i)] && z[i] < worst) {
          worst = z[i];
          drop = i;
        }
      }
      if (drop < 0) {
        out.converged = true;
        break;
      }
      active[static_cast<std::size_t>(drop)] = 0;
      continue;
    }

    double alpha = is_newton ? 1.0 : std::numeric_limits<double>::infinity();
    Index blocker = -1;
    for (Index a = 0; a < nf; ++a) {
      if (dF[a] < -1e-14) {
        const double ratio = x[F[static_cast<std::size_t>(a)]] / (-dF[a]);
        if (ratio < alpha) {
          alpha = ratio;
          blocker = F[static_cast<std::size_t>(a)];
        }
      }
    }
    if (!is_newton && blocker < 0)
      throw std::invalid_argument("feasible set appears unbounded along a descent ray");
    if (std::isfinite(alpha) && alpha > 0.0)
      for (Index a = 0; a < nf; ++a) x[F[static_cast<std::size_t>(a)]] += alpha * dF[a];
    if (blocker >= 0) {
      x[blocker] = 0.0;
      active[static_cast<std::size_t>(blocker)] = 1;
    }
    for (Index i = 0; i < n; ++i)
      if (x[i] < 0.0 && x[i] >= -kBoundTol) x[i] = 0.0;
  }

  out.x = std::move(x);
  out.iterations = iter;
  return out;
}

// Null-space basis of the full equality system; empty when A spans R^n.
Matrix equality_null_basis(const Matrix& A) {
  Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
  const Index nz = A.cols() - qr.rank();
  if (nz == 0) return Matrix(A.cols(), 0);
  const Matrix qFull = qr.householderQ();
  return qFull.rightCols(nz);
}

bool convex_on_feasible_plane(const QpProblem& p) {
  const Matrix Z = equality_null_basis(p.eq_matrix);
  if (Z.cols() == 0) return true;
  const Matrix hz = Z.transpose() * p.hessian * Z;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hz);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues()[0] >= -1e-9 * scale;
}

// Cleanup plus KKT accounting shared by every exit path.
SolveReport finalize_report(const QpProblem& p, Vector x, int iterations) {
  SolveReport rep;
  double clamp = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 && x[i] >= -kBoundTol) {
      clamp += -x[i];
      x[i] = 0.0;
    }
  }
  std::vector<Index> support;
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] > 0.0) support.push_back(i);
  // Least-norm correction on the support restores the equality rows after
  // clamping (for the ones-row this is the uniform renormalization).
  if (clamp > 0.0 && !support.empty()) {
    const Vector resid = p.eq_rhs - p.eq_matrix * x;
    Matrix aS(p.eq_matrix.rows(), static_cast<Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) aS.col(static_cast<Index>(k)) = p.eq_matrix.col(support[k]);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(aS);
    const Vector delta = cod.solve(resid);
    for (std::size_t k = 0; k < support.size(); ++k) x[support[k]] += delta[static_cast<Index>(k)];
  }

  const Vector g = p.hessian * x + p.cost;
  const Vector nu = eq_multipliers_lsq(p.eq_matrix, g, support);
  const Vector z = g - p.eq_matrix.transpose() * nu;
  double stat = 0.0, dual = 0.0, comp = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0)
      stat = std::max(stat, std::abs(z[i]));
    else
      dual = std::max(dual, -z[i]);
    comp = std::max(comp, std::abs(x[i] * z[i]));
  }
  double prim = 0.0;
  const Vector resid = p.eq_matrix * x - p.eq_rhs;
  for (Index r = 0; r < resid.size(); ++r)
    prim = std::max(prim, std::abs(resid[r]) / std::max(1.0, std::abs(p.eq_rhs[r])));

  rep.solution = std::move(x);
  rep.objective = 0.5 * rep.solution.dot(p.hessian * rep.solution) + p.cost.dot(rep.solution);
  rep.kkt_residual = std::max({stat, std::max(0.0, dual), comp, prim});
  for (Index i = 0; i < rep.solution.size(); ++i)
    if (rep.solution[i] == 0.0) rep.active_set.push_back(i);
  rep.iterations = iterations;
  rep.clamp_correction = clamp;
  rep.eq_multipliers = nu;
  rep.bound_multipliers = z;
  return rep;
}

bool start_is_feasible(const QpProblem& p, const Vector& x) {
  if (x.size() != p.cost.size()) return false;
  if (x.minCoeff() < -kBoundTol) return false;
  const Vector resid = p.eq_matrix * x - p.eq_rhs;
  for (Index r = 0; r < resid.size(); ++r)
    if (std::abs(resid[r]) > 1e-8 * std::max(1.0, std::abs(p.eq_rhs[r]))) return false;
  return true;
}

SolveReport solve_qp_impl(const QpProblem& p, const Vector* start, const QpOptions& opt) {
  p.validate();
  require(opt.max_iterations >= 1, "max_iterations must be positive");
  const Index n = p.cost.size();

  std::vector<Vector> starts;
  if (start != nullptr) {
    require(start_is_feasible(p, *start), "provided start violates the constraints");
    Vector s = *start;
    for (Index i = 0; i < n; ++i) s[i] = std::max(s[i], 0.0);
    starts.push_back(std::move(s));
  }

  const std::vector<Basis> bases = feasible_bases(p.eq_matrix, p.eq_rhs);
  const Vector uniform = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const bool uniform_ok = start_is_feasible(p, uniform);
  if (bases.empty() && !uniform_ok && starts.empty()) {
    SolveReport rep;
    rep.status = SolveStatus::Infeasible;
    return rep;
  }

  const bool convex = convex_on_feasible_plane(p);
  auto add_start = [&starts](const Vector& s) {
    for (const Vector& kept : starts)
      if ((kept - s).cwiseAbs().maxCoeff() <= 1e-10) return;
    starts.push_back(s);
  };
  if (starts.empty()) {
    if (!bases.empty())
      starts.push_back(bases.front().x);
    else
      starts.push_back(uniform);
  }
  if (!convex) {
    const std::size_t cap = static_cast<std::size_t>(std::max(1, opt.multi_starts));
    if (uniform_ok) add_start(uniform);
    for (const Basis& bs : bases) {
      if (starts.size() >= cap) break;
      add_start(bs.x);
    }
  }

  bool have_best = false;
  SolveReport best;
  bool best_converged = false;
  for (const Vector& s : starts) {
    const RunOutcome run = run_active_set(p, s, opt.max_iterations);
    SolveReport rep = finalize_report(p, run.x, run.iterations);
    if (!have_best || rep.objective < best.objective ||
        (rep.objective == best.objective && run.converged && !best_converged)) {
      have_best = true;
      best = std::move(rep);
      best_converged = run.converged;
    }
  }
  best.status = !best_converged ? SolveStatus::IterationLimit
                                : (convex ? SolveStatus::Optimal : SolveStatus::LocalOptimal);
  return best;
}

}  // namespace

SolveReport solve_qp(const QpProblem& problem, const QpOptions& options) {
  return solve_qp_impl(problem, nullptr, options);
}

SolveReport solve_qp(const QpProblem& problem, const Vector& start, const QpOptions& options) {
  return solve_qp_impl(problem, &start, options);
}

SolveReport solve_lp(const Vector& cost, const Matrix& eq_matrix, const Vector& eq_rhs) {
  QpProblem shape;
  shape.hessian = Matrix::Zero(cost.size(), cost.size());
  shape.cost = cost;
  shape.eq_matrix = eq_matrix;
  shape.eq_rhs = eq_rhs;
  shape.validate();

  const std::vector<Basis> bases = feasible_bases(eq_matrix, eq_rhs);
  SolveReport rep;
  if (bases.empty()) {
    rep.status = SolveStatus::Infeasible;
    return rep;
  }

  std::size_t win = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < bases.size(); ++k) {
    const double v = cost.dot(bases[k].x);
    if (v < best_val) {
      best_val = v;
      win = k;
    }
  }
  const Vector& x = bases[win].x;

  // Certify with the best dual among all bases that reproduce the winner
  // (degenerate vertices admit several).
  double best_res = std::numeric_limits<double>::infinity();
  Vector best_nu, best_z;
  for (const Basis& bs : bases) {
    if ((bs.x - x).cwiseAbs().maxCoeff() > 1e-10) continue;
    const Index m = eq_matrix.rows();
    Matrix aBt(m, m);
    Vector cB(m);
    for (Index r = 0; r < m; ++r) {
      const Index col = bs.idx[static_cast<std::size_t>(r)];
      aBt.row(r) = eq_matrix.col(col).transpose();
      cB[r] = cost[col];
    }
    const Vector nu = aBt.fullPivLu().solve(cB);
    const Vector z = cost - eq_matrix.transpose() * nu;
    const double res = std::max(0.0, -z.minCoeff());
    if (res < best_res) {
      best_res = res;
      best_nu = nu;
      best_z = z;
    }
  }

  double prim = 0.0;
  const Vector resid = eq_matrix * x - eq_rhs;
  for (Index r = 0; r < resid.size(); ++r)
    prim = std::max(prim, std::abs(resid[r]) / std::max(1.0, std::abs(eq_rhs[r])));

  rep.solution = x;
  rep.objective = best_val;
  rep.status = SolveStatus::Optimal;
  rep.kkt_residual = std::max(std::isfinite(best_res) ? best_res : 0.0, prim);
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] == 0.0) rep.active_set.push_back(i);
  rep.iterations = static_cast<int>(bases.size());
  rep.eq_multipliers = best_nu;
  rep.bound_multipliers = best_z;
  return rep;
}

BruteForceResult brute_force_simplex_search(const std::function<double(const Vector&)>& objective,
                                            const Vector& gamma, double gamma_bar,
                                            const BruteForceOptions& options) {
  const Index n = gamma.size();
  require(n >= 1 && n <= 5, "brute force is guarded to at most 5 levels");
  require(options.step >= 1e-3 && options.step <= 0.5, "step must lie in [1e-3, 0.5]");
  const long long N = std::llround(1.0 / options.step);
  require(std::abs(static_cast<double>(N) * options.step - 1.0) <= 1e-9,
          "step must divide 1 into a whole number of increments");
  // Any ordering works; the exact completion below only needs the last two
  // levels to differ, and distinctness overall keeps the instance
  // non-degenerate.
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      require(gamma[i] != gamma[j], "levels must be pairwise distinct");

  require(n >= 2 || !options.impose_mean, "mean completion needs at least two levels");

  const double h = options.step;
  const int free_coords = static_cast<int>(n) - (options.impose_mean ? 2 : 1);
  double work = 1.0;
  for (int i = 0; i < free_coords; ++i) work *= static_cast<double>(N + 1);
  if (work > 2e8) throw ResourceLimitError("brute force enumeration too large");

  BruteForceResult result;
  bool found = false;
  std::vector<long long> counts(static_cast<std::size_t>(n), 0);
  Vector x(n);

  auto consider_x = [&]() {
    const double v = objective(x);
    ++result.evaluated;
    if (!found || v < result.objective) {
      found = true;
      result.objective = v;
      result.solution = x;
    }
  };
  auto consider_counts = [&]() {
    for (Index i = 0; i < n; ++i)
      x[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) * h;
    consider_x();
  };

  if (n == 1) {
    counts[0] = N;
    consider_counts();
  } else if (!options.impose_mean) {
    // Enumerate the first n-1 counts; the last is the remainder.
    std::function<void(Index, long long)> recurse = [&](Index coord, long long left) {
      if (coord == n - 1) {
        counts[static_cast<std::size_t>(coord)] = left;
        consider_counts();
        return;
      }
      for (long long c = 0; c <= left; ++c) {
        counts[static_cast<std::size_t>(coord)] = c;
        recurse(coord + 1, left - c);
      }
    };
    recurse(0, N);
  } else {
    // Enumerate the first n-2 coordinates on the h-grid; C1 + C2 then pin
    // the last two exactly (the levels are distinct), so every evaluated
    // point is feasible and the resolution along the free directions is h.
    const double ga = gamma[n - 2];
    const double gb = gamma[n - 1];
    std::function<void(Index, long long, double)> recurse = [&](Index coord, long long left,
                                                                double weight) {
      if (coord == n - 2) {
        const double r = static_cast<double>(left) * h;  // mass left for the pair
        const double s = gamma_bar - weight;             // mean left for the pair
        const double pb = (s - ga * r) / (gb - ga);
        const double pa = r - pb;
        if (pa < -1e-12 || pb < -1e-12) return;
        for (Index i = 0; i + 2 < n; ++i)
          x[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) * h;
        x[n - 2] = std::max(pa, 0.0);
        x[n - 1] = std::max(pb, 0.0);
        consider_x();
        return;
      }
      for (long long c = 0; c <= left; ++c) {
        counts[static_cast<std::size_t>(coord)] = c;
        recurse(coord + 1, left - c, weight + static_cast<double>(c) * h * gamma[coord]);
      }
    };
    recurse(0, N, 0.0);
  }

  require(found, "no grid point satisfies the constraints at this step size");
  return result;
}

BruteForceResult brute_force_simplex_search(const std::function<double(const Vector&)>& objective,
                                            const PowerLevelGrid& grid, double step) {
  grid.validate();
  BruteForceOptions options;
  options.step = step;
  return brute_force_simplex_search(objective, grid.snr_linear, grid.target_mean_snr, options);
}

}  // namespace noma
