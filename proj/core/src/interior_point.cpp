#include "pacing/interior_point.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pacing {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr double kFractionToBoundary = 0.995;
constexpr double kArmijo = 1e-4;

double max_step(const Vector& v, const Vector& dv) {
  double step = 1.0;
  for (int k = 0; k < v.size(); ++k) {
    if (dv(k) < 0.0) step = std::min(step, -kFractionToBoundary * v(k) / dv(k));
  }
  return step;
}

}  // namespace

InteriorPointResult maximize_concave(const ConcaveObjective& objective,
                                     const Matrix& A, const Vector& b,
                                     const Vector& z0,
                                     const InteriorPointOptions& options) {
  const int nz = static_cast<int>(z0.size());
  const int mc = static_cast<int>(A.rows());
  if (A.cols() != nz || b.size() != mc) {
    throw StructuralError("interior point: constraint dimensions mismatch");
  }
  if (!objective.in_domain(z0)) {
    throw StructuralError("interior point: start outside the objective domain");
  }

  InteriorPointResult result;
  Vector z = z0;
  Vector s = b - A * z;
  if (mc > 0 && s.minCoeff() <= 0.0) {
    throw StructuralError("interior point: start is not strictly feasible");
  }
  Vector lambda = (0.1 * s.cwiseInverse()).eval();
  const SparseMatrix As = A.sparseView();
  SparseMatrix ridge(nz, nz);
  ridge.setIdentity();
  ridge *= 1e-14;
  Eigen::SimplicialLDLT<SparseMatrix> sparse_solver;

  Vector g(nz);
  Matrix H(nz, nz);
  objective.derivatives(z, g, H);

  auto merit = [&](const Vector& grad, const Vector& sl, const Vector& lm,
                   double mu) {
    const Vector rd = grad - As.transpose() * lm;
    const Vector rc = lm.cwiseProduct(sl).array() - mu;
    return rd.squaredNorm() + rc.squaredNorm();
  };

  double sigma = 0.1;
  double best_comp = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector rd = g - As.transpose() * lambda;
    const double comp = mc > 0 ? s.dot(lambda) / mc : 0.0;
    const double stat = rd.lpNorm<Eigen::Infinity>();
    result.iterations = it;
    result.complementarity = comp;
    result.stationarity = stat;
    const double gscale = 1.0 + g.lpNorm<Eigen::Infinity>();
    if (comp <= options.complementarity_tol &&
        stat <= options.stationarity_tol * gscale) {
      result.converged = true;
      break;
    }
    // Degenerate problems stall near the round-off floor.
    if (comp < 0.9 * best_comp) {
      best_comp = comp;
      stalled = 0;
    } else if (++stalled >= 10 && comp <= 1e3 * options.complementarity_tol) {
      break;
    }

    const double mu = sigma * comp;
    const Vector rc = (mu - lambda.cwiseProduct(s).array()).matrix();
    const Vector d = lambda.cwiseQuotient(s);
    const SparseMatrix M =
        SparseMatrix(-H.sparseView()) + SparseMatrix(As.transpose() * d.asDiagonal() * As) + ridge;
    const Vector rhs = rd - As.transpose() * rc.cwiseQuotient(s);
    sparse_solver.compute(M);
    Vector dz;
    if (sparse_solver.info() == Eigen::Success) dz = sparse_solver.solve(rhs);
    if (sparse_solver.info() != Eigen::Success || !dz.allFinite()) {
      dz = Matrix(M).ldlt().solve(rhs);
    }
    const Vector ds = -As * dz;
    const Vector dlambda = (rc - lambda.cwiseProduct(ds)).cwiseQuotient(s);

    double step = std::min(max_step(s, ds), max_step(lambda, dlambda));
    const double old_merit = merit(g, s, lambda, mu);
    Vector z_new, s_new, lambda_new, g_new(nz);
    Matrix H_new(nz, nz);
    for (;;) {
      z_new = z + step * dz;
      s_new = s + step * ds;
      lambda_new = lambda + step * dlambda;
      if (objective.in_domain(z_new)) {
        objective.derivatives(z_new, g_new, H_new);
        if (merit(g_new, s_new, lambda_new, mu) <=
                (1.0 - kArmijo * step) * old_merit ||
            step < 1e-10) {
          break;
        }
      } else if (step < 1e-12) {
        // Cannot make progress without leaving the domain.
        z_new = z;
        s_new = s;
        lambda_new = lambda;
        g_new = g;
        H_new = H;
        break;
      }
      step *= 0.5;
    }
    z = std::move(z_new);
    s = std::move(s_new);
    lambda = std::move(lambda_new);
    g = std::move(g_new);
    H = std::move(H_new);
    sigma = step > 0.9 ? 0.05 : (step > 0.3 ? 0.2 : 0.5);
    result.iterations = it + 1;
  }

  // Recompute the final residuals when the loop ran out of iterations.
  if (!result.converged) {
    const Vector rd = g - As.transpose() * lambda;
    result.complementarity = mc > 0 ? s.dot(lambda) / mc : 0.0;
    result.stationarity = rd.lpNorm<Eigen::Infinity>();
  }
  result.z = std::move(z);
  result.slacks = std::move(s);
  result.multipliers = std::move(lambda);
  return result;
}

}  // namespace pacing
