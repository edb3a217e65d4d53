#pragma once

#include "pacing/market.hpp"

namespace pacing {

// Smooth concave objective with an open domain (e.g. log terms).
class ConcaveObjective {
 public:
  virtual ~ConcaveObjective() = default;
  virtual bool in_domain(const Vector& z) const = 0;
  virtual double value(const Vector& z) const = 0;
  // Gradient and (negative semidefinite) Hessian at z.
  virtual void derivatives(const Vector& z, Vector& gradient,
                           Matrix& hessian) const = 0;
};

struct InteriorPointOptions {
  int max_iterations = 300;
  double complementarity_tol = 1e-14;
  double stationarity_tol = 1e-11;
};

struct InteriorPointResult {
  Vector z;
  Vector multipliers;  // one per row of A, >= 0
  Vector slacks;       // b - A z, > 0
  int iterations = 0;
  bool converged = false;
  double complementarity = 0.0;  // mean s_k * lambda_k
  double stationarity = 0.0;     // |grad f - A^T lambda|_inf
};

// Primal-dual interior-point method for
//   maximize f(z)  subject to  A z <= b,
// started from a strictly feasible z0. Newton steps on the perturbed KKT
// system with fraction-to-boundary and backtracking on the KKT residual.
InteriorPointResult maximize_concave(const ConcaveObjective& objective,
                                     const Matrix& A, const Vector& b,
                                     const Vector& z0,
                                     const InteriorPointOptions& options = {});

}  // namespace pacing
