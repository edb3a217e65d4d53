#include <gtest/gtest.h>

#include <Eigen/LU>

#include <functional>
#include <random>

#include "pacing/lp.hpp"

namespace pacing {
namespace {

TEST(LinearProgram, TextbookOptimum) {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18.
  LinearProgram lp(2);
  lp.set_objective(0, 3);
  lp.set_objective(1, 5);
  lp.add_constraint(SparseRow{{0, 1.0}}, Relation::less_equal, 4);
  lp.add_constraint(SparseRow{{1, 2.0}}, Relation::less_equal, 12);
  lp.add_constraint(SparseRow{{0, 3.0}, {1, 2.0}}, Relation::less_equal, 18);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective, 36.0, 1e-9);
  EXPECT_NEAR(s.values(0), 2.0, 1e-9);
  EXPECT_NEAR(s.values(1), 6.0, 1e-9);
}

TEST(LinearProgram, EqualityGreaterEqualAndShiftedBounds) {
  // max -x - y  s.t. x + y = 3, x - y >= -1, 0.5 <= x <= 2, y free.
  LinearProgram lp(2);
  lp.set_objective(0, -1);
  lp.set_objective(1, -1);
  lp.set_bounds(0, 0.5, 2.0);
  lp.set_bounds(1, -kInfinity, kInfinity);
  lp.add_constraint(SparseRow{{0, 1.0}, {1, 1.0}}, Relation::equal, 3);
  lp.add_constraint(SparseRow{{0, 1.0}, {1, -1.0}}, Relation::greater_equal, -1);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective, -3.0, 1e-9);
  EXPECT_LE(lp.max_violation(s.values), 1e-9);
  EXPECT_GE(s.values(0), 1.0 - 1e-9);
}

TEST(LinearProgram, DetectsInfeasibility) {
  LinearProgram lp(2);
  lp.set_bounds(0, 0, 1);
  lp.set_bounds(1, 0, 1);
  lp.add_constraint(SparseRow{{0, 1.0}, {1, 1.0}}, Relation::greater_equal, 3);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::infeasible);
}

TEST(LinearProgram, DetectsUnboundedness) {
  LinearProgram lp(2);
  lp.set_objective(0, 1);
  lp.add_constraint(SparseRow{{0, 1.0}, {1, -1.0}}, Relation::less_equal, 1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::unbounded);
}

TEST(LinearProgram, RejectsBadInput) {
  EXPECT_THROW(LinearProgram(0), StructuralError);
  LinearProgram lp(2);
  EXPECT_THROW(lp.set_bounds(0, 2, 1), StructuralError);
  EXPECT_THROW(lp.add_constraint(SparseRow{{5, 1.0}}, Relation::equal, 0), StructuralError);
  EXPECT_THROW(lp.add_constraint(Vector::Ones(3), Relation::equal, 0), StructuralError);
  EXPECT_THROW(lp.add_constraint(SparseRow{{0, 1.0}}, Relation::equal, kInfinity),
               StructuralError);
}

TEST(LinearProgram, DegenerateVertexTerminates) {
  // Many constraints through the optimum (1, 1).
  LinearProgram lp(2);
  lp.set_objective(0, 1);
  lp.set_objective(1, 1);
  for (int k = 1; k <= 6; ++k) {
    lp.add_constraint(SparseRow{{0, static_cast<double>(k)}, {1, 1.0}},
                      Relation::less_equal, k + 1.0);
    lp.add_constraint(SparseRow{{0, 1.0}, {1, static_cast<double>(k)}},
                      Relation::less_equal, k + 1.0);
  }
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective, 2.0, 1e-9);
}

// Optimum of max c.x s.t. A x <= b, 0 <= x <= 1 by enumerating every vertex.
double vertex_oracle(const Matrix& A, const Vector& b, const Vector& c) {
  const int n = static_cast<int>(c.size());
  Matrix G(A.rows() + 2 * n, n);
  Vector h(A.rows() + 2 * n);
  G << A, -Matrix::Identity(n, n), Matrix::Identity(n, n);
  h << b, Vector::Zero(n), Vector::Ones(n);
  const int rows = static_cast<int>(G.rows());
  double best = -kInfinity;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Matrix M(n, n);
      Vector r(n);
      for (int k = 0; k < n; ++k) {
        M.row(k) = G.row(pick[k]);
        r(k) = h(pick[k]);
      }
      Eigen::FullPivLU<Matrix> lu(M);
      if (!lu.isInvertible()) return;
      const Vector x = lu.solve(r);
      if (((G * x - h).array() <= 1e-9).all()) best = std::max(best, c.dot(x));
      return;
    }
    for (int k = start; k < rows; ++k) {
      pick[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

TEST(LinearProgram, MatchesVertexEnumerationOnRandomPrograms) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> rhs(0.1, 1.5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 1 + trial % 4;
    Matrix A(m, n);
    Vector b(m), c(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = coef(rng);
      b(i) = rhs(rng);
    }
    for (int j = 0; j < n; ++j) c(j) = coef(rng);
    LinearProgram lp(n);
    for (int j = 0; j < n; ++j) {
      lp.set_objective(j, c(j));
      lp.set_bounds(j, 0.0, 1.0);
    }
    for (int i = 0; i < m; ++i) lp.add_constraint(Vector(A.row(i).transpose()),
                                                  Relation::less_equal, b(i));
    const LpSolution s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, vertex_oracle(A, b, c), 1e-8) << "trial " << trial;
    EXPECT_LE(lp.max_violation(s.values), 1e-9);
  }
}

}  // namespace
}  // namespace pacing
