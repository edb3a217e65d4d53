#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pacing/market.hpp"

namespace pacing {

// One max-violation entry per FPPE property: supply, budget, tight bids on
// allocated pairs, price = highest paced bid, full sale of priced goods,
// no unnecessary pacing.
using FppeResiduals = std::array<double, 6>;

double max_residual(const FppeResiduals& residuals);

struct FppeOutcome {
  Matrix x;
  Vector p;
  Vector alpha;
  Matrix b;  // b_ij = p_j x_ij
  double gap = 0.0;
  FppeResiduals residuals{};
  int iterations = 0;
};

enum class FppeStart { uniform, perturbed };

struct FppeOptions {
  double tol = kEquilibriumTol;
  FppeStart start = FppeStart::uniform;
  std::uint64_t seed = 0;
  int max_iterations = 400;
};

// Carries the best residuals reached (property or KKT residuals).
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals,
                   double gap)
      : std::runtime_error(what), residuals_(std::move(residuals)), gap_(gap) {}
  const std::vector<double>& residuals() const { return residuals_; }
  double gap() const { return gap_; }

 private:
  std::vector<double> residuals_;
  double gap_;
};

// Throws ConvergenceError unless every residual and the duality gap are
// within options.tol.
FppeOutcome solve_fppe(const MarketInstance& instance,
                       const FppeOptions& options = {});

FppeResiduals verify_fppe(const MarketInstance& instance,
                          const FppeOutcome& candidate,
                          double tol = kEquilibriumTol);

// Eisenberg-Gale dual minus primal objective at the candidate, with
// delta_i taken as the unspent budget of unpaced buyers.
double eg_duality_gap(const MarketInstance& instance,
                      const FppeOutcome& candidate);

Outcome to_outcome(const FppeOutcome& fppe);

// Shortfall of buyer i's bundle against the best bundle at prices p within
// its budget: max sum_j (v_ij - p_j) y_j s.t. p.y <= B_i, 0 <= y <= 1.
double utility_gap(const MarketInstance& instance, const Matrix& x,
                   const Vector& p, int buyer);

// Raised when a revenue bound fails; the message carries the instance.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FppeCertificate {
  double fppe_revenue = 0.0;
  double rmvup_revenue = 0.0;
  double ratio = 1.0;
  double liquid_welfare = 0.0;
};

// Asserts FPPE >= RMVUP / 2 and LW(FPPE allocation) = FPPE revenue.
FppeCertificate fppe_revenue_certificate(const MarketInstance& instance,
                                         double tol = kEquilibriumTol);

}  // namespace pacing
