#pragma once

#include <string>
#include <vector>

#include "pacing/fppe.hpp"
#include "pacing/lp.hpp"
#include "pacing/market.hpp"

namespace pacing {

// Buyer active during rounds [arrival, departure] (1-based, inclusive) with
// the same per-unit values for the m goods offered every round.
struct OnlineBuyer {
  double budget = 0.0;
  int arrival = 1;
  int departure = 1;
  Vector values;
};

class OnlineInstance {
 public:
  OnlineInstance(int horizon, int goods, std::vector<OnlineBuyer> buyers);

  int horizon() const { return horizon_; }
  int goods() const { return goods_; }
  int buyers() const { return static_cast<int>(buyers_.size()); }
  const OnlineBuyer& buyer(int i) const { return buyers_[i]; }
  const std::vector<OnlineBuyer>& all_buyers() const { return buyers_; }
  bool active(int i, int round) const {
    return buyers_[i].arrival <= round && round <= buyers_[i].departure;
  }

 private:
  int horizon_;
  int goods_;
  std::vector<OnlineBuyer> buyers_;
};

struct OnlineRound {
  int round = 0;
  std::vector<int> active;  // exactly the buyers handed to the FPPE solver
  Vector budgets;           // remaining budgets B^t at the start of the round
  FppeOutcome outcome;      // full n x m; rows outside `active` are zero
  double revenue = 0.0;
};

struct OnlineTrace;

// Reveals buyers round by round. A source may look at the history of
// earlier rounds (adaptive adversaries) but the simulator only learns a
// buyer when it is revealed.
class ArrivalSource {
 public:
  virtual ~ArrivalSource() = default;
  virtual int horizon() const = 0;
  virtual int goods() const = 0;
  // Upper bound on the number of buyers; ids are 0..max_buyers()-1.
  virtual int max_buyers() const = 0;
  // Buyers (id, data) whose arrival round is `round`.
  virtual std::vector<std::pair<int, OnlineBuyer>> reveal(
      int round, const OnlineTrace& history) = 0;
};

struct OnlineTrace {
  std::vector<OnlineRound> rounds;
  std::vector<bool> revealed;
  Vector initial_budgets;  // 0 for buyers never revealed
  Vector final_budgets;    // B^{T+1}
  double revenue = 0.0;
};

// Online mechanism: every round, an FPPE among the active buyers with their
// remaining budgets; spends are deducted and carried over.
OnlineTrace run_online_fppe(ArrivalSource& source,
                            const FppeOptions& options = {});
OnlineTrace run_online_fppe(const OnlineInstance& instance,
                            const FppeOptions& options = {});

// Offline benchmark: good j of round t becomes column (t-1)*m + j.
MarketInstance flatten_offline(const OnlineInstance& instance);

struct CompetitiveRatio {
  double online_revenue = 0.0;
  double offline_revenue = 0.0;
  double ratio = 1.0;
};

// Throws CertificateError when the ratio falls below 1/4.
CompetitiveRatio competitive_ratio(const OnlineInstance& instance,
                                   const FppeOptions& options = {});

struct IntermediateRound {
  Vector offline_spend;  // o_i^t
  Vector budgets;        // max(o_i^t, B_i^t) on active buyers, else 0
  FppeOutcome outcome;
};

std::vector<IntermediateRound> intermediate_solution(
    const OnlineInstance& instance, const OnlineTrace& trace,
    const Outcome& offline, const FppeOptions& options = {});

struct ComparisonReport {
  bool timewise_ok = true;
  bool buyerwise_ok = true;
  double timewise_margin = kInfinity;   // min over rounds of lhs - rhs
  double buyerwise_margin = kInfinity;  // min over buyers of lhs - rhs
  std::vector<std::string> violations;
};

ComparisonReport comparison_checks(const OnlineInstance& instance,
                                   const FppeOptions& options = {});

// Pacing multipliers after raising budgets by `increase` dominate the
// originals up to 10 * tol.
bool pacing_monotonicity_check(const MarketInstance& instance,
                               const Vector& increase,
                               const FppeOptions& options = {});

// The two-round adversary with one good per round: buyer 0 (B=1, v=1,
// round 1), buyer 1 (B=v=1+sqrt2, rounds 1-2) and buyer 2 (B=v=1+sqrt2,
// round 2) who shows up only if buyer 1 got less than half of round 1.
class AdversarialArrivals final : public ArrivalSource {
 public:
  int horizon() const override { return 2; }
  int goods() const override { return 1; }
  int max_buyers() const override { return 3; }
  std::vector<std::pair<int, OnlineBuyer>> reveal(
      int round, const OnlineTrace& history) override;

  bool arrival_triggered() const { return triggered_; }

 private:
  bool triggered_ = false;
};

struct AdversaryBranch {
  bool arrival = false;
  OnlineInstance instance;
  double best_online = 0.0;
  double offline = 0.0;
  double ratio = 0.0;
};

// Continuation after round 1 gave buyer 1 the given fraction of the good.
AdversaryBranch adversarial_instance(double round1_allocation_to_buyer2);

}  // namespace pacing
