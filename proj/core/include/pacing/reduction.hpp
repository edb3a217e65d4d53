#pragma once

#include <array>
#include <string>
#include <vector>

#include "pacing/market.hpp"

namespace pacing {

// Element sets E1, E2, E3 and triplets S (indices into E1, E2, E3).
// Elements are numbered globally: E1 first, then E2, then E3.
class ThreeDTwoMatching {
 public:
  using Triplet = std::array<int, 3>;

  ThreeDTwoMatching(std::vector<std::string> e1, std::vector<std::string> e2,
                    std::vector<std::string> e3, std::vector<Triplet> triplets);

  const std::vector<std::string>& set(int k) const { return sets_[k]; }
  const std::vector<Triplet>& triplets() const { return triplets_; }
  int size() const { return static_cast<int>(triplets_.size()); }
  int elements() const;
  // Global element ids of triplet s.
  std::array<int, 3> members(int s) const;
  std::vector<int> degrees() const;
  // Every element lies in exactly two triplets.
  bool exactly_two() const;
  bool is_matching(const std::vector<int>& chosen) const;

 private:
  std::array<std::vector<std::string>, 3> sets_;
  std::vector<Triplet> triplets_;
};

// Element buyers (B = 1/3, value 1 on incident triplets) in global element
// order, then one special buyer per triplet (B = 2/3, value 2/3 on its own
// good). Goods are the triplets.
MarketInstance to_rmfup_instance(const ThreeDTwoMatching& tdm);

// Shape of a reduced market recognized from the numbers alone.
struct ReductionLayout {
  int elements = 0;
  int goods = 0;
  std::vector<std::array<int, 3>> incident;  // element buyers valuing each good
};

// Throws StructuralError when the market is not a reduced instance.
ReductionLayout recognize_reduction(const MarketInstance& market);

// The four rounding phases applied to a fixed-price solution: snap prices to
// {2/3, 1}, hand weak goods to special buyers, give each spending element
// buyer a third of one good, and hand partially sold goods to specials.
Outcome round_solution(const MarketInstance& market, const Outcome& solution);

// Empty when `rounded` is in normal form, otherwise the first defect found.
std::string normal_form_defect(const MarketInstance& market,
                               const Outcome& rounded);

// Goods priced 1; throws std::logic_error if two of them share an element.
std::vector<int> extract_matching(const MarketInstance& market,
                                  const Outcome& rounded);

// Maximum matching by exhaustive search; at most 20 triplets.
std::vector<int> brute_force_3d2m(const ThreeDTwoMatching& tdm);

struct TransferReport {
  int triplets = 0;
  int optimum_matching = 0;  // |M*|
  int extracted = 0;         // |M-hat|
  double optimum_revenue = 0.0;
  double identity_revenue = 0.0;  // (2/3)(m - |M*|) + |M*|
  double chosen_revenue = 0.0;
  double rounded_revenue = 0.0;
  double rho = 1.0;  // achieved revenue / optimum
  double bound = 1.0;  // 9 rho - 8
  bool identity_ok = false;
  bool transfer_ok = false;
  bool size_bound_ok = false;  // m <= 4 |M*|
};

// Enumerates prices in {2/3, 1}^m, picks the cheapest solution that still
// earns rho times the optimum, rounds it and compares the extracted matching
// to the brute-force optimum.
TransferReport approximation_transfer_check(const ThreeDTwoMatching& tdm,
                                            double rho);

}  // namespace pacing
