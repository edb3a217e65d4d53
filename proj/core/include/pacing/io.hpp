#pragma once

#include <string>

#include "pacing/concave.hpp"
#include "pacing/fppe.hpp"
#include "pacing/market.hpp"
#include "pacing/online.hpp"
#include "pacing/reduction.hpp"

namespace pacing {

// Malformed file contents (bad JSON, missing or mistyped fields).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// {"budgets":[...],"values":[[...],...]}
MarketInstance parse_instance(const std::string& json);
std::string dump_instance(const MarketInstance& instance);

// {"x":[[...]],"b":[[...]],"p":[...]} with "p" optional.
Outcome parse_outcome(const std::string& json);
std::string dump_outcome(const Outcome& outcome);

// Outcome fields plus "alpha", "gap" and "residuals".
std::string dump_fppe(const FppeOutcome& fppe);
FppeOutcome parse_fppe(const std::string& json);

// Instance fields plus "T" and "interval":[[s,t],...] (one per buyer).
OnlineInstance parse_online_instance(const std::string& json);
std::string dump_online_instance(const OnlineInstance& instance);

// One row per (round, active buyer, good): round,buyer,good,x,p,spend.
std::string trace_csv(const OnlineTrace& trace);

// {"E1":[names],"E2":[...],"E3":[...],"S":[[a,b,c],...]} by element name.
ThreeDTwoMatching parse_3d2m(const std::string& json);
std::string dump_3d2m(const ThreeDTwoMatching& tdm);

// Instance layout where each value is a number (linear) or a descriptor
// {"kind":"linear","c"}, {"kind":"shifted_power","c","s","a"},
// {"kind":"pwl","points":[[x,y],...]}.
ConcaveMarket parse_concave_market(const std::string& json);
std::string dump_concave_market(const ConcaveMarket& market);

}  // namespace pacing
