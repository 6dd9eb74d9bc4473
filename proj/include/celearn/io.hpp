#pragma once

#include <string>

#include "celearn/learning.hpp"
#include "celearn/market.hpp"
#include "celearn/valuation.hpp"

namespace celearn {

// Shortest decimal string that round-trips the double exactly. All file
// writers use this so outputs are byte-stable across runs and platforms.
std::string format_double(double x);

// Market JSON: { "buyers": n, "goods": m, "values": [ {"buyer", "bundle",
// "value"}, ... ] }. Buyers are 1-based in files, bundles are bitmasks.
// Unlisted pairs default to 0; the empty bundle must be absent or 0.
Market load_market(const std::string& path);
void save_market(const Market& market, const std::string& path);

// Outcome JSON: market header plus "allocation": [bitmask per buyer] and
// "prices": {"linear": [p_1..p_m]} or {"bundle": [{"buyer", "bundle",
// "price"}, ...]}.
Outcome load_outcome(const std::string& path);
void save_outcome(const Outcome& outcome, int num_goods,
                  const std::string& path);

// Unit-demand CSV: n rows of m comma-separated nonnegative reals.
UnitDemandMatrix load_unit_demand_csv(const std::string& path);
void save_unit_demand_csv(const UnitDemandMatrix& matrix,
                          const std::string& path);

// Estimate table CSV with header buyer,bundle,mean,radius,status,samples;
// buyers 1-based, status Active or Pruned, rows sorted by (buyer, bundle).
std::string estimates_csv(const EstimateTable& table);
void save_estimates_csv(const EstimateTable& table, const std::string& path);
EstimateTable load_estimates_csv(const std::string& path);

// LearnResult summary as a JSON object string (and file).
std::string learn_result_json(const LearnResult& result);
void save_learn_result(const LearnResult& result, const std::string& path);

}  // namespace celearn
