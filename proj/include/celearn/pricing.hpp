#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "celearn/market.hpp"
#include "celearn/valuation.hpp"

namespace celearn {

enum class PriceObjective { MinSlack, MinRevenue, MaxRevenue };

std::string to_string(PriceObjective objective);
PriceObjective price_objective_from_string(const std::string& name);

// Linear prices supporting an allocation, with per-pair UM slack variables.
// total_slack == 0 (within tolerance) certifies an exact competitive
// equilibrium; revenue objectives re-optimize at the minimal slack.
struct PriceSolution {
  std::vector<double> prices;  // one per good; unallocated goods priced 0
  double total_slack = 0.0;
  std::vector<std::tuple<int, Bundle, double>> per_pair_slack;
  PriceObjective objective_used = PriceObjective::MinSlack;

  double revenue() const {
    double total = 0.0;
    for (double p : prices) total += p;
    return total;
  }
};

// Slack-minimizing linear prices for a welfare-maximizing allocation, via
// the relaxed UM constraint system over all deviation bundles (including
// the empty one). Dense markets capped at m <= 14.
PriceSolution linear_ce_prices(const Market& market, const Allocation& alloc,
                               PriceObjective objective);

// Same system specialized to unit-demand valuations: singleton and empty
// deviations only, which dominate every bundle deviation under nonnegative
// linear prices.
PriceSolution linear_ce_prices_unit_demand(const UnitDemandMatrix& matrix,
                                           const Allocation& alloc,
                                           PriceObjective objective);

struct PriceCheck {
  double max_excess = 0.0;       // worst UM violation beyond the pair's slack
  double slack_sum_error = 0.0;  // |total_slack - sum per_pair_slack|
  bool zero_price_ok = true;     // unallocated goods priced (near) zero
  bool ok = true;
};

PriceCheck verify_price_solution(const Market& market, const Allocation& alloc,
                                 const PriceSolution& solution);

}  // namespace celearn
