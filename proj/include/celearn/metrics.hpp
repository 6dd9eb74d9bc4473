#pragma once

#include <cstdint>
#include <vector>

#include "celearn/market.hpp"
#include "celearn/valuation.hpp"

namespace celearn {

// Shortfall of buyer i's utility at the outcome against their best response
// under the same prices, clamped below at 0. Enumerates all bundles.
double um_loss_buyer(const Market& market, const Outcome& outcome, int buyer);

std::vector<double> um_loss_per_buyer(const Market& market,
                                      const Outcome& outcome);

// Worst per-buyer loss; 0 iff the outcome is utility maximizing.
double um_loss(const Market& market, const Outcome& outcome);

// Unit-demand fast path under linear prices: the best response utility is
// max(0, max_j v_ij - p_j), so no bundle enumeration is needed.
std::vector<double> um_loss_unit_demand(const UnitDemandMatrix& matrix,
                                        const Allocation& allocation,
                                        const std::vector<double>& prices);

// Fraction of EA's draws that EAP avoided: 1 - eap / ea. Negative when
// pruning never paid for the early rounds.
double sample_efficiency(std::int64_t ea_samples, std::int64_t eap_samples);

struct EvalReport {
  std::vector<double> um_loss_per_buyer;
  double um_loss_market = 0.0;
  std::int64_t ea_samples = 0;
  std::int64_t eap_samples = 0;
  double savings_fraction = 0.0;
  double eps_target = 0.0;
  double eps_achieved = 0.0;
};

// Loss-only report; the sample accounting fields stay at their defaults.
EvalReport evaluate_outcome(const Market& market, const Outcome& outcome);

}  // namespace celearn
