#include "celearn/metrics.hpp"

#include <algorithm>

namespace celearn {

namespace {

void check_outcome(const Market& market, const Outcome& outcome) {
  if (static_cast<int>(outcome.allocation.size()) != market.buyers())
    throw DimensionMismatch("allocation size does not match buyer count");
  if (outcome.pricing.goods() != market.goods())
    throw DimensionMismatch("pricing good count does not match the market");
  if (!is_feasible(outcome.allocation))
    throw InfeasibleAllocation("allocation bundles overlap");
}

}  // namespace

double um_loss_buyer(const Market& market, const Outcome& outcome, int buyer) {
  check_outcome(market, outcome);
  if (buyer < 0 || buyer >= market.buyers())
    throw DimensionMismatch("buyer index out of range");
  const Bundle held = outcome.allocation[buyer];
  const double attained =
      market.value(buyer, held) - outcome.pricing.price(buyer, held);
  double best = 0.0;  // the empty bundle costs nothing
  for (Bundle s = 1; s <= market.full_bundle(); ++s)
    best = std::max(best,
                    market.value(buyer, s) - outcome.pricing.price(buyer, s));
  return std::max(0.0, best - attained);
}

std::vector<double> um_loss_per_buyer(const Market& market,
                                      const Outcome& outcome) {
  std::vector<double> out(market.buyers());
  for (int i = 0; i < market.buyers(); ++i)
    out[i] = um_loss_buyer(market, outcome, i);
  return out;
}

double um_loss(const Market& market, const Outcome& outcome) {
  double worst = 0.0;
  for (int i = 0; i < market.buyers(); ++i)
    worst = std::max(worst, um_loss_buyer(market, outcome, i));
  return worst;
}

std::vector<double> um_loss_unit_demand(const UnitDemandMatrix& matrix,
                                        const Allocation& allocation,
                                        const std::vector<double>& prices) {
  if (static_cast<int>(allocation.size()) != matrix.n)
    throw DimensionMismatch("allocation size does not match buyer count");
  if (static_cast<int>(prices.size()) != matrix.m)
    throw DimensionMismatch("price vector does not match good count");
  if (!is_feasible(allocation))
    throw InfeasibleAllocation("allocation bundles overlap");
  std::vector<double> out(matrix.n);
  for (int i = 0; i < matrix.n; ++i) {
    double best = 0.0;
    for (int j = 0; j < matrix.m; ++j)
      best = std::max(best, matrix.at(i, j) - prices[j]);
    double paid = 0.0;
    for (Bundle s = allocation[i]; s != 0; s &= s - 1)
      paid += prices[std::countr_zero(s)];
    const double attained = matrix.bundle_value(i, allocation[i]) - paid;
    out[i] = std::max(0.0, best - attained);
  }
  return out;
}

double sample_efficiency(std::int64_t ea_samples, std::int64_t eap_samples) {
  if (ea_samples == 0) throw DivisionByZero("EA sample count is zero");
  return 1.0 - static_cast<double>(eap_samples) /
                   static_cast<double>(ea_samples);
}

EvalReport evaluate_outcome(const Market& market, const Outcome& outcome) {
  EvalReport report;
  report.um_loss_per_buyer = um_loss_per_buyer(market, outcome);
  for (double loss : report.um_loss_per_buyer)
    report.um_loss_market = std::max(report.um_loss_market, loss);
  return report;
}

}  // namespace celearn
