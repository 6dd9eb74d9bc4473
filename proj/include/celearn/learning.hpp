#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "celearn/market.hpp"
#include "celearn/valuation.hpp"

namespace celearn {

struct PairKey {
  int buyer = 0;
  Bundle bundle = 0;
  auto operator<=>(const PairKey&) const = default;
};

struct Estimate {
  double mean = 0.0;
  double radius = 0.0;
  bool pruned = false;
  std::int64_t samples = 0;
};

// Per-pair estimates ordered by (buyer, bundle); pruned pairs keep the mean
// and radius from the round in which they were last sampled.
struct EstimateTable {
  std::map<PairKey, Estimate> entries;

  std::vector<PairKey> active_pairs() const;
  const Estimate& at(int buyer, Bundle s) const;
};

// Hoeffding radius eps = c * sqrt(ln(2 |I| / delta) / (2 t)).
double hoeffding_eps(double c, std::int64_t idx_size, double delta,
                     std::int64_t t);

// Smallest t with hoeffding_eps(c, idx_size, delta, t) <= eps.
std::int64_t invert_hoeffding_t(double c, std::int64_t idx_size, double delta,
                                double eps);

struct EaResult {
  std::map<PairKey, Estimate> estimates;
  double eps_hat = 0.0;
};

// Elicitation algorithm: the mean of t fresh oracle draws per pair, with the
// shared Hoeffding radius for (|idx|, delta, t).
EaResult ea(NoisyOracle& oracle, const IndexSet& idx, std::int64_t t,
            double delta, double c);

// Pruning criterion: v_hat + upper_bound + 2 * eps_hat * n < w_star_hat
// (strict).
bool prune_check(double v_hat, double upper_bound, double eps_hat, int n,
                 double w_star_hat);

// Ascending by bound (ties by pair key), truncated to the budget;
// budget < 0 means unbounded.
std::vector<PairKey> select_candidates(const std::vector<PairKey>& active,
                                       const std::map<PairKey, double>& bounds,
                                       std::int64_t budget);

inline constexpr std::int64_t kUnboundedBudget = -1;

// Per-round sample counts (strictly increasing), failure probabilities
// (sum < 1), and candidate budgets.
struct Schedules {
  std::vector<std::int64_t> sampling;
  std::vector<double> failure;
  std::vector<std::int64_t> budgets;

  int rounds() const { return static_cast<int>(sampling.size()); }
  void validate() const;
};

enum class BoundMode { Exact, Relaxed, TwoPass };

std::string to_string(BoundMode mode);
BoundMode bound_mode_from_string(const std::string& name);

struct LearnResult {
  EstimateTable estimates;
  double eps_hat = 0.0;
  double delta_spent = 0.0;   // sum of failure probabilities actually used
  double delta_budget = 0.0;  // full-schedule sum
  int iterations = 0;
  std::int64_t total_samples = 0;
};

// Audit hook: called once per round after sampling and pruning.
struct EapRound {
  int round = 0;  // 1-based
  double eps_hat = 0.0;
  std::vector<PairKey> sampled;      // active set of this round
  std::vector<PairKey> pruned_now;   // pairs pruned at the end of this round
  const EstimateTable* estimates = nullptr;
};
using EapObserver = std::function<void(const EapRound&)>;

// Elicitation with pruning. The initial index set and the welfare engine
// follow the oracle's base: all nonempty bundles with the exact packing
// solver for a dense market, the n*m singletons with the Hungarian solver
// for a unit-demand matrix. Terminates when the radius reaches target_eps,
// the schedule is exhausted, or nothing remains active.
LearnResult eap(NoisyOracle& oracle, const Schedules& schedules, double c,
                double target_eps, BoundMode mode,
                const EapObserver& observer = {});

}  // namespace celearn
