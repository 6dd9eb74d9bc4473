#pragma once

#include <vector>

#include "celearn/market.hpp"
#include "celearn/valuation.hpp"

namespace celearn {

struct WelfareResult {
  Allocation allocation;
  double value = 0.0;
};

// Welfare-maximizing allocation by branch and bound over buyers in index
// order, pruning with the feasibility-relaxed suffix bound. Ties resolve to
// the lexicographically smallest allocation (buyer-major, bitmask-minor).
// Dense inputs are capped at m <= 14.
WelfareResult max_welfare_exact(const Market& market);

// Welfare-maximizing assignment of goods to unit-demand buyers (Hungarian
// algorithm); buyers may stay unassigned.
WelfareResult max_welfare_unit_demand(const UnitDemandMatrix& matrix);

// The (i, S)-submarket: buyer i and the goods in S removed, remaining goods
// compacted downward. buyer_map/good_map send submarket indices back to
// parent indices.
struct Submarket {
  Market market;
  int removed_buyer = 0;
  Bundle removed_bundle = 0;
  std::vector<int> buyer_map;
  std::vector<int> good_map;
};

Submarket make_submarket(const Market& market, int buyer, Bundle s);

// Feasibility-relaxed upper bound on the (i, S)-submarket optimum:
// sum over k != i of max{v_k(T) : T disjoint from S}.
double relaxed_upper_bound(const Market& market, int buyer, Bundle s);

namespace detail {

// Excluded (buyer, bundle) pairs in a packing instance.
inline constexpr double kUnavailable = -1e300;

// Max-welfare set packing over values laid out [buyer << m | bundle].
// Entries may be negative (skipped in favor of the empty bundle) or
// kUnavailable (not allocatable). values[buyer << m] must be 0.
WelfareResult solve_packing(int n, int m, const std::vector<double>& values);

// Per-buyer table of max{values[(buyer << m) | t] : t subseteq s, available},
// floored at 0 via the empty bundle.
std::vector<double> max_over_subsets(int n, int m,
                                     const std::vector<double>& values);

// Max-weight assignment on an n x m weight matrix (row-major). Pairs with
// weight <= 0 are never matched; match[i] is the assigned column or -1.
struct MatchingResult {
  double value = 0.0;
  std::vector<int> match;
};

MatchingResult max_weight_matching(const std::vector<double>& weights, int n,
                                   int m);

}  // namespace detail

}  // namespace celearn
