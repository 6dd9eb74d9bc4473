#include "celearn/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace celearn {

namespace detail {

std::vector<double> max_over_subsets(int n, int m,
                                     const std::vector<double>& values) {
  const std::size_t per = std::size_t{1} << m;
  std::vector<double> dp(values);
  for (int i = 0; i < n; ++i) {
    double* row = dp.data() + (static_cast<std::size_t>(i) << m);
    row[0] = 0.0;
    // Subset-sum style sweep: after bit j, row[s] covers subsets differing
    // from s only in bits <= j.
    for (int j = 0; j < m; ++j)
      for (std::size_t s = 0; s < per; ++s)
        if (s & (std::size_t{1} << j))
          row[s] = std::max(row[s], row[s ^ (std::size_t{1} << j)]);
  }
  return dp;
}

namespace {

struct PackingSearch {
  int n;
  int m;
  const std::vector<double>* values;
  const std::vector<double>* maxsub;
  Bundle full;
  double best;
  Allocation best_alloc;
  Allocation current;

  double suffix_bound(int from, Bundle free) const {
    double bound = 0.0;
    for (int k = from; k < n; ++k)
      bound += (*maxsub)[(static_cast<std::size_t>(k) << m) | free];
    return bound;
  }

  void dfs(int i, Bundle used, double acc) {
    if (i == n) {
      // Strict improvement keeps the first (lexicographically smallest)
      // optimum found.
      if (acc > best) {
        best = acc;
        best_alloc = current;
      }
      return;
    }
    const Bundle free = full & ~used;
    if (acc + suffix_bound(i, free) <= best) return;
    const double* row =
        values->data() + (static_cast<std::size_t>(i) << m);
    // Submasks of free in increasing numeric order, starting at 0.
    Bundle s = 0;
    do {
      if (s == 0 || row[s] != kUnavailable) {
        current[i] = s;
        dfs(i + 1, used | s, acc + (s == 0 ? 0.0 : row[s]));
      }
      s = (s - free) & free;
    } while (s != 0);
  }
};

}  // namespace

WelfareResult solve_packing(int n, int m, const std::vector<double>& values) {
  if (n == 0) return {Allocation{}, 0.0};
  PackingSearch search;
  search.n = n;
  search.m = m;
  search.values = &values;
  auto maxsub = max_over_subsets(n, m, values);
  search.maxsub = &maxsub;
  search.full = m == 0 ? 0 : (Bundle{1} << m) - 1;
  search.best = -std::numeric_limits<double>::infinity();
  search.best_alloc.assign(n, 0);
  search.current.assign(n, 0);
  search.dfs(0, 0, 0.0);
  return {search.best_alloc, search.best};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Jonker-Volgenant style shortest augmenting paths with potentials; cost is
// a dense s x s matrix to minimize, col_row[j] gives the assigned row.
std::vector<int> min_cost_assignment(const std::vector<double>& cost, int s) {
  std::vector<double> u(s + 1, 0.0), v(s + 1, 0.0);
  std::vector<int> col_row(s + 1, -1), way(s + 1, s);
  for (int i = 0; i < s; ++i) {
    col_row[s] = i;
    int j0 = s;
    std::vector<double> minv(s + 1, kInf);
    std::vector<char> used(s + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = col_row[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 0; j < s; ++j) {
        if (used[j]) continue;
        const double cur =
            cost[static_cast<std::size_t>(i0) * s + j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= s; ++j) {
        if (used[j]) {
          u[col_row[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_row[j0] != -1);
    while (j0 != s) {
      const int j1 = way[j0];
      col_row[j0] = col_row[j1];
      j0 = j1;
    }
  }
  col_row.pop_back();
  return col_row;
}

}  // namespace

MatchingResult max_weight_matching(const std::vector<double>& weights, int n,
                                   int m) {
  const int s = std::max(n, m);
  // Pad to square and clamp below at 0 so staying unmatched is always an
  // option; maximize by minimizing the negated matrix.
  std::vector<double> cost(static_cast<std::size_t>(s) * s, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double w = weights[static_cast<std::size_t>(i) * m + j];
      cost[static_cast<std::size_t>(i) * s + j] = -std::max(w, 0.0);
    }
  const auto col_row = min_cost_assignment(cost, s);
  MatchingResult out;
  out.match.assign(n, -1);
  for (int j = 0; j < m; ++j) {
    const int i = col_row[j];
    if (i < 0 || i >= n) continue;
    const double w = weights[static_cast<std::size_t>(i) * m + j];
    if (w > 0.0) {
      out.match[i] = j;
      out.value += w;
    }
  }
  return out;
}

}  // namespace detail

namespace {

std::vector<double> dense_values(const Market& market) {
  const int n = market.buyers();
  const int m = market.goods();
  std::vector<double> values(static_cast<std::size_t>(n) << m, 0.0);
  for (int i = 0; i < n; ++i)
    for (Bundle s = 0; s <= market.full_bundle(); ++s)
      values[(static_cast<std::size_t>(i) << m) | s] = market.value(i, s);
  return values;
}

}  // namespace

WelfareResult max_welfare_exact(const Market& market) {
  if (market.goods() > 14)
    throw TooManyGoods("exact welfare solver capped at m <= 14, got m = " +
                       std::to_string(market.goods()));
  return detail::solve_packing(market.buyers(), market.goods(),
                               dense_values(market));
}

WelfareResult max_welfare_unit_demand(const UnitDemandMatrix& matrix) {
  const auto matching = detail::max_weight_matching(matrix.v, matrix.n, matrix.m);
  WelfareResult out;
  out.value = matching.value;
  out.allocation.assign(matrix.n, 0);
  for (int i = 0; i < matrix.n; ++i)
    if (matching.match[i] >= 0)
      out.allocation[i] = Bundle{1} << matching.match[i];
  return out;
}

Submarket make_submarket(const Market& market, int buyer, Bundle s) {
  if (buyer < 0 || buyer >= market.buyers())
    throw DimensionMismatch("submarket buyer out of range");
  if (s > market.full_bundle())
    throw DimensionMismatch("submarket bundle out of range");

  Submarket out;
  out.removed_buyer = buyer;
  out.removed_bundle = s;
  for (int k = 0; k < market.buyers(); ++k)
    if (k != buyer) out.buyer_map.push_back(k);
  for (int j = 0; j < market.goods(); ++j)
    if (((s >> j) & 1u) == 0) out.good_map.push_back(j);

  const int sub_n = static_cast<int>(out.buyer_map.size());
  const int sub_m = static_cast<int>(out.good_map.size());
  Market sub(sub_n, sub_m);
  const Bundle sub_full = sub.full_bundle();
  for (int k = 0; k < sub_n; ++k) {
    for (Bundle t = 1; t != 0 && t <= sub_full; ++t) {
      Bundle parent = 0;
      for (int j = 0; j < sub_m; ++j)
        if ((t >> j) & 1u) parent |= Bundle{1} << out.good_map[j];
      sub.set_value(k, t, market.value(out.buyer_map[k], parent));
    }
  }
  out.market = std::move(sub);
  return out;
}

double relaxed_upper_bound(const Market& market, int buyer, Bundle s) {
  if (buyer < 0 || buyer >= market.buyers())
    throw DimensionMismatch("buyer out of range");
  if (s > market.full_bundle())
    throw DimensionMismatch("bundle out of range");
  const int m = market.goods();
  const auto maxsub =
      detail::max_over_subsets(market.buyers(), m, dense_values(market));
  const Bundle free = market.full_bundle() & ~s;
  double bound = 0.0;
  for (int k = 0; k < market.buyers(); ++k)
    if (k != buyer)
      bound += maxsub[(static_cast<std::size_t>(k) << m) | free];
  return bound;
}

}  // namespace celearn
