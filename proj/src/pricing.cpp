#include "celearn/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "celearn/lp.hpp"
#include "celearn/welfare.hpp"

namespace celearn {

namespace {

// Tolerance when pinning revenue solves to the minimal slack.
constexpr double kSlackCapTol = 1e-9;

std::string objective_name(PriceObjective objective) {
  switch (objective) {
    case PriceObjective::MinSlack:
      return "min-slack";
    case PriceObjective::MinRevenue:
      return "min-rev";
    case PriceObjective::MaxRevenue:
      return "max-rev";
  }
  throw DomainError("unknown pricing objective");
}

// Shared LP assembly: structural variables are the prices of allocated
// goods followed by one slack per constraint row. Each row reads
//   P(S*_i) - P(S) - alpha_iS <= v_i(S*_i) - v_i(S)
// restricted to priced (allocated) goods.
struct SlackLp {
  int num_price_vars = 0;
  std::vector<int> price_var;               // good -> variable or -1
  std::vector<int> priced_goods;            // variable -> good
  std::vector<std::pair<int, Bundle>> row_pair;  // constraint -> (buyer, S)
  lp::Problem problem{0};

  SlackLp(int num_goods, Bundle allocated) {
    price_var.assign(num_goods, -1);
    for (int j = 0; j < num_goods; ++j)
      if ((allocated >> j) & 1u) {
        price_var[j] = num_price_vars++;
        priced_goods.push_back(j);
      }
  }

  int num_vars() const {
    return num_price_vars + static_cast<int>(row_pair.size());
  }

  void add_pair(int buyer, Bundle deviation) {
    row_pair.emplace_back(buyer, deviation);
  }

  // coefficient vector for one row given held and deviation bundles
  std::vector<double> row_coeffs(Bundle held, Bundle deviation,
                                 int slack_index) const {
    std::vector<double> coeffs(num_vars(), 0.0);
    for (int v = 0; v < num_price_vars; ++v) {
      const int j = priced_goods[v];
      double c = 0.0;
      if ((held >> j) & 1u) c += 1.0;
      if ((deviation >> j) & 1u) c -= 1.0;
      coeffs[v] = c;
    }
    coeffs[num_price_vars + slack_index] = -1.0;
    return coeffs;
  }

  lp::Solution solve(PriceObjective objective) {
    const int vars = num_vars();

    // Phase A: minimize total slack.
    lp::Problem min_slack = problem;
    min_slack.objective.assign(vars, 0.0);
    for (int k = 0; k < static_cast<int>(row_pair.size()); ++k)
      min_slack.objective[num_price_vars + k] = 1.0;
    lp::Solution slack_sol = lp::solve_min(min_slack);
    if (slack_sol.status != lp::Status::Optimal)
      throw LPNumericalFailure("slack LP did not reach an optimum");
    if (objective == PriceObjective::MinSlack) return slack_sol;

    // Phase B: optimize revenue with total slack pinned at the minimum.
    lp::Problem revenue = problem;
    revenue.objective.assign(vars, 0.0);
    const double dir = objective == PriceObjective::MaxRevenue ? -1.0 : 1.0;
    for (int v = 0; v < num_price_vars; ++v) revenue.objective[v] = dir;
    std::vector<double> cap(vars, 0.0);
    for (int k = 0; k < static_cast<int>(row_pair.size()); ++k)
      cap[num_price_vars + k] = 1.0;
    revenue.add_row(std::move(cap), slack_sol.objective + kSlackCapTol);
    lp::Solution rev_sol = lp::solve_min(revenue);
    if (rev_sol.status != lp::Status::Optimal)
      throw LPNumericalFailure("revenue LP did not reach an optimum");
    return rev_sol;
  }

  PriceSolution extract(const lp::Solution& sol, int num_goods,
                        PriceObjective objective) const {
    PriceSolution out;
    out.objective_used = objective;
    out.prices.assign(num_goods, 0.0);
    for (int v = 0; v < num_price_vars; ++v)
      out.prices[priced_goods[v]] = std::max(0.0, sol.x[v]);
    out.total_slack = 0.0;
    for (int k = 0; k < static_cast<int>(row_pair.size()); ++k) {
      const double alpha = std::max(0.0, sol.x[num_price_vars + k]);
      out.per_pair_slack.emplace_back(row_pair[k].first, row_pair[k].second,
                                      alpha);
      out.total_slack += alpha;
    }
    return out;
  }
};

}  // namespace

std::string to_string(PriceObjective objective) {
  return objective_name(objective);
}

PriceObjective price_objective_from_string(const std::string& name) {
  if (name == "min-slack") return PriceObjective::MinSlack;
  if (name == "min-rev") return PriceObjective::MinRevenue;
  if (name == "max-rev") return PriceObjective::MaxRevenue;
  throw ParseError("unknown pricing objective '" + name + "'");
}

PriceSolution linear_ce_prices(const Market& market, const Allocation& alloc,
                               PriceObjective objective) {
  if (market.goods() > 14)
    throw TooManyGoods("pricing LP capped at m <= 14");
  if (static_cast<int>(alloc.size()) != market.buyers())
    throw DimensionMismatch("allocation size does not match buyer count");
  const double alloc_welfare = welfare(market, alloc);  // validates feasibility
  const double best = max_welfare_exact(market).value;
  if (alloc_welfare < best - kTol)
    throw NotWelfareMaximizing("allocation welfare " +
                               std::to_string(alloc_welfare) +
                               " below optimum " + std::to_string(best));

  const int n = market.buyers();
  const int m = market.goods();
  Bundle allocated = 0;
  for (Bundle s : alloc) allocated |= s;

  SlackLp builder(m, allocated);
  for (int i = 0; i < n; ++i)
    for (Bundle s = 0; s <= market.full_bundle(); ++s)
      if (s != alloc[i]) builder.add_pair(i, s);

  lp::Problem problem(builder.num_vars());
  for (int k = 0; k < static_cast<int>(builder.row_pair.size()); ++k) {
    const auto [i, s] = builder.row_pair[k];
    problem.add_row(builder.row_coeffs(alloc[i], s, k),
                    market.value(i, alloc[i]) - market.value(i, s));
  }
  builder.problem = std::move(problem);

  const auto sol = builder.solve(objective);
  PriceSolution out = builder.extract(sol, m, objective);
  // Record the held bundle's (identically zero) slack as well.
  for (int i = 0; i < n; ++i)
    out.per_pair_slack.emplace_back(i, alloc[i], 0.0);
  std::sort(out.per_pair_slack.begin(), out.per_pair_slack.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });
  return out;
}

PriceSolution linear_ce_prices_unit_demand(const UnitDemandMatrix& matrix,
                                           const Allocation& alloc,
                                           PriceObjective objective) {
  const int n = matrix.n;
  const int m = matrix.m;
  if (static_cast<int>(alloc.size()) != n)
    throw DimensionMismatch("allocation size does not match buyer count");
  for (Bundle s : alloc)
    if (s != 0 && bundle_size(s) != 1)
      throw DomainError("unit-demand pricing expects singleton allocations");
  if (!is_feasible(alloc)) throw InfeasibleAllocation("bundles overlap");

  double alloc_welfare = 0.0;
  for (int i = 0; i < n; ++i) alloc_welfare += matrix.bundle_value(i, alloc[i]);
  const double best = max_welfare_unit_demand(matrix).value;
  if (alloc_welfare < best - kTol)
    throw NotWelfareMaximizing("assignment is not welfare-maximizing");

  Bundle allocated = 0;
  for (Bundle s : alloc) allocated |= s;

  SlackLp builder(m, allocated);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const Bundle dev = Bundle{1} << j;
      if (dev != alloc[i]) builder.add_pair(i, dev);
    }
    if (alloc[i] != 0) builder.add_pair(i, 0);  // empty-bundle deviation
  }

  lp::Problem problem(builder.num_vars());
  for (int k = 0; k < static_cast<int>(builder.row_pair.size()); ++k) {
    const auto [i, s] = builder.row_pair[k];
    problem.add_row(
        builder.row_coeffs(alloc[i], s, k),
        matrix.bundle_value(i, alloc[i]) - matrix.bundle_value(i, s));
  }
  builder.problem = std::move(problem);

  const auto sol = builder.solve(objective);
  PriceSolution out = builder.extract(sol, m, objective);
  for (int i = 0; i < n; ++i)
    out.per_pair_slack.emplace_back(i, alloc[i], 0.0);
  std::sort(out.per_pair_slack.begin(), out.per_pair_slack.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });
  return out;
}

PriceCheck verify_price_solution(const Market& market, const Allocation& alloc,
                                 const PriceSolution& solution) {
  if (static_cast<int>(solution.prices.size()) != market.goods())
    throw DimensionMismatch("price vector length mismatch");
  if (static_cast<int>(alloc.size()) != market.buyers())
    throw DimensionMismatch("allocation size mismatch");

  const Pricing pricing = Pricing::linear(solution.prices);
  PriceCheck check;

  double slack_sum = 0.0;
  std::vector<std::vector<double>> alpha(
      market.buyers(),
      std::vector<double>(static_cast<std::size_t>(1) << market.goods(), 0.0));
  for (const auto& [i, s, a] : solution.per_pair_slack) {
    if (i < 0 || i >= market.buyers() || s > market.full_bundle())
      throw DimensionMismatch("slack entry out of range");
    alpha[i][s] = a;
    slack_sum += a;
  }
  check.slack_sum_error = std::abs(slack_sum - solution.total_slack);

  for (int i = 0; i < market.buyers(); ++i) {
    const double held =
        market.value(i, alloc[i]) - pricing.price(i, alloc[i]);
    for (Bundle s = 0; s <= market.full_bundle(); ++s) {
      const double gain =
          market.value(i, s) - pricing.price(i, s) - held - alpha[i][s];
      check.max_excess = std::max(check.max_excess, gain);
    }
  }

  Bundle allocated = 0;
  for (Bundle s : alloc) allocated |= s;
  for (int j = 0; j < market.goods(); ++j)
    if (((allocated >> j) & 1u) == 0 && solution.prices[j] > kTol)
      check.zero_price_ok = false;

  check.ok = check.zero_price_ok && check.max_excess <= 1e-7 &&
             check.slack_sum_error <= 1e-9;
  return check;
}

}  // namespace celearn
