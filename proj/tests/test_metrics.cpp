#include <algorithm>
#include <cmath>
#include <vector>

#include "celearn/metrics.hpp"
#include "celearn/pricing.hpp"
#include "celearn/welfare.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace celearn;

TEST_CASE("metrics: exact CE has zero loss") {
  Market market(2, 2);
  market.set_value(0, 0b01, 5.0);
  market.set_value(1, 0b10, 7.0);
  const Allocation alloc{0b01, 0b10};
  const PriceSolution prices =
      linear_ce_prices(market, alloc, PriceObjective::MinRevenue);
  const Outcome outcome{alloc, Pricing::linear(prices.prices)};

  CHECK(um_loss(market, outcome) == 0.0);
  const EvalReport report = evaluate_outcome(market, outcome);
  CHECK(report.um_loss_market == 0.0);
  CHECK(report.um_loss_per_buyer == std::vector<double>{0.0, 0.0});
  CHECK(report.ea_samples == 0);
  CHECK(report.savings_fraction == 0.0);
}

TEST_CASE("metrics: hand-computed losses") {
  // One buyer, one good worth 5, free, but left unallocated: losing the
  // good costs the full 5.
  Market market(1, 1);
  market.set_value(0, 0b1, 5.0);
  const Outcome skipped{Allocation{0}, Pricing::linear({0.0})};
  CHECK(um_loss_buyer(market, skipped, 0) == doctest::Approx(5.0));
  CHECK(um_loss(market, skipped) == doctest::Approx(5.0));

  // Overpriced holding: utility -1 against best response 0 (buy nothing).
  const Outcome overpaying{Allocation{0b1}, Pricing::linear({6.0})};
  CHECK(um_loss_buyer(market, overpaying, 0) == doctest::Approx(1.0));

  // Distinct per-buyer losses; the market loss is the worst one.
  Market pair(2, 2);
  pair.set_value(0, 0b01, 5.0);
  pair.set_value(1, 0b10, 7.0);
  const Outcome outcome{Allocation{0b01, 0b10},
                        Pricing::linear({5.1, 7.4})};
  const std::vector<double> losses = um_loss_per_buyer(pair, outcome);
  REQUIRE(losses.size() == 2);
  CHECK(losses[0] == doctest::Approx(0.1));
  CHECK(losses[1] == doctest::Approx(0.4));
  CHECK(um_loss(pair, outcome) == doctest::Approx(0.4));
}

TEST_CASE("metrics: market loss equals the UM violation check") {
  SplitMix64 rng(83);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + rng.uniform_int(3);
    const int m = 1 + rng.uniform_int(3);
    const Market market = test::random_market(n, m, 8000 + trial);

    std::vector<Allocation> feasible = test::all_feasible(market);
    const Allocation& alloc = feasible[rng.uniform_int(
        static_cast<int>(feasible.size()))];
    std::vector<double> prices(m);
    for (double& p : prices) p = rng.uniform(0.0, 8.0);
    const Outcome outcome{alloc, Pricing::linear(prices)};

    CHECK(um_loss(market, outcome) ==
          doctest::Approx(um_violation(market, outcome)).epsilon(1e-12));
  }
}

TEST_CASE("metrics: unit-demand fast path matches enumeration") {
  SplitMix64 rng(89);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + rng.uniform_int(4);
    const int m = 1 + rng.uniform_int(4);
    const UnitDemandMatrix matrix =
        gen_unit_demand(UdDistribution::Uniform, n, m, 8100 + trial);
    const Market dense = unit_demand_to_market(matrix);

    // Any singleton-or-empty assignment, not necessarily optimal.
    Allocation alloc(n, 0);
    Bundle used = 0;
    for (int i = 0; i < n; ++i) {
      const int j = rng.uniform_int(m + 1);
      if (j < m && ((used >> j) & 1u) == 0 && rng.coin()) {
        alloc[i] = Bundle{1} << j;
        used |= alloc[i];
      }
    }
    std::vector<double> prices(m);
    for (double& p : prices) p = rng.uniform(0.0, 10.0);

    const std::vector<double> fast =
        um_loss_unit_demand(matrix, alloc, prices);
    const std::vector<double> slow =
        um_loss_per_buyer(dense, Outcome{alloc, Pricing::linear(prices)});
    REQUIRE(fast.size() == slow.size());
    for (int i = 0; i < n; ++i)
      CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
  }
}

TEST_CASE("metrics: losses are invariant under buyer relabeling") {
  const Market market = test::random_market(3, 3, 8200);
  const Allocation alloc{0b001, 0b010, 0b100};
  const std::vector<double> prices{1.0, 2.5, 4.0};
  const std::vector<double> base =
      um_loss_per_buyer(market, Outcome{alloc, Pricing::linear(prices)});

  // Swap buyers 0 and 2 everywhere; losses follow the permutation.
  Market swapped(3, 3);
  for (int i = 0; i < 3; ++i)
    for (Bundle s = 1; s <= 7; ++s)
      swapped.set_value(i, s, market.value(2 - i, s));
  const Allocation swapped_alloc{alloc[2], alloc[1], alloc[0]};
  const std::vector<double> moved = um_loss_per_buyer(
      swapped, Outcome{swapped_alloc, Pricing::linear(prices)});

  CHECK(moved == std::vector<double>{base[2], base[1], base[0]});
  CHECK(um_loss(market, Outcome{alloc, Pricing::linear(prices)}) ==
        um_loss(swapped, Outcome{swapped_alloc, Pricing::linear(prices)}));
}

TEST_CASE("metrics: sample efficiency") {
  CHECK(sample_efficiency(1000, 1000) == doctest::Approx(0.0));
  CHECK(sample_efficiency(1000, 700) == doctest::Approx(0.3));
  CHECK(sample_efficiency(1000, 1300) == doctest::Approx(-0.3));
  CHECK_THROWS_AS(sample_efficiency(0, 500), DivisionByZero);
}

TEST_CASE("metrics: input validation") {
  const Market market = test::random_market(2, 2, 8300);
  const Outcome short_alloc{Allocation{0b01}, Pricing::linear({0.0, 0.0})};
  CHECK_THROWS_AS(um_loss(market, short_alloc), DimensionMismatch);

  const Outcome overlapping{Allocation{0b01, 0b01},
                            Pricing::linear({0.0, 0.0})};
  CHECK_THROWS_AS(um_loss(market, overlapping), InfeasibleAllocation);

  const Outcome bad_prices{Allocation{0b01, 0b10}, Pricing::linear({0.0})};
  CHECK_THROWS_AS(um_loss(market, bad_prices), DimensionMismatch);

  UnitDemandMatrix matrix(2, 2);
  CHECK_THROWS_AS(um_loss_unit_demand(matrix, Allocation{0}, {0.0, 0.0}),
                  DimensionMismatch);
  CHECK_THROWS_AS(um_loss_unit_demand(matrix, Allocation{0, 0}, {0.0}),
                  DimensionMismatch);

  // Multi-good bundles are fine: the max rule values them, prices add up.
  matrix.set(0, 0, 6.0);
  matrix.set(0, 1, 2.0);
  const std::vector<double> both =
      um_loss_unit_demand(matrix, Allocation{0b11, 0}, {1.0, 1.0});
  // Held utility 6 - 2 against best response 6 - 1.
  CHECK(both[0] == doctest::Approx(1.0));
}
