#include <algorithm>
#include <cmath>
#include <vector>

#include "celearn/welfare.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace celearn;

TEST_CASE("welfare: hand instances") {
  // Single buyer: no packing conflict, optimum is the best bundle.
  const Market solo = test::random_market(1, 3, 5);
  double best = 0.0;
  for (Bundle s = 0; s <= 7; ++s) best = std::max(best, solo.value(0, s));
  CHECK(max_welfare_exact(solo).value == doctest::Approx(best));

  Market market(2, 2);
  market.set_value(0, 0b01, 3.0);
  market.set_value(0, 0b11, 4.0);
  market.set_value(1, 0b10, 2.0);
  const WelfareResult result = max_welfare_exact(market);
  CHECK(result.value == doctest::Approx(5.0));
  CHECK(result.allocation == Allocation{0b01, 0b10});
}

TEST_CASE("welfare: additive valuations decompose per good") {
  SplitMix64 rng(19);
  std::vector<std::vector<double>> u(3, std::vector<double>(3));
  Market market(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) u[i][j] = rng.uniform(0.0, 10.0);
  for (int i = 0; i < 3; ++i)
    for (Bundle s = 1; s <= 7; ++s) {
      double sum = 0.0;
      for (int j = 0; j < 3; ++j)
        if (s & (Bundle{1} << j)) sum += u[i][j];
      market.set_value(i, s, sum);
    }
  double expected = 0.0;
  for (int j = 0; j < 3; ++j)
    expected += std::max({u[0][j], u[1][j], u[2][j]});
  CHECK(max_welfare_exact(market).value == doctest::Approx(expected));
}

TEST_CASE("welfare: solver equals enumeration with identical tie-break") {
  SplitMix64 rng(29);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 1 + rng.uniform_int(3);
    const int m = 1 + rng.uniform_int(4);
    const Market market = test::random_market(n, m, 1000 + trial);
    const WelfareResult got = max_welfare_exact(market);
    const WelfareResult want = test::enum_max_welfare(market);
    CHECK(got.value == doctest::Approx(want.value).epsilon(1e-12));
    CHECK(got.allocation == want.allocation);
    // Certificate: reported value matches the reported allocation.
    CHECK(std::abs(welfare(market, got.allocation) - got.value) <= 1e-9);
  }
}

TEST_CASE("welfare: dense cap") {
  CHECK_THROWS_AS(max_welfare_exact(Market(1, 15)), TooManyGoods);
}

TEST_CASE("welfare: more buyers help, fewer goods hurt") {
  SplitMix64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const Market market = test::random_market(2, 3, 2000 + trial);
    const double base = max_welfare_exact(market).value;

    Market extended(3, 3);
    for (int i = 0; i < 2; ++i)
      for (Bundle s = 1; s <= 7; ++s)
        extended.set_value(i, s, market.value(i, s));
    for (Bundle s = 1; s <= 7; ++s)
      extended.set_value(2, s, rng.uniform(0.0, 10.0));
    CHECK(max_welfare_exact(extended).value >= base - kTol);

    // Dropping a good: best welfare among allocations avoiding it.
    const Bundle banned = Bundle{1} << rng.uniform_int(3);
    double restricted = 0.0;
    for (const Allocation& alloc : test::all_feasible(market)) {
      bool uses = false;
      for (Bundle s : alloc) uses = uses || (s & banned);
      if (!uses) restricted = std::max(restricted, welfare(market, alloc));
    }
    CHECK(restricted <= base + kTol);
  }
}

TEST_CASE("welfare: unit-demand hand instances") {
  UnitDemandMatrix diag(2, 2);
  diag.set(0, 0, 5.0);
  diag.set(1, 1, 7.0);
  const WelfareResult both = max_welfare_unit_demand(diag);
  CHECK(both.value == doctest::Approx(12.0));
  CHECK(both.allocation == Allocation{0b01, 0b10});

  UnitDemandMatrix clash(2, 2);
  clash.set(0, 0, 4.0);
  clash.set(1, 0, 9.0);
  const WelfareResult won = max_welfare_unit_demand(clash);
  CHECK(won.value == doctest::Approx(9.0));
  CHECK(won.allocation == Allocation{0, 0b01});
}

namespace {

// Brute force over all injective partial assignments of goods to buyers.
double enum_matching(const UnitDemandMatrix& matrix, int buyer, Bundle used) {
  if (buyer == matrix.n) return 0.0;
  double best = enum_matching(matrix, buyer + 1, used);
  for (int j = 0; j < matrix.m; ++j)
    if (!(used & (Bundle{1} << j)))
      best = std::max(best, matrix.at(buyer, j) +
                                enum_matching(matrix, buyer + 1,
                                              used | (Bundle{1} << j)));
  return best;
}

}  // namespace

TEST_CASE("welfare: Hungarian equals enumeration and the dense solver") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const UnitDemandMatrix matrix =
        gen_unit_demand(UdDistribution::Uniform, 5, 5, 3000 + seed);
    const WelfareResult result = max_welfare_unit_demand(matrix);
    CHECK(result.value == doctest::Approx(enum_matching(matrix, 0, 0)));
    CHECK(is_feasible(result.allocation));
    double check = 0.0;
    for (int i = 0; i < matrix.n; ++i)
      check += matrix.bundle_value(i, result.allocation[i]);
    CHECK(check == doctest::Approx(result.value));
  }
  // Agreement with the exact solver on expanded markets of mixed shapes.
  SplitMix64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + rng.uniform_int(6);
    const int m = 1 + rng.uniform_int(6);
    const UnitDemandMatrix matrix =
        gen_unit_demand(UdDistribution::PreferredSubset, n, m, 4000 + trial);
    CHECK(max_welfare_unit_demand(matrix).value ==
          doctest::Approx(max_welfare_exact(unit_demand_to_market(matrix))
                              .value));
  }
}

TEST_CASE("welfare: matching never uses nonpositive weights") {
  const std::vector<double> weights = {-3.0, 0.0, 0.0, -1.0};
  const detail::MatchingResult result = detail::max_weight_matching(weights, 2, 2);
  CHECK(result.value == 0.0);
  CHECK(result.match == std::vector<int>{-1, -1});
}

TEST_CASE("welfare: submarkets") {
  const Market market = test::random_market(3, 3, 61);

  const Submarket trivial = make_submarket(market, 1, 0);
  CHECK(trivial.market.buyers() == 2);
  CHECK(trivial.market.goods() == 3);
  CHECK(trivial.buyer_map == std::vector<int>{0, 2});
  CHECK(trivial.market.value(1, 0b101) == market.value(2, 0b101));

  const Submarket empty = make_submarket(market, 1, 0b111);
  CHECK(empty.market.goods() == 0);
  CHECK(max_welfare_exact(empty.market).value == 0.0);

  // Removing (buyer 1, good 1): optimum equals parent enumeration over the
  // other buyers with bundles avoiding good 1.
  const Submarket sub = make_submarket(market, 1, 0b001);
  CHECK(sub.good_map == std::vector<int>{1, 2});
  double expected = 0.0;
  for (Bundle s0 = 0; s0 <= 7; ++s0)
    for (Bundle s2 = 0; s2 <= 7; ++s2) {
      if ((s0 & s2) || ((s0 | s2) & 0b001)) continue;
      expected = std::max(expected,
                          market.value(0, s0) + market.value(2, s2));
    }
  CHECK(max_welfare_exact(sub.market).value == doctest::Approx(expected));
}

TEST_CASE("welfare: relaxed bound dominates the exact submarket optimum") {
  // Two buyers: a single remaining buyer has no feasibility interaction,
  // so the bound is tight.
  const Market pair = test::random_market(2, 3, 71);
  for (Bundle s = 0; s <= 7; ++s) {
    const double bound = relaxed_upper_bound(pair, 0, s);
    const double exact = max_welfare_exact(make_submarket(pair, 0, s).market)
                             .value;
    CHECK(bound == doctest::Approx(exact));
  }

  CHECK(relaxed_upper_bound(pair, 0, pair.full_bundle()) ==
        doctest::Approx(max_welfare_exact(make_submarket(pair, 0, 0b111)
                                              .market)
                            .value));

  SplitMix64 rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    const Market market = test::random_market(3, 3, 5000 + trial);
    const int buyer = rng.uniform_int(3);
    const Bundle s = static_cast<Bundle>(rng.uniform_int(8));
    const double bound = relaxed_upper_bound(market, buyer, s);
    const double exact =
        max_welfare_exact(make_submarket(market, buyer, s).market).value;
    CHECK(bound >= exact - kTol);
  }
}

TEST_CASE("welfare: full-bundle relaxed bound is zero") {
  const Market market = test::random_market(3, 2, 79);
  CHECK(relaxed_upper_bound(market, 0, market.full_bundle()) == 0.0);
}

TEST_CASE("welfare: nearby markets have close optima") {
  SplitMix64 rng(83);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + rng.uniform_int(3);
    const int m = 1 + rng.uniform_int(3);
    const double eps = rng.uniform(0.02, 0.5);
    const Market a = test::random_market(n, m, 6000 + trial);
    const Market b = test::perturb_market(a, eps, 7000 + trial);
    const double gap =
        std::abs(max_welfare_exact(a).value - max_welfare_exact(b).value);
    CHECK(gap <= eps * n + kTol);
  }
}

TEST_CASE("welfare: max_over_subsets against brute force") {
  const Market market = test::random_market(2, 3, 89);
  std::vector<double> values(2u << 3, detail::kUnavailable);
  for (int i = 0; i < 2; ++i) {
    values[static_cast<std::size_t>(i) << 3] = 0.0;
    for (Bundle s = 1; s <= 7; ++s)
      if (s != 0b010)  // leave one bundle unavailable
        values[(static_cast<std::size_t>(i) << 3) | s] = market.value(i, s);
  }
  const auto table = detail::max_over_subsets(2, 3, values);
  for (int i = 0; i < 2; ++i)
    for (Bundle s = 0; s <= 7; ++s) {
      double expected = 0.0;
      for (Bundle t = 1; t <= 7; ++t)
        if ((t & ~s) == 0 && t != 0b010)
          expected = std::max(expected, market.value(i, t));
      CHECK(table[(static_cast<std::size_t>(i) << 3) | s] ==
            doctest::Approx(expected));
    }
}
