#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "celearn/rng.hpp"
#include "celearn/valuation.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace celearn;

TEST_CASE("rng: splitmix64 mix against reference values") {
  CHECK(mix64(0) == 0x0ull);
  CHECK(mix64(1) == 0x5692161d100b05e5ull);
  CHECK(mix64(kRngGamma) == 0xe220a8397b1dcdafull);
  CHECK(stream_u64(42, 0) == 0xbdd732262feb6e95ull);
  CHECK(stream_u01(42, 0) == 0.7415648787718233);
  CHECK(stream_u01(42, 1) == 0.1599103928769201);

  SplitMix64 rng(123);
  CHECK(rng.next() == 0xb4dc9bd462de412bull);
  CHECK(rng.next() == 0xfa023ce9f06fb77cull);
  CHECK(rng.next() == 0xdc12d311d371cbe8ull);
}

TEST_CASE("rng: derived streams differ and are stable") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(pair_stream_key(9, 0, 1) != pair_stream_key(9, 1, 0));
}

TEST_CASE("valuation: UnitDemandMatrix basics") {
  UnitDemandMatrix matrix(2, 3);
  matrix.set(0, 0, 3.0);
  matrix.set(0, 1, 5.0);
  CHECK(matrix.at(0, 1) == 5.0);
  CHECK(matrix.bundle_value(0, 0b011) == 5.0);
  CHECK(matrix.bundle_value(0, 0b100) == 0.0);
  CHECK(matrix.bundle_value(0, 0) == 0.0);
  CHECK_THROWS_AS(matrix.set(0, 0, -1.0), DomainError);
}

TEST_CASE("valuation: uniform generator range and determinism") {
  const UnitDemandMatrix a = gen_unit_demand(UdDistribution::Uniform, 6, 4, 9);
  const UnitDemandMatrix b = gen_unit_demand(UdDistribution::Uniform, 6, 4, 9);
  const UnitDemandMatrix c = gen_unit_demand(UdDistribution::Uniform, 6, 4, 10);
  bool identical = true, differs = false;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(a.at(i, j) >= 0.0);
      CHECK(a.at(i, j) < 10.0);
      identical = identical && a.at(i, j) == b.at(i, j);
      differs = differs || a.at(i, j) != c.at(i, j);
    }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("valuation: preferred-good rows follow v / 2^k") {
  const UnitDemandMatrix matrix =
      gen_unit_demand(UdDistribution::PreferredGood, 20, 5, 77);
  bool saw_first_preferred = false;
  for (int i = 0; i < matrix.n; ++i) {
    int preferred = 0;
    for (int j = 1; j < matrix.m; ++j)
      if (matrix.at(i, j) > matrix.at(i, preferred)) preferred = j;
    const double p = matrix.at(i, preferred);
    for (int j = 0; j < matrix.m; ++j) {
      if (j == preferred) continue;
      // k in v/2^k is the literal 1-based good index.
      CHECK(matrix.at(i, j) == p / std::exp2(j + 1));
    }
    if (preferred == 0) {
      saw_first_preferred = true;
      CHECK(matrix.at(i, 1) == p / 4.0);
      CHECK(matrix.at(i, 2) == p / 8.0);
    }
  }
  CHECK(saw_first_preferred);
}

TEST_CASE("valuation: preferred-good-distinct is an injection") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const UnitDemandMatrix matrix =
        gen_unit_demand(UdDistribution::PreferredGoodDistinct, 4, 4, seed);
    std::set<int> preferred;
    for (int i = 0; i < 4; ++i) {
      int arg = 0;
      for (int j = 1; j < 4; ++j)
        if (matrix.at(i, j) > matrix.at(i, arg)) arg = j;
      preferred.insert(arg);
    }
    // n = m, so the distinct preferred goods form a permutation.
    CHECK(preferred.size() == 4);
  }
  CHECK_THROWS_AS(
      gen_unit_demand(UdDistribution::PreferredGoodDistinct, 5, 4, 1),
      InvalidDistinct);
}

TEST_CASE("valuation: preferred value marginal is U[0,10) (KS test)") {
  const int trials = 10000;
  std::vector<double> sample;
  sample.reserve(trials);
  for (int trial = 0; trial < trials; ++trial) {
    const UnitDemandMatrix matrix = gen_unit_demand(
        UdDistribution::PreferredGoodDistinct, 3, 3, 50000 + trial);
    sample.push_back(
        std::max({matrix.at(0, 0), matrix.at(0, 1), matrix.at(0, 2)}));
  }
  std::sort(sample.begin(), sample.end());
  double d = 0.0;
  for (int k = 0; k < trials; ++k) {
    const double cdf = sample[k] / 10.0;
    d = std::max(d, std::abs(cdf - static_cast<double>(k) / trials));
    d = std::max(d, std::abs(cdf - static_cast<double>(k + 1) / trials));
  }
  // Kolmogorov critical value at alpha = 0.01 for 10^4 samples.
  CHECK(d < 0.0162762);
}

TEST_CASE("valuation: preferred-subset zero pattern") {
  const UnitDemandMatrix matrix =
      gen_unit_demand(UdDistribution::PreferredSubset, 20, 8, 5);
  int zeros = 0, positives = 0;
  for (int i = 0; i < matrix.n; ++i)
    for (int j = 0; j < matrix.m; ++j) {
      if (matrix.at(i, j) == 0.0) ++zeros;
      else ++positives;
      CHECK(matrix.at(i, j) < 10.0);
    }
  CHECK(zeros > 0);
  CHECK(positives > 0);
}

TEST_CASE("valuation: dense expansion is the per-bundle max") {
  UnitDemandMatrix row(1, 2);
  row.set(0, 0, 3.0);
  row.set(0, 1, 5.0);
  const Market expanded = unit_demand_to_market(row);
  CHECK(expanded.value(0, 0b11) == 5.0);
  CHECK(expanded.value(0, 0) == 0.0);

  const UnitDemandMatrix random =
      gen_unit_demand(UdDistribution::Uniform, 2, 3, 88);
  const Market market = unit_demand_to_market(random);
  for (int i = 0; i < 2; ++i)
    for (Bundle s = 0; s <= 7; ++s) {
      double expected = 0.0;
      for (int j = 0; j < 3; ++j)
        if (s & (Bundle{1} << j)) expected = std::max(expected, random.at(i, j));
      CHECK(market.value(i, s) == expected);
    }
}

TEST_CASE("valuation: noiseless oracle returns exact values") {
  const UnitDemandMatrix matrix =
      gen_unit_demand(UdDistribution::Uniform, 3, 3, 13);
  NoisyOracle oracle(matrix, NoiseSpec{0.0}, 99);
  for (int rep = 0; rep < 5; ++rep)
    CHECK(oracle.sample(1, 0b010) == matrix.at(1, 1));
  CHECK(oracle.draws(1, 0b010) == 5);
  CHECK(oracle.total_draws() == 5);
}

TEST_CASE("valuation: noise support and stream bookkeeping") {
  const Market market = test::random_market(2, 2, 17);
  NoisyOracle oracle(market, NoiseSpec{0.5}, 7);
  NoisyOracle replay(market, NoiseSpec{0.5}, 7);
  for (int k = 0; k < 1000; ++k) {
    const double x = oracle.sample(1, 0b11);
    CHECK(x >= market.value(1, 0b11) - 0.5);
    CHECK(x <= market.value(1, 0b11) + 0.5);
    // sample_at addresses the same stream without advancing it.
    CHECK(x == replay.sample_at(1, 0b11, k));
  }
  CHECK(replay.total_draws() == 0);
  CHECK(oracle.base_value(1, 0b11) == market.value(1, 0b11));
  CHECK_THROWS_AS(oracle.sample(2, 1), DimensionMismatch);
}

TEST_CASE("valuation: cell streams are independent of sampling order") {
  const UnitDemandMatrix matrix =
      gen_unit_demand(UdDistribution::Uniform, 2, 2, 23);
  NoisyOracle ab(matrix, NoiseSpec{1.0}, 31);
  NoisyOracle interleaved(matrix, NoiseSpec{1.0}, 31);

  std::vector<double> a_first, b_first;
  for (int k = 0; k < 50; ++k) a_first.push_back(ab.sample(0, 0b01));
  for (int k = 0; k < 50; ++k) b_first.push_back(ab.sample(1, 0b10));

  std::vector<double> a_inter, b_inter;
  for (int k = 0; k < 50; ++k) {
    b_inter.push_back(interleaved.sample(1, 0b10));
    a_inter.push_back(interleaved.sample(0, 0b01));
  }
  CHECK(a_first == a_inter);
  CHECK(b_first == b_inter);
}

TEST_CASE("valuation: oracle means concentrate on the base market") {
  const UnitDemandMatrix matrix =
      gen_unit_demand(UdDistribution::Uniform, 5, 3, 67);
  NoisyOracle oracle(matrix, NoiseSpec{1.0}, 29);
  const int t = 100000;
  // Standard error of a mean of t U[-1,1] draws.
  const double se = 1.0 / std::sqrt(3.0 * t);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (int k = 0; k < t; ++k) sum += oracle.sample_at(i, Bundle{1} << j, k);
      const double dev =
          std::abs(sum / t - oracle.base_value(i, Bundle{1} << j));
      if (i == 0 && j == 0) CHECK(dev <= 3.0 * se);
      worst = std::max(worst, dev);
    }
  CHECK(worst <= 5.0 * se);
  // Monte-Carlo form of the expected-market identity at eps = 0.05.
  CHECK(worst <= 0.05);
}
