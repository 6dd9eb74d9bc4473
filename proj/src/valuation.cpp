#include "celearn/valuation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "celearn/rng.hpp"

namespace celearn {

UnitDemandMatrix::UnitDemandMatrix(int num_buyers, int num_goods)
    : n(num_buyers), m(num_goods) {
  if (n < 1 || m < 1)
    throw DomainError("unit-demand matrix needs n >= 1 and m >= 1");
  v.assign(static_cast<std::size_t>(n) * m, 0.0);
}

void UnitDemandMatrix::set(int i, int j, double value) {
  if (i < 0 || i >= n || j < 0 || j >= m)
    throw DimensionMismatch("matrix entry out of range");
  if (!std::isfinite(value) || value < 0.0)
    throw DomainError("singleton values must be finite and nonnegative");
  v[static_cast<std::size_t>(i) * m + j] = value;
}

double UnitDemandMatrix::bundle_value(int i, Bundle s) const {
  if (i < 0 || i >= n) throw DimensionMismatch("buyer index out of range");
  if (m < 32 && s > (Bundle{1} << m) - 1)
    throw DimensionMismatch("bundle out of range");
  double best = 0.0;
  Bundle rest = s;
  while (rest != 0) {
    int j = std::countr_zero(rest);
    best = std::max(best, at(i, j));
    rest &= rest - 1;
  }
  return best;
}

std::string to_string(UdDistribution d) {
  switch (d) {
    case UdDistribution::Uniform:
      return "uniform";
    case UdDistribution::PreferredGood:
      return "preferred-good";
    case UdDistribution::PreferredGoodDistinct:
      return "preferred-good-distinct";
    case UdDistribution::PreferredSubset:
      return "preferred-subset";
  }
  throw DomainError("unknown distribution");
}

UdDistribution ud_distribution_from_string(const std::string& name) {
  if (name == "uniform") return UdDistribution::Uniform;
  if (name == "preferred-good") return UdDistribution::PreferredGood;
  if (name == "preferred-good-distinct")
    return UdDistribution::PreferredGoodDistinct;
  if (name == "preferred-subset") return UdDistribution::PreferredSubset;
  throw ParseError("unknown distribution '" + name + "'");
}

namespace {

// Preferred value decays by the literal 1-based good index: v_ik = p / 2^k.
void fill_preferred_row(UnitDemandMatrix& out, int i, int preferred, double p) {
  for (int k = 0; k < out.m; ++k)
    out.set(i, k, k == preferred ? p : p / std::ldexp(1.0, k + 1));
}

}  // namespace

UnitDemandMatrix gen_unit_demand(UdDistribution dist, int n, int m,
                                 std::uint64_t seed) {
  UnitDemandMatrix out(n, m);
  SplitMix64 rng(derive_seed(seed, 0x75640000u + static_cast<int>(dist)));
  switch (dist) {
    case UdDistribution::Uniform:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) out.set(i, j, 10.0 * rng.u01());
      break;
    case UdDistribution::PreferredGood:
      for (int i = 0; i < n; ++i) {
        int j = rng.uniform_int(m);
        fill_preferred_row(out, i, j, 10.0 * rng.u01());
      }
      break;
    case UdDistribution::PreferredGoodDistinct: {
      if (n > m)
        throw InvalidDistinct(
            "distinct preferred goods need n <= m, got n = " +
            std::to_string(n) + ", m = " + std::to_string(m));
      // First n entries of a uniform random permutation of the goods.
      std::vector<int> perm(m);
      std::iota(perm.begin(), perm.end(), 0);
      for (int j = m - 1; j > 0; --j)
        std::swap(perm[j], perm[rng.uniform_int(j + 1)]);
      for (int i = 0; i < n; ++i)
        fill_preferred_row(out, i, perm[i], 10.0 * rng.u01());
      break;
    }
    case UdDistribution::PreferredSubset:
      for (int i = 0; i < n; ++i) {
        // Membership coin per good gives a uniform random subset.
        std::vector<bool> member(m);
        for (int j = 0; j < m; ++j) member[j] = rng.coin();
        for (int j = 0; j < m; ++j)
          if (member[j]) out.set(i, j, 10.0 * rng.u01());
      }
      break;
  }
  return out;
}

Market unit_demand_to_market(const UnitDemandMatrix& matrix) {
  if (matrix.m > Market::kMaxGoods)
    throw TooManyGoods("dense expansion capped at m <= " +
                       std::to_string(Market::kMaxGoods));
  Market out(matrix.n, matrix.m);
  const Bundle full = out.full_bundle();
  for (int i = 0; i < matrix.n; ++i) {
    // Expand by the max rule, reusing v(S without its lowest good).
    for (Bundle s = 1; s <= full; ++s) {
      int j = std::countr_zero(s);
      double rest = s == (Bundle{1} << j) ? 0.0 : out.value(i, s & (s - 1));
      out.set_value(i, s, std::max(rest, matrix.at(i, j)));
    }
  }
  return out;
}

NoisyOracle::NoisyOracle(Market base, NoiseSpec noise, std::uint64_t seed)
    : market_(std::move(base)), noise_(noise), seed_(seed) {
  if (!(noise.half_width >= 0.0) || !std::isfinite(noise.half_width))
    throw DomainError("noise half-width must be finite and nonnegative");
  n_ = market_->buyers();
  m_ = market_->goods();
}

NoisyOracle::NoisyOracle(UnitDemandMatrix base, NoiseSpec noise,
                         std::uint64_t seed)
    : matrix_(std::move(base)), noise_(noise), seed_(seed) {
  if (!(noise.half_width >= 0.0) || !std::isfinite(noise.half_width))
    throw DomainError("noise half-width must be finite and nonnegative");
  n_ = matrix_->n;
  m_ = matrix_->m;
}

const Market& NoisyOracle::market() const {
  if (!market_) throw DomainError("oracle has no dense market base");
  return *market_;
}

const UnitDemandMatrix& NoisyOracle::matrix() const {
  if (!matrix_) throw DomainError("oracle has no unit-demand base");
  return *matrix_;
}

void NoisyOracle::check_pair(int buyer, Bundle s) const {
  if (buyer < 0 || buyer >= n_)
    throw DimensionMismatch("buyer index out of range");
  if (m_ < 32 && s > (Bundle{1} << m_) - 1)
    throw DimensionMismatch("bundle out of range");
}

double NoisyOracle::base_value(int buyer, Bundle s) const {
  check_pair(buyer, s);
  return market_ ? market_->value(buyer, s) : matrix_->bundle_value(buyer, s);
}

double NoisyOracle::sample_at(int buyer, Bundle s,
                              std::uint64_t draw_index) const {
  const double u = stream_u01(pair_stream_key(seed_, buyer, s), draw_index);
  return base_value(buyer, s) + noise_.half_width * (2.0 * u - 1.0);
}

double NoisyOracle::sample(int buyer, Bundle s) {
  check_pair(buyer, s);
  const std::uint64_t cell =
      (static_cast<std::uint64_t>(buyer) << 32) | s;
  std::uint64_t& counter = counters_[cell];
  ++total_;
  return sample_at(buyer, s, counter++);
}

std::uint64_t NoisyOracle::draws(int buyer, Bundle s) const {
  check_pair(buyer, s);
  auto it = counters_.find((static_cast<std::uint64_t>(buyer) << 32) | s);
  return it == counters_.end() ? 0 : it->second;
}

}  // namespace celearn
