#include "celearn/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace celearn {

namespace {

void check_outcome_shape(const Market& market, const Outcome& outcome) {
  const auto& alloc = outcome.allocation;
  if (static_cast<int>(alloc.size()) != market.buyers())
    throw DimensionMismatch("allocation has " + std::to_string(alloc.size()) +
                            " entries for " + std::to_string(market.buyers()) +
                            " buyers");
  for (Bundle s : alloc)
    if (s > market.full_bundle())
      throw DimensionMismatch("allocated bundle out of range");
  if (!is_feasible(alloc))
    throw InfeasibleAllocation("allocated bundles overlap");
  const Pricing& p = outcome.pricing;
  if (p.goods() != market.goods())
    throw DimensionMismatch("pricing covers " + std::to_string(p.goods()) +
                            " goods, market has " +
                            std::to_string(market.goods()));
  if (p.kind() == Pricing::Kind::PerBuyerBundle &&
      p.buyers() != market.buyers())
    throw DimensionMismatch("bundle pricing buyer count mismatch");
}

}  // namespace

Market::Market(int num_buyers, int num_goods) : n_(num_buyers), m_(num_goods) {
  if (num_buyers < 0) throw DomainError("negative buyer count");
  if (num_goods < 0) throw DomainError("negative good count");
  if (num_goods > kMaxGoods)
    throw TooManyGoods("dense market capped at " + std::to_string(kMaxGoods) +
                       " goods, got " + std::to_string(num_goods));
  v_.assign(static_cast<std::size_t>(n_) << m_, 0.0);
}

void Market::check_pair(int buyer, Bundle s) const {
  if (buyer < 0 || buyer >= n_)
    throw DimensionMismatch("buyer index " + std::to_string(buyer) +
                            " out of range");
  if (s > full_bundle()) throw DimensionMismatch("bundle out of range");
}

void Market::set_value(int buyer, Bundle s, double v) {
  check_pair(buyer, s);
  if (!std::isfinite(v) || v < 0.0)
    throw DomainError("bundle values must be finite and nonnegative");
  if (s == 0 && v != 0.0)
    throw DomainError("the empty bundle is worth 0 by normalization");
  v_[index(buyer, s)] = v;
}

bool is_feasible(const Allocation& alloc) {
  Bundle used = 0;
  for (Bundle s : alloc) {
    if ((used & s) != 0) return false;
    used |= s;
  }
  return true;
}

double welfare(const Market& market, const Allocation& alloc) {
  if (static_cast<int>(alloc.size()) != market.buyers())
    throw DimensionMismatch("allocation size does not match buyer count");
  if (!is_feasible(alloc))
    throw InfeasibleAllocation("allocated bundles overlap");
  double total = 0.0;
  for (int i = 0; i < market.buyers(); ++i) total += market.value(i, alloc[i]);
  return total;
}

Pricing Pricing::linear(std::vector<double> prices) {
  if (prices.empty()) throw DomainError("linear pricing needs at least one good");
  for (double p : prices)
    if (!std::isfinite(p) || p < 0.0)
      throw DomainError("prices must be finite and nonnegative");
  Pricing out;
  out.kind_ = Kind::Linear;
  out.m_ = static_cast<int>(prices.size());
  out.linear_ = std::move(prices);
  return out;
}

Pricing Pricing::per_buyer_bundle(int num_buyers, int num_goods) {
  if (num_buyers < 1 || num_goods < 1 || num_goods > Market::kMaxGoods)
    throw DomainError("bad bundle pricing shape");
  Pricing out;
  out.kind_ = Kind::PerBuyerBundle;
  out.n_ = num_buyers;
  out.m_ = num_goods;
  out.table_.assign(static_cast<std::size_t>(num_buyers) << num_goods, 0.0);
  return out;
}

double Pricing::price(int buyer, Bundle s) const {
  if (kind_ == Kind::Linear) {
    double total = 0.0;
    Bundle rest = s;
    while (rest != 0) {
      int j = std::countr_zero(rest);
      if (j >= m_) throw DimensionMismatch("priced bundle out of range");
      total += linear_[j];
      rest &= rest - 1;
    }
    return total;
  }
  if (buyer < 0 || buyer >= n_)
    throw DimensionMismatch("buyer index out of range in pricing");
  if (s > (Bundle{1} << m_) - 1)
    throw DimensionMismatch("priced bundle out of range");
  return table_[(static_cast<std::size_t>(buyer) << m_) | s];
}

const std::vector<double>& Pricing::linear_prices() const {
  if (kind_ != Kind::Linear)
    throw DomainError("linear_prices on bundle pricing");
  return linear_;
}

void Pricing::set_price(int buyer, Bundle s, double p) {
  if (kind_ != Kind::PerBuyerBundle)
    throw DomainError("set_price only applies to bundle pricing");
  if (buyer < 0 || buyer >= n_ || s > (Bundle{1} << m_) - 1)
    throw DimensionMismatch("price entry out of range");
  if (!std::isfinite(p) || p < 0.0)
    throw DomainError("prices must be finite and nonnegative");
  if (s == 0 && p != 0.0)
    throw DomainError("the empty bundle is free by normalization");
  table_[(static_cast<std::size_t>(buyer) << m_) | s] = p;
}

IndexSet::IndexSet(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  for (const auto& [buyer, s] : pairs_)
    if (buyer < 0) throw DomainError("negative buyer index in index set");
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

IndexSet IndexSet::all_nonempty(int num_buyers, int num_goods) {
  if (num_goods > Market::kMaxGoods)
    throw TooManyGoods("index set over all bundles capped at m <= 20");
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(num_buyers)
                << num_goods);
  for (int i = 0; i < num_buyers; ++i)
    for (Bundle s = 1; s <= (Bundle{1} << num_goods) - 1; ++s)
      pairs.emplace_back(i, s);
  return IndexSet(std::move(pairs));
}

IndexSet IndexSet::singletons(int num_buyers, int num_goods) {
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(num_buyers) * num_goods);
  for (int i = 0; i < num_buyers; ++i)
    for (int j = 0; j < num_goods; ++j) pairs.emplace_back(i, Bundle{1} << j);
  return IndexSet(std::move(pairs));
}

bool IndexSet::contains(int buyer, Bundle s) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), Pair{buyer, s});
}

double market_distance(const Market& a, const Market& b, const IndexSet& idx) {
  if (!a.same_shape(b))
    throw IncompatibleMarkets("markets differ in buyer or good count");
  if (idx.empty()) throw EmptyIndexSet("distance over an empty index set");
  double worst = 0.0;
  for (const auto& [buyer, s] : idx.pairs())
    worst = std::max(worst, std::abs(a.value(buyer, s) - b.value(buyer, s)));
  return worst;
}

double um_violation(const Market& market, const Outcome& outcome) {
  check_outcome_shape(market, outcome);
  const Bundle full = market.full_bundle();
  double worst = 0.0;
  for (int i = 0; i < market.buyers(); ++i) {
    const Bundle held = outcome.allocation[i];
    const double attained =
        market.value(i, held) - outcome.pricing.price(i, held);
    double best = 0.0;  // T = empty bundle
    for (Bundle t = 1; t <= full; ++t)
      best = std::max(best, market.value(i, t) - outcome.pricing.price(i, t));
    worst = std::max(worst, best - attained);
  }
  return std::max(0.0, worst);
}

bool rm_holds(const Market& market, const Outcome& outcome) {
  check_outcome_shape(market, outcome);
  const int n = market.buyers();
  const int m = market.goods();
  Bundle allocated = 0;
  for (Bundle s : outcome.allocation) allocated |= s;

  if (outcome.pricing.kind() == Pricing::Kind::Linear) {
    // Revenue is maximized iff every positively priced good is sold.
    const auto& p = outcome.pricing.linear_prices();
    for (int j = 0; j < m; ++j)
      if (((allocated >> j) & 1u) == 0 && p[j] > kTol) return false;
    return true;
  }

  if (m > 12)
    throw EnumerationTooLarge(
        "bundle-pricing revenue check enumerates (n+1)^m allocations; m <= 12");
  double revenue = 0.0;
  for (int i = 0; i < n; ++i)
    revenue += outcome.pricing.price(i, outcome.allocation[i]);

  // Every feasible allocation is an assignment of each good to a buyer or
  // to nobody.
  std::vector<int> owner(m, -1);
  std::vector<Bundle> bundles(n, 0);
  double best = 0.0;
  while (true) {
    double rev = 0.0;
    for (int i = 0; i < n; ++i) rev += outcome.pricing.price(i, bundles[i]);
    best = std::max(best, rev);
    int g = 0;
    while (g < m) {
      if (owner[g] >= 0) bundles[owner[g]] &= ~(Bundle{1} << g);
      if (++owner[g] < n) {
        bundles[owner[g]] |= Bundle{1} << g;
        break;
      }
      owner[g] = -1;
      ++g;
    }
    if (g == m) break;
  }
  return revenue >= best - kTol;
}

bool is_approx_ce(const Market& market, const Outcome& outcome, double eps) {
  if (!(eps >= 0.0)) throw DomainError("eps must be nonnegative");
  return um_violation(market, outcome) <= eps + kTol &&
         rm_holds(market, outcome);
}

}  // namespace celearn
