#pragma once

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "celearn/errors.hpp"

namespace celearn {

// A bundle of goods as a bitmask: good j (1-based) occupies bit j-1.
using Bundle = std::uint32_t;

inline int bundle_size(Bundle s) { return std::popcount(s); }

// Absolute tolerance for equality / inequality checks on values and prices.
inline constexpr double kTol = 1e-9;

// Combinatorial market: n buyers with a value for every bundle of m goods.
// Values are stored densely, so explicit markets are capped at m <= 20.
class Market {
 public:
  static constexpr int kMaxGoods = 20;

  // Degenerate shapes (0 buyers or 0 goods) are allowed so that submarkets
  // are always representable; file loaders insist on n >= 1 and m >= 1.
  Market() = default;
  Market(int num_buyers, int num_goods);

  int buyers() const { return n_; }
  int goods() const { return m_; }
  Bundle full_bundle() const { return (Bundle{1} << m_) - 1; }

  double value(int buyer, Bundle s) const {
    check_pair(buyer, s);
    return v_[index(buyer, s)];
  }

  // Values must be finite and nonnegative; the empty bundle stays at 0.
  void set_value(int buyer, Bundle s, double v);

  bool same_shape(const Market& other) const {
    return n_ == other.n_ && m_ == other.m_;
  }

 private:
  std::size_t index(int buyer, Bundle s) const {
    return (static_cast<std::size_t>(buyer) << m_) | s;
  }
  void check_pair(int buyer, Bundle s) const;

  int n_ = 0;
  int m_ = 0;
  std::vector<double> v_;
};

// One bundle per buyer; the empty bundle means the buyer gets nothing.
using Allocation = std::vector<Bundle>;

// Pairwise disjointness of the allocated bundles.
bool is_feasible(const Allocation& alloc);

// Sum of buyer values at a feasible allocation.
double welfare(const Market& market, const Allocation& alloc);

// Linear per-good prices or an explicit per-(buyer, bundle) price table.
class Pricing {
 public:
  enum class Kind { Linear, PerBuyerBundle };

  static Pricing linear(std::vector<double> prices);
  static Pricing per_buyer_bundle(int num_buyers, int num_goods);

  Kind kind() const { return kind_; }
  int goods() const { return m_; }
  int buyers() const { return n_; }  // -1 for linear pricing

  double price(int buyer, Bundle s) const;
  const std::vector<double>& linear_prices() const;

  // PerBuyerBundle only; prices must be finite and nonnegative.
  void set_price(int buyer, Bundle s, double p);

 private:
  Pricing() = default;

  Kind kind_ = Kind::Linear;
  int n_ = -1;
  int m_ = 0;
  std::vector<double> linear_;
  std::vector<double> table_;  // [buyer << m | bundle]
};

struct Outcome {
  Allocation allocation;
  Pricing pricing;
};

// Explicit set of (buyer, bundle) pairs, kept sorted and unique.
class IndexSet {
 public:
  using Pair = std::pair<int, Bundle>;

  IndexSet() = default;
  explicit IndexSet(std::vector<Pair> pairs);

  // All (buyer, nonempty bundle) pairs.
  static IndexSet all_nonempty(int num_buyers, int num_goods);
  // All (buyer, singleton) pairs.
  static IndexSet singletons(int num_buyers, int num_goods);

  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool contains(int buyer, Bundle s) const;

 private:
  std::vector<Pair> pairs_;
};

// Sup distance max_{(i,S) in idx} |v_i(S) - v'_i(S)|.
double market_distance(const Market& a, const Market& b, const IndexSet& idx);

// Worst utility-maximization violation over buyers and deviation bundles,
// clamped below at 0.
double um_violation(const Market& market, const Outcome& outcome);

// Revenue maximization: no feasible allocation earns more under the
// outcome's pricing. Linear pricing reduces to "unallocated goods are free";
// bundle pricing enumerates allocations and is capped at m <= 12.
bool rm_holds(const Market& market, const Outcome& outcome);

// eps-approximate competitive equilibrium: UM within eps, RM exact.
bool is_approx_ce(const Market& market, const Outcome& outcome, double eps);

}  // namespace celearn
