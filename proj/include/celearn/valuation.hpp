#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "celearn/market.hpp"

namespace celearn {

// Unit-demand valuations: v_i(S) = max_{j in S} v_ij, stored as an n x m
// matrix of nonnegative singleton values.
struct UnitDemandMatrix {
  int n = 0;
  int m = 0;
  std::vector<double> v;  // row-major

  UnitDemandMatrix() = default;
  UnitDemandMatrix(int num_buyers, int num_goods);

  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * m + j]; }
  void set(int i, int j, double value);

  // Max over members of s; 0 for the empty bundle.
  double bundle_value(int i, Bundle s) const;
};

enum class UdDistribution {
  Uniform,
  PreferredGood,
  PreferredGoodDistinct,
  PreferredSubset,
};

std::string to_string(UdDistribution d);
UdDistribution ud_distribution_from_string(const std::string& name);

// Draw a unit-demand market. Identical (dist, n, m, seed) give identical
// matrices regardless of call order or thread count.
//   Uniform:               v_ij ~ U[0, 10)
//   PreferredGood:         j_i ~ U{1..m}, v_ij_i ~ U[0, 10),
//                          v_ik = v_ij_i / 2^k for k != j_i (k 1-based)
//   PreferredGoodDistinct: same, but the j_i form a random injection
//                          (requires n <= m)
//   PreferredSubset:       uniform random subset G_i; v_ij ~ U[0, 10) on G_i,
//                          0 elsewhere
UnitDemandMatrix gen_unit_demand(UdDistribution dist, int n, int m,
                                 std::uint64_t seed);

// Dense expansion via the unit-demand max rule (m <= 20).
Market unit_demand_to_market(const UnitDemandMatrix& matrix);

// Additive noise uniform on [-half_width, half_width]; samples are not
// clamped.
struct NoiseSpec {
  double half_width = 0.0;
};

// Noisy value oracle over a dense market or a unit-demand matrix. The draw
// stream of each (buyer, bundle) cell is counter-based and keyed by
// (seed, buyer, bundle, draw index), so it does not depend on the order in
// which cells are sampled.
class NoisyOracle {
 public:
  NoisyOracle(Market base, NoiseSpec noise, std::uint64_t seed);
  NoisyOracle(UnitDemandMatrix base, NoiseSpec noise, std::uint64_t seed);

  int buyers() const { return n_; }
  int goods() const { return m_; }
  bool unit_demand() const { return matrix_.has_value(); }
  const Market& market() const;
  const UnitDemandMatrix& matrix() const;
  const NoiseSpec& noise() const { return noise_; }

  // Next draw of the cell's stream.
  double sample(int buyer, Bundle s);
  // Draw at an explicit stream position; does not advance any counter.
  double sample_at(int buyer, Bundle s, std::uint64_t draw_index) const;

  // Ground truth, for audits and tests only; learners must not consult it.
  double base_value(int buyer, Bundle s) const;

  std::uint64_t draws(int buyer, Bundle s) const;
  std::uint64_t total_draws() const { return total_; }

 private:
  void check_pair(int buyer, Bundle s) const;

  std::optional<Market> market_;
  std::optional<UnitDemandMatrix> matrix_;
  NoiseSpec noise_;
  std::uint64_t seed_ = 0;
  int n_ = 0;
  int m_ = 0;
  std::uint64_t total_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counters_;
};

}  // namespace celearn
