#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "celearn/learning.hpp"
#include "celearn/valuation.hpp"

namespace celearn {

// Grid experiment over synthetic unit-demand markets. The same config and
// seed always reproduce byte-identical CSVs, independent of --threads.
struct ExperimentConfig {
  std::vector<UdDistribution> distributions;
  std::vector<int> buyer_counts;
  std::vector<int> good_counts;
  double noise_half_width = 1.0;
  std::vector<double> eps_list;
  int draws = 20;
  std::uint64_t seed = 1;
  double total_delta = 0.1;
  BoundMode bound_mode = BoundMode::TwoPass;
  std::string out_dir;  // empty: compute rows, write nothing
  int threads = 1;

  // n, m in {5, 10}, 20 draws; --full restores {5, 10, 15, 20} and 50.
  static ExperimentConfig desk_defaults();
  static ExperimentConfig full_defaults();

  void validate() const;
  double value_range_c() const { return 10.0 + noise_half_width; }
};

// One row per (draw, eps, pricing objective) for table1 and one per
// (draw, eps) for the efficiency heatmap. wall_time is bookkeeping only and
// never serialized; the manifest carries the run's total wall time.
struct ResultRow {
  std::string distribution;
  int n = 0;
  int m = 0;
  double eps = 0.0;
  int draw = 0;
  std::string objective;
  double um_loss = 0.0;
  std::int64_t ea_samples = 0;
  std::int64_t eap_samples = 0;
  double savings = 0.0;
  double eps_achieved = 0.0;
  double wall_time = 0.0;
};

// t(eps) at the full failure budget, then rounds [t/4, t/2, t, 2t] with the
// budget split evenly and no pruning cap.
Schedules build_doubling_schedule(double eps, double c, std::int64_t idx_size,
                                  double total_delta = 0.1);

// Per draw: generate a market, EA to each eps, Hungarian welfare of the
// empirical matrix, min- and max-revenue prices, UM-loss in ground truth.
// Writes table1.csv and manifest.json when out_dir is set.
std::vector<ResultRow> run_table1_experiment(const ExperimentConfig& config);

// Per (cell, eps, draw): EAP with the doubling schedule, then the EA sample
// count matched to the achieved radius; savings = 1 - eap/ea. Writes
// efficiency.csv, one heatmap grid CSV per (distribution, eps), and
// manifest.json when out_dir is set.
std::vector<ResultRow> run_sample_efficiency_experiment(
    const ExperimentConfig& config);

}  // namespace celearn
