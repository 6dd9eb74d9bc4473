#include "celearn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "celearn/io.hpp"
#include "celearn/metrics.hpp"
#include "celearn/pricing.hpp"
#include "celearn/rng.hpp"
#include "celearn/welfare.hpp"
#include "json.hpp"

namespace celearn {

namespace {

constexpr std::uint64_t kTable1Tag = 0x7431;
constexpr std::uint64_t kHeatmapTag = 0x686d;

std::uint64_t task_seed(const ExperimentConfig& config, std::uint64_t exp_tag,
                        UdDistribution dist, int n, int m, int extra,
                        int draw) {
  std::uint64_t s = derive_seed(config.seed, exp_tag);
  s = derive_seed(s, static_cast<std::uint64_t>(dist));
  s = derive_seed(s, static_cast<std::uint64_t>(n));
  s = derive_seed(s, static_cast<std::uint64_t>(m));
  s = derive_seed(s, static_cast<std::uint64_t>(extra));
  return derive_seed(s, static_cast<std::uint64_t>(draw));
}

bool cell_defined(UdDistribution dist, int n, int m) {
  return dist != UdDistribution::PreferredGoodDistinct || n <= m;
}

// Runs fn(0..count-1) across the requested workers; any exception is
// rethrown on the caller's thread after the pool drains.
void run_tasks(int threads, int count, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// EA means can dip below 0 under noise; clamping keeps the matrix valid and
// never moves an estimate away from the nonnegative truth.
UnitDemandMatrix clamped_matrix(const std::map<PairKey, Estimate>& estimates,
                                int n, int m) {
  UnitDemandMatrix matrix(n, m);
  for (const auto& [key, est] : estimates) {
    const int j = std::countr_zero(key.bundle);
    matrix.set(key.buyer, j, std::max(0.0, est.mean));
  }
  return matrix;
}

std::string csv_row(const ResultRow& row, bool table1) {
  std::string out = row.distribution;
  out += ',';
  out += std::to_string(row.n);
  out += ',';
  out += std::to_string(row.m);
  out += ',';
  out += format_double(row.eps);
  out += ',';
  out += std::to_string(row.draw);
  if (table1) {
    out += ',';
    out += row.objective;
    out += ',';
    out += format_double(row.um_loss);
  }
  out += ',';
  out += std::to_string(row.ea_samples);
  out += ',';
  out += std::to_string(row.eap_samples);
  if (!table1) {
    out += ',';
    out += format_double(row.savings);
  }
  out += ',';
  out += format_double(row.eps_achieved);
  out += '\n';
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_tag(const std::string& text) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

nlohmann::ordered_json config_echo(const ExperimentConfig& config) {
  nlohmann::ordered_json out;
  auto& dists = out["distributions"] = nlohmann::ordered_json::array();
  for (UdDistribution d : config.distributions) dists.push_back(to_string(d));
  out["buyer_counts"] = config.buyer_counts;
  out["good_counts"] = config.good_counts;
  out["noise_half_width"] = config.noise_half_width;
  out["eps_list"] = config.eps_list;
  out["draws"] = config.draws;
  out["seed"] = config.seed;
  out["total_delta"] = config.total_delta;
  out["bound_mode"] = to_string(config.bound_mode);
  out["threads"] = config.threads;
  return out;
}

// Writes every named file plus a manifest with per-file content hashes. The
// manifest is the only output carrying wall time, so result CSVs stay
// byte-identical across reruns and thread counts.
void write_outputs(const ExperimentConfig& config, const std::string& name,
                   const std::vector<std::pair<std::string, std::string>>& files,
                   double wall_seconds) {
  if (config.out_dir.empty()) return;
  std::filesystem::create_directories(config.out_dir);
  nlohmann::ordered_json manifest;
  manifest["experiment"] = name;
  manifest["config"] = config_echo(config);
  auto& hashes = manifest["files"] = nlohmann::ordered_json::object();
  for (const auto& [file_name, content] : files) {
    const auto path = std::filesystem::path(config.out_dir) / file_name;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    hashes[file_name] = hash_tag(content);
  }
  manifest["wall_time_seconds"] = wall_seconds;
  const auto path = std::filesystem::path(config.out_dir) / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
}

}  // namespace

ExperimentConfig ExperimentConfig::desk_defaults() {
  ExperimentConfig config;
  config.distributions = {
      UdDistribution::Uniform, UdDistribution::PreferredGood,
      UdDistribution::PreferredGoodDistinct, UdDistribution::PreferredSubset};
  config.buyer_counts = {5, 10};
  config.good_counts = {5, 10};
  config.eps_list = {0.05, 0.1, 0.15, 0.2};
  config.draws = 20;
  return config;
}

ExperimentConfig ExperimentConfig::full_defaults() {
  ExperimentConfig config = desk_defaults();
  config.buyer_counts = {5, 10, 15, 20};
  config.good_counts = {5, 10, 15, 20};
  config.draws = 50;
  return config;
}

void ExperimentConfig::validate() const {
  if (distributions.empty() || buyer_counts.empty() || good_counts.empty() ||
      eps_list.empty())
    throw DomainError("experiment grid must be nonempty");
  for (int n : buyer_counts)
    if (n < 1) throw DomainError("buyer counts must be >= 1");
  for (int m : good_counts)
    if (m < 1 || m > 31) throw DomainError("good counts must be in [1, 31]");
  if (!(noise_half_width > 0.0))
    throw DomainError("noise half-width must be positive");
  for (double eps : eps_list)
    if (!(eps > 0.0)) throw DomainError("eps targets must be positive");
  if (draws < 1) throw DomainError("need at least one draw");
  if (!(total_delta > 0.0 && total_delta < 1.0))
    throw DomainError("total_delta must lie in (0, 1)");
  if (threads < 1) throw DomainError("need at least one thread");
}

Schedules build_doubling_schedule(double eps, double c, std::int64_t idx_size,
                                  double total_delta) {
  const std::int64_t t = invert_hoeffding_t(c, idx_size, total_delta, eps);
  Schedules out;
  out.sampling = {std::max<std::int64_t>(1, std::llround(t / 4.0)),
                  std::max<std::int64_t>(1, std::llround(t / 2.0)), t, 2 * t};
  for (std::size_t k = 1; k < out.sampling.size(); ++k)
    if (out.sampling[k] <= out.sampling[k - 1])
      out.sampling[k] = out.sampling[k - 1] + 1;
  out.failure.assign(4, total_delta / 4.0);
  out.budgets.assign(4, kUnboundedBudget);
  out.validate();
  return out;
}

std::vector<ResultRow> run_table1_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  struct Task {
    UdDistribution dist;
    int n, m, draw;
  };
  std::vector<Task> tasks;
  for (UdDistribution dist : config.distributions)
    for (int n : config.buyer_counts)
      for (int m : config.good_counts) {
        if (!cell_defined(dist, n, m)) continue;
        for (int d = 0; d < config.draws; ++d) tasks.push_back({dist, n, m, d});
      }

  std::vector<std::vector<ResultRow>> slots(tasks.size());
  run_tasks(config.threads, static_cast<int>(tasks.size()), [&](int ti) {
    const Task& task = tasks[ti];
    const std::uint64_t seed =
        task_seed(config, kTable1Tag, task.dist, task.n, task.m, 0, task.draw);
    const UnitDemandMatrix truth =
        gen_unit_demand(task.dist, task.n, task.m, derive_seed(seed, 0));
    NoisyOracle oracle(truth, NoiseSpec{config.noise_half_width},
                       derive_seed(seed, 1));
    const double c = config.value_range_c();
    const std::int64_t idx_size =
        static_cast<std::int64_t>(task.n) * task.m;
    const auto wall0 = std::chrono::steady_clock::now();
    for (double eps : config.eps_list) {
      const std::int64_t t =
          invert_hoeffding_t(c, idx_size, config.total_delta, eps);
      const EaResult learned =
          ea(oracle, IndexSet::singletons(task.n, task.m), t,
             config.total_delta, c);
      const UnitDemandMatrix empirical =
          clamped_matrix(learned.estimates, task.n, task.m);
      const WelfareResult welfare = max_welfare_unit_demand(empirical);
      for (PriceObjective objective :
           {PriceObjective::MinRevenue, PriceObjective::MaxRevenue}) {
        const PriceSolution prices = linear_ce_prices_unit_demand(
            empirical, welfare.allocation, objective);
        const std::vector<double> losses =
            um_loss_unit_demand(truth, welfare.allocation, prices.prices);
        ResultRow row;
        row.distribution = to_string(task.dist);
        row.n = task.n;
        row.m = task.m;
        row.eps = eps;
        row.draw = task.draw;
        row.objective = to_string(objective);
        row.um_loss = *std::max_element(losses.begin(), losses.end());
        row.ea_samples = t * idx_size;
        row.eps_achieved = learned.eps_hat;
        row.wall_time = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - wall0)
                            .count();
        slots[ti].push_back(std::move(row));
      }
    }
  });

  std::vector<ResultRow> rows;
  for (auto& slot : slots)
    for (auto& row : slot) rows.push_back(std::move(row));

  std::string csv =
      "distribution,n,m,eps,draw,objective,um_loss,ea_samples,eap_samples,"
      "eps_achieved\n";
  for (const ResultRow& row : rows) csv += csv_row(row, true);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  write_outputs(config, "table1", {{"table1.csv", csv}}, wall);
  return rows;
}

std::vector<ResultRow> run_sample_efficiency_experiment(
    const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  struct Task {
    UdDistribution dist;
    int n, m, eps_index, draw;
  };
  std::vector<Task> tasks;
  for (UdDistribution dist : config.distributions)
    for (int n : config.buyer_counts)
      for (int m : config.good_counts) {
        if (!cell_defined(dist, n, m)) continue;
        for (int e = 0; e < static_cast<int>(config.eps_list.size()); ++e)
          for (int d = 0; d < config.draws; ++d)
            tasks.push_back({dist, n, m, e, d});
      }

  std::vector<ResultRow> slots(tasks.size());
  run_tasks(config.threads, static_cast<int>(tasks.size()), [&](int ti) {
    const Task& task = tasks[ti];
    const std::uint64_t seed = task_seed(config, kHeatmapTag, task.dist,
                                         task.n, task.m, task.eps_index,
                                         task.draw);
    const double eps = config.eps_list[task.eps_index];
    const UnitDemandMatrix truth =
        gen_unit_demand(task.dist, task.n, task.m, derive_seed(seed, 0));
    NoisyOracle oracle(truth, NoiseSpec{config.noise_half_width},
                       derive_seed(seed, 1));
    const double c = config.value_range_c();
    const std::int64_t idx_size =
        static_cast<std::int64_t>(task.n) * task.m;
    const auto wall0 = std::chrono::steady_clock::now();

    const Schedules schedule =
        build_doubling_schedule(eps, c, idx_size, config.total_delta);
    const LearnResult learned =
        eap(oracle, schedule, c, eps, config.bound_mode);
    // Samples EA would need for the radius EAP actually achieved, at the
    // same total failure budget.
    const std::int64_t ea_samples =
        invert_hoeffding_t(c, idx_size, config.total_delta, learned.eps_hat) *
        idx_size;

    ResultRow row;
    row.distribution = to_string(task.dist);
    row.n = task.n;
    row.m = task.m;
    row.eps = eps;
    row.draw = task.draw;
    row.ea_samples = ea_samples;
    row.eap_samples = learned.total_samples;
    row.savings = sample_efficiency(ea_samples, learned.total_samples);
    row.eps_achieved = learned.eps_hat;
    row.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - wall0)
                        .count();
    slots[ti] = std::move(row);
  });

  std::string csv =
      "distribution,n,m,eps,draw,ea_samples,eap_samples,savings,"
      "eps_achieved\n";
  for (const ResultRow& row : slots) csv += csv_row(row, false);

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("efficiency.csv", std::move(csv));

  // One grid per (distribution, eps): rows over n, columns over m, cell =
  // mean savings across draws; undefined cells stay blank.
  for (UdDistribution dist : config.distributions)
    for (int e = 0; e < static_cast<int>(config.eps_list.size()); ++e) {
      std::string grid = "n/m";
      for (int m : config.good_counts) {
        grid += ',';
        grid += std::to_string(m);
      }
      grid += '\n';
      for (int n : config.buyer_counts) {
        grid += std::to_string(n);
        for (int m : config.good_counts) {
          grid += ',';
          if (!cell_defined(dist, n, m)) continue;
          double sum = 0.0;
          int count = 0;
          for (const ResultRow& row : slots)
            if (row.distribution == to_string(dist) && row.n == n &&
                row.m == m && row.eps == config.eps_list[e]) {
              sum += row.savings;
              ++count;
            }
          if (count > 0) grid += format_double(sum / count);
        }
        grid += '\n';
      }
      files.emplace_back("heatmap_" + to_string(dist) + "_eps" +
                             format_double(config.eps_list[e]) + ".csv",
                         std::move(grid));
    }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  write_outputs(config, "sample-efficiency", files, wall);

  std::vector<ResultRow> rows(slots.begin(), slots.end());
  return rows;
}

}  // namespace celearn
