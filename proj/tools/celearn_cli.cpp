// celearn command line: generate synthetic markets, solve welfare and CE
// prices, run the EA/EAP learners, evaluate UM-loss, and drive the grid
// experiments. Exit codes: 0 success, 1 config error, 2 cap violation,
// 3 solver failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "celearn/experiment.hpp"
#include "celearn/io.hpp"
#include "celearn/learning.hpp"
#include "celearn/metrics.hpp"
#include "celearn/pricing.hpp"
#include "celearn/rng.hpp"
#include "celearn/welfare.hpp"

namespace {

using namespace celearn;

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::string out_dir;
  int threads = 1;
  bool full = false;
};

// Loads either a dense market file or a unit-demand CSV; exactly one of the
// two paths must be set.
struct MarketInput {
  std::string market_path;
  std::string ud_path;

  void add_options(CLI::App* cmd, bool market_only = false) {
    auto* market = cmd->add_option("--market", market_path,
                                   "Dense market JSON file");
    if (market_only) {
      market->required();
      return;
    }
    auto* ud = cmd->add_option("--unit-demand", ud_path,
                               "Unit-demand matrix CSV file");
    market->excludes(ud);
  }

  bool unit_demand() const { return !ud_path.empty(); }

  void require_one() const {
    if (market_path.empty() == ud_path.empty())
      throw DomainError("give exactly one of --market and --unit-demand");
  }
};

Allocation parse_allocation(const std::string& text) {
  Allocation alloc;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ','))
    alloc.push_back(static_cast<Bundle>(std::stoul(cell)));
  return alloc;
}

void print_learn_result(const LearnResult& result, const GlobalOpts& global) {
  std::cout << learn_result_json(result);
  if (!global.out_dir.empty()) {
    std::filesystem::create_directories(global.out_dir);
    const std::filesystem::path dir(global.out_dir);
    save_learn_result(result, (dir / "learn_result.json").string());
    save_estimates_csv(result.estimates, (dir / "estimates.csv").string());
    std::cout << "wrote " << (dir / "learn_result.json").string() << " and "
              << (dir / "estimates.csv").string() << "\n";
  }
}

LearnResult single_round_result(const EaResult& round, double delta,
                                std::int64_t t) {
  LearnResult out;
  out.estimates.entries = round.estimates;
  out.eps_hat = round.eps_hat;
  out.delta_spent = delta;
  out.delta_budget = delta;
  out.iterations = 1;
  out.total_samples = t * static_cast<std::int64_t>(round.estimates.size());
  return out;
}

void add_generate(CLI::App& app, GlobalOpts& global) {
  auto* cmd = app.add_subcommand(
      "generate", "Draw a synthetic unit-demand market");
  cmd->fallthrough();
  auto dist = std::make_shared<std::string>("uniform");
  auto n = std::make_shared<int>(5);
  auto m = std::make_shared<int>(5);
  auto out = std::make_shared<std::string>();
  auto market_out = std::make_shared<std::string>();
  cmd->add_option("--dist", *dist,
                  "uniform | preferred-good | preferred-good-distinct | "
                  "preferred-subset")
      ->capture_default_str();
  cmd->add_option("--n", *n, "Buyers")->capture_default_str();
  cmd->add_option("--m", *m, "Goods")->capture_default_str();
  cmd->add_option("--out", *out, "Write the matrix CSV here (default stdout)");
  cmd->add_option("--market-out", *market_out,
                  "Also write the dense market JSON expansion");
  cmd->callback([&global, dist, n, m, out, market_out] {
    const UnitDemandMatrix matrix = gen_unit_demand(
        ud_distribution_from_string(*dist), *n, *m, global.seed);
    if (out->empty()) {
      for (int i = 0; i < matrix.n; ++i) {
        for (int j = 0; j < matrix.m; ++j)
          std::cout << (j ? "," : "") << format_double(matrix.at(i, j));
        std::cout << "\n";
      }
    } else {
      save_unit_demand_csv(matrix, *out);
      std::cout << "wrote " << *out << "\n";
    }
    if (!market_out->empty()) {
      save_market(unit_demand_to_market(matrix), *market_out);
      std::cout << "wrote " << *market_out << "\n";
    }
  });
}

void add_solve_welfare(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "solve-welfare", "Exact welfare maximization (winner determination)");
  cmd->fallthrough();
  auto input = std::make_shared<MarketInput>();
  input->add_options(cmd);
  cmd->callback([input] {
    input->require_one();
    WelfareResult result;
    if (input->unit_demand())
      result = max_welfare_unit_demand(load_unit_demand_csv(input->ud_path));
    else
      result = max_welfare_exact(load_market(input->market_path));
    std::cout << "welfare " << format_double(result.value) << "\n";
    std::cout << "allocation";
    for (Bundle s : result.allocation) std::cout << " " << s;
    std::cout << "\n";
  });
}

void add_solve_prices(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "solve-prices", "Linear CE prices for a welfare-maximizing allocation");
  cmd->fallthrough();
  auto input = std::make_shared<MarketInput>();
  input->add_options(cmd);
  auto alloc_text = std::make_shared<std::string>();
  auto objective = std::make_shared<std::string>("min-slack");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--allocation", *alloc_text,
                  "Comma separated bundle bitmasks, one per buyer")
      ->required();
  cmd->add_option("--objective", *objective, "min-slack | min-rev | max-rev")
      ->capture_default_str();
  cmd->add_option("--out", *out, "Write the outcome JSON here");
  cmd->callback([input, alloc_text, objective, out] {
    input->require_one();
    const Allocation alloc = parse_allocation(*alloc_text);
    const PriceObjective obj = price_objective_from_string(*objective);
    PriceSolution solution;
    int goods = 0;
    if (input->unit_demand()) {
      const UnitDemandMatrix matrix = load_unit_demand_csv(input->ud_path);
      solution = linear_ce_prices_unit_demand(matrix, alloc, obj);
      goods = matrix.m;
    } else {
      const Market market = load_market(input->market_path);
      solution = linear_ce_prices(market, alloc, obj);
      goods = market.goods();
    }
    std::cout << "prices";
    for (double p : solution.prices) std::cout << " " << format_double(p);
    std::cout << "\n";
    std::cout << "total_slack " << format_double(solution.total_slack) << "\n";
    for (const auto& [buyer, bundle, slack] : solution.per_pair_slack)
      if (slack > 1e-9)
        std::cout << "slack buyer=" << buyer + 1 << " bundle=" << bundle
                  << " " << format_double(slack) << "\n";
    if (!out->empty()) {
      save_outcome(Outcome{alloc, Pricing::linear(solution.prices)}, goods,
                   *out);
      std::cout << "wrote " << *out << "\n";
    }
  });
}

void add_run_ea(CLI::App& app, GlobalOpts& global) {
  auto* cmd = app.add_subcommand(
      "run-ea", "Elicitation algorithm: uniform sampling to a target radius");
  cmd->fallthrough();
  auto input = std::make_shared<MarketInput>();
  input->add_options(cmd);
  auto a = std::make_shared<double>(1.0);
  auto eps = std::make_shared<double>(0.0);
  auto delta = std::make_shared<double>(0.1);
  auto c = std::make_shared<double>(0.0);
  cmd->add_option("--noise-half-width", *a, "Uniform noise half width")
      ->capture_default_str();
  cmd->add_option("--eps", *eps, "Target Hoeffding radius")->required();
  cmd->add_option("--delta", *delta, "Failure probability")
      ->capture_default_str();
  cmd->add_option("--c", *c, "Value range bound")->required();
  cmd->callback([&global, input, a, eps, delta, c] {
    input->require_one();
    IndexSet idx;
    std::optional<NoisyOracle> oracle;
    if (input->unit_demand()) {
      const UnitDemandMatrix matrix = load_unit_demand_csv(input->ud_path);
      idx = IndexSet::singletons(matrix.n, matrix.m);
      oracle.emplace(matrix, NoiseSpec{*a}, global.seed);
    } else {
      const Market market = load_market(input->market_path);
      idx = IndexSet::all_nonempty(market.buyers(), market.goods());
      oracle.emplace(market, NoiseSpec{*a}, global.seed);
    }
    const std::int64_t t = invert_hoeffding_t(
        *c, static_cast<std::int64_t>(idx.size()), *delta, *eps);
    const EaResult result = ea(*oracle, idx, t, *delta, *c);
    print_learn_result(single_round_result(result, *delta, t), global);
  });
}

void add_run_eap(CLI::App& app, GlobalOpts& global) {
  auto* cmd = app.add_subcommand(
      "run-eap", "Elicitation with pruning over a sampling schedule");
  cmd->fallthrough();
  auto input = std::make_shared<MarketInput>();
  input->add_options(cmd);
  auto a = std::make_shared<double>(1.0);
  auto schedule = std::make_shared<std::vector<std::int64_t>>();
  auto deltas = std::make_shared<std::vector<double>>();
  auto budgets = std::make_shared<std::vector<std::string>>();
  auto mode = std::make_shared<std::string>("two-pass");
  auto target = std::make_shared<double>(0.0);
  auto c = std::make_shared<double>(0.0);
  cmd->add_option("--noise-half-width", *a, "Uniform noise half width")
      ->capture_default_str();
  cmd->add_option("--schedule", *schedule, "Samples per round t1,t2,..")
      ->required()
      ->delimiter(',');
  cmd->add_option("--deltas", *deltas, "Failure probabilities d1,d2,..")
      ->required()
      ->delimiter(',');
  cmd->add_option("--budgets", *budgets,
                  "Pruning budgets per round; u or -1 for unbounded")
      ->required()
      ->delimiter(',');
  cmd->add_option("--bound-mode", *mode, "exact | relaxed | two-pass")
      ->capture_default_str();
  cmd->add_option("--target-eps", *target, "Stop once the radius reaches this")
      ->capture_default_str();
  cmd->add_option("--c", *c, "Value range bound")->required();
  cmd->callback([&global, input, a, schedule, deltas, budgets, mode, target,
                 c] {
    input->require_one();
    Schedules schedules;
    schedules.sampling = *schedule;
    schedules.failure = *deltas;
    for (const std::string& b : *budgets)
      schedules.budgets.push_back(
          b == "u" || b == "unbounded" ? kUnboundedBudget : std::stoll(b));
    std::optional<NoisyOracle> oracle;
    if (input->unit_demand())
      oracle.emplace(load_unit_demand_csv(input->ud_path), NoiseSpec{*a},
                     global.seed);
    else
      oracle.emplace(load_market(input->market_path), NoiseSpec{*a},
                     global.seed);
    const LearnResult result = eap(*oracle, schedules, *c, *target,
                                   bound_mode_from_string(*mode));
    print_learn_result(result, global);
  });
}

void add_um_loss(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "um-loss", "Utility-maximization loss of an outcome in a truth market");
  cmd->fallthrough();
  auto truth = std::make_shared<std::string>();
  auto outcome_path = std::make_shared<std::string>();
  cmd->add_option("--truth", *truth, "Ground-truth market JSON")->required();
  cmd->add_option("--outcome", *outcome_path, "Outcome JSON")->required();
  cmd->callback([truth, outcome_path] {
    const Market market = load_market(*truth);
    const Outcome outcome = load_outcome(*outcome_path);
    const EvalReport report = evaluate_outcome(market, outcome);
    std::cout << "{\n  \"um_loss_per_buyer\": [";
    for (std::size_t i = 0; i < report.um_loss_per_buyer.size(); ++i)
      std::cout << (i ? ", " : "")
                << format_double(report.um_loss_per_buyer[i]);
    std::cout << "],\n  \"um_loss_market\": "
              << format_double(report.um_loss_market) << "\n}\n";
  });
}

void add_experiment(CLI::App& app, GlobalOpts& global) {
  auto* cmd = app.add_subcommand("experiment", "Grid experiments over "
                                               "synthetic markets");
  cmd->require_subcommand(1);
  cmd->fallthrough();

  auto dists = std::make_shared<std::vector<std::string>>();
  auto draws = std::make_shared<int>(0);
  auto a = std::make_shared<double>(1.0);
  auto eps_list = std::make_shared<std::vector<double>>();
  auto mode = std::make_shared<std::string>("two-pass");

  auto make_config = [&global, dists, draws, a, eps_list,
                      mode](const std::string& name) {
    ExperimentConfig config = global.full
                                  ? ExperimentConfig::full_defaults()
                                  : ExperimentConfig::desk_defaults();
    config.seed = global.seed;
    config.threads = global.threads;
    config.noise_half_width = *a;
    config.bound_mode = bound_mode_from_string(*mode);
    if (*draws > 0) config.draws = *draws;
    if (!eps_list->empty()) config.eps_list = *eps_list;
    if (!dists->empty()) {
      config.distributions.clear();
      for (const std::string& d : *dists)
        config.distributions.push_back(ud_distribution_from_string(d));
    }
    config.out_dir = global.out_dir.empty()
                         ? (std::filesystem::path("results") / name).string()
                         : global.out_dir;
    return config;
  };

  for (auto* sub : {cmd->add_subcommand("table1",
                                        "EA + CE prices, UM-loss in truth"),
                    cmd->add_subcommand("heatmap",
                                        "EAP vs EA sample efficiency")}) {
    sub->fallthrough();
    sub->add_option("--dist", *dists, "Restrict to these distributions")
        ->delimiter(',');
    sub->add_option("--draws", *draws, "Markets per grid cell");
    sub->add_option("--noise-half-width", *a, "Uniform noise half width")
        ->capture_default_str();
    sub->add_option("--eps", *eps_list, "Guarantee targets")->delimiter(',');
    sub->add_option("--bound-mode", *mode, "exact | relaxed | two-pass")
        ->capture_default_str();
  }

  cmd->get_subcommand("table1")->callback([make_config] {
    const ExperimentConfig config = make_config("table1");
    const auto rows = run_table1_experiment(config);
    std::cout << "wrote " << config.out_dir << " (" << rows.size()
              << " rows)\n";
  });
  cmd->get_subcommand("heatmap")->callback([make_config] {
    const ExperimentConfig config = make_config("heatmap");
    const auto rows = run_sample_efficiency_experiment(config);
    std::cout << "wrote " << config.out_dir << " (" << rows.size()
              << " rows)\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning competitive equilibria of combinatorial markets "
               "from noisy value queries"};
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--seed", global.seed, "Master RNG seed")
      ->capture_default_str();
  app.add_option("--out-dir", global.out_dir, "Directory for result files");
  app.add_option("--threads", global.threads, "Worker threads")
      ->capture_default_str();
  app.add_flag("--full", global.full,
               "Full experiment grid instead of the desk-scale default");

  add_generate(app, global);
  add_solve_welfare(app);
  add_solve_prices(app);
  add_run_ea(app, global);
  add_run_eap(app, global);
  add_um_loss(app);
  add_experiment(app, global);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const CapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
