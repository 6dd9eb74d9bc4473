// Python bindings for the celearn core: markets, welfare and pricing
// solvers, the EA/EAP learners, metrics, file IO, and the grid experiments.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "celearn/experiment.hpp"
#include "celearn/io.hpp"
#include "celearn/learning.hpp"
#include "celearn/market.hpp"
#include "celearn/metrics.hpp"
#include "celearn/pricing.hpp"
#include "celearn/valuation.hpp"
#include "celearn/welfare.hpp"

namespace py = pybind11;

using namespace celearn;

namespace {

// Flat (buyer, bundle, estimate) triples; keeps dict handling out of the
// binding layer.
std::vector<std::tuple<int, Bundle, Estimate>> estimate_items(
    const std::map<PairKey, Estimate>& entries) {
  std::vector<std::tuple<int, Bundle, Estimate>> out;
  out.reserve(entries.size());
  for (const auto& [key, est] : entries)
    out.emplace_back(key.buyer, key.bundle, est);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Learning competitive equilibria of combinatorial markets "
            "from noisy value queries";
  m.attr("__version__") = "0.1.0";
  m.attr("UNBOUNDED_BUDGET") = kUnboundedBudget;
  m.attr("MAX_GOODS") = Market::kMaxGoods;

  py::class_<Market>(m, "Market")
      .def(py::init<int, int>(), py::arg("buyers"), py::arg("goods"))
      .def_property_readonly("buyers", &Market::buyers)
      .def_property_readonly("goods", &Market::goods)
      .def("full_bundle", &Market::full_bundle)
      .def("value", &Market::value, py::arg("buyer"), py::arg("bundle"))
      .def("set_value", &Market::set_value, py::arg("buyer"),
           py::arg("bundle"), py::arg("value"))
      .def("same_shape", &Market::same_shape)
      .def("__repr__", [](const Market& market) {
        return "Market(buyers=" + std::to_string(market.buyers()) +
               ", goods=" + std::to_string(market.goods()) + ")";
      });

  py::class_<Pricing>(m, "Pricing")
      .def_static("linear", &Pricing::linear, py::arg("prices"))
      .def_static("per_buyer_bundle", &Pricing::per_buyer_bundle,
                  py::arg("buyers"), py::arg("goods"))
      .def_property_readonly("goods", &Pricing::goods)
      .def_property_readonly("buyers", &Pricing::buyers)
      .def_property_readonly("is_linear", [](const Pricing& pricing) {
        return pricing.kind() == Pricing::Kind::Linear;
      })
      .def("price", &Pricing::price, py::arg("buyer"), py::arg("bundle"))
      .def("linear_prices", &Pricing::linear_prices)
      .def("set_price", &Pricing::set_price, py::arg("buyer"),
           py::arg("bundle"), py::arg("price"));

  py::class_<Outcome>(m, "Outcome")
      .def(py::init([](Allocation allocation, Pricing pricing) {
             return Outcome{std::move(allocation), std::move(pricing)};
           }),
           py::arg("allocation"), py::arg("pricing"))
      .def_readwrite("allocation", &Outcome::allocation)
      .def_readwrite("pricing", &Outcome::pricing);

  py::class_<IndexSet>(m, "IndexSet")
      .def(py::init<std::vector<IndexSet::Pair>>(), py::arg("pairs"))
      .def_static("all_nonempty", &IndexSet::all_nonempty, py::arg("buyers"),
                  py::arg("goods"))
      .def_static("singletons", &IndexSet::singletons, py::arg("buyers"),
                  py::arg("goods"))
      .def("pairs", &IndexSet::pairs)
      .def("contains", &IndexSet::contains, py::arg("buyer"),
           py::arg("bundle"))
      .def("__len__", &IndexSet::size);

  m.def("bundle_size", &bundle_size, py::arg("bundle"));
  m.def("is_feasible", &is_feasible, py::arg("allocation"));
  m.def("welfare", &welfare, py::arg("market"), py::arg("allocation"));
  m.def("market_distance", &market_distance, py::arg("a"), py::arg("b"),
        py::arg("index_set"));
  m.def("um_violation", &um_violation, py::arg("market"), py::arg("outcome"));
  m.def("rm_holds", &rm_holds, py::arg("market"), py::arg("outcome"));
  m.def("is_approx_ce", &is_approx_ce, py::arg("market"), py::arg("outcome"),
        py::arg("eps"));

  py::enum_<UdDistribution>(m, "UdDistribution")
      .value("Uniform", UdDistribution::Uniform)
      .value("PreferredGood", UdDistribution::PreferredGood)
      .value("PreferredGoodDistinct", UdDistribution::PreferredGoodDistinct)
      .value("PreferredSubset", UdDistribution::PreferredSubset);

  py::class_<UnitDemandMatrix>(m, "UnitDemandMatrix")
      .def(py::init<int, int>(), py::arg("buyers"), py::arg("goods"))
      .def_readonly("n", &UnitDemandMatrix::n)
      .def_readonly("m", &UnitDemandMatrix::m)
      .def("at", &UnitDemandMatrix::at, py::arg("buyer"), py::arg("good"))
      .def("set", &UnitDemandMatrix::set, py::arg("buyer"), py::arg("good"),
           py::arg("value"))
      .def("bundle_value", &UnitDemandMatrix::bundle_value, py::arg("buyer"),
           py::arg("bundle"))
      .def("__repr__", [](const UnitDemandMatrix& matrix) {
        return "UnitDemandMatrix(buyers=" + std::to_string(matrix.n) +
               ", goods=" + std::to_string(matrix.m) + ")";
      });

  m.def("gen_unit_demand", &gen_unit_demand, py::arg("dist"), py::arg("n"),
        py::arg("m"), py::arg("seed"));
  m.def("unit_demand_to_market", &unit_demand_to_market, py::arg("matrix"));
  m.def("ud_distribution_from_string", &ud_distribution_from_string,
        py::arg("name"));
  m.def("to_string", py::overload_cast<UdDistribution>(&to_string),
        py::arg("dist"));

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init([](double half_width) { return NoiseSpec{half_width}; }),
           py::arg("half_width") = 0.0)
      .def_readwrite("half_width", &NoiseSpec::half_width);

  py::class_<NoisyOracle>(m, "NoisyOracle")
      .def(py::init<Market, NoiseSpec, std::uint64_t>(), py::arg("market"),
           py::arg("noise"), py::arg("seed"))
      .def(py::init<UnitDemandMatrix, NoiseSpec, std::uint64_t>(),
           py::arg("matrix"), py::arg("noise"), py::arg("seed"))
      .def_property_readonly("buyers", &NoisyOracle::buyers)
      .def_property_readonly("goods", &NoisyOracle::goods)
      .def_property_readonly("unit_demand", &NoisyOracle::unit_demand)
      .def("sample", &NoisyOracle::sample, py::arg("buyer"), py::arg("bundle"))
      .def("sample_at", &NoisyOracle::sample_at, py::arg("buyer"),
           py::arg("bundle"), py::arg("draw_index"))
      .def("base_value", &NoisyOracle::base_value, py::arg("buyer"),
           py::arg("bundle"))
      .def("draws", &NoisyOracle::draws, py::arg("buyer"), py::arg("bundle"))
      .def("total_draws", &NoisyOracle::total_draws);

  py::class_<WelfareResult>(m, "WelfareResult")
      .def_readonly("allocation", &WelfareResult::allocation)
      .def_readonly("value", &WelfareResult::value);

  m.def("max_welfare_exact", &max_welfare_exact, py::arg("market"));
  m.def("max_welfare_unit_demand", &max_welfare_unit_demand,
        py::arg("matrix"));
  m.def("relaxed_upper_bound", &relaxed_upper_bound, py::arg("market"),
        py::arg("buyer"), py::arg("bundle"));

  py::enum_<PriceObjective>(m, "PriceObjective")
      .value("MinSlack", PriceObjective::MinSlack)
      .value("MinRevenue", PriceObjective::MinRevenue)
      .value("MaxRevenue", PriceObjective::MaxRevenue);

  py::class_<PriceSolution>(m, "PriceSolution")
      .def_readonly("prices", &PriceSolution::prices)
      .def_readonly("total_slack", &PriceSolution::total_slack)
      .def_readonly("per_pair_slack", &PriceSolution::per_pair_slack)
      .def_readonly("objective_used", &PriceSolution::objective_used)
      .def("revenue", &PriceSolution::revenue);

  py::class_<PriceCheck>(m, "PriceCheck")
      .def_readonly("max_excess", &PriceCheck::max_excess)
      .def_readonly("slack_sum_error", &PriceCheck::slack_sum_error)
      .def_readonly("zero_price_ok", &PriceCheck::zero_price_ok)
      .def_readonly("ok", &PriceCheck::ok);

  m.def("linear_ce_prices", &linear_ce_prices, py::arg("market"),
        py::arg("allocation"),
        py::arg("objective") = PriceObjective::MinSlack);
  m.def("linear_ce_prices_unit_demand", &linear_ce_prices_unit_demand,
        py::arg("matrix"), py::arg("allocation"),
        py::arg("objective") = PriceObjective::MinSlack);
  m.def("verify_price_solution", &verify_price_solution, py::arg("market"),
        py::arg("allocation"), py::arg("solution"));
  m.def("price_objective_from_string", &price_objective_from_string,
        py::arg("name"));

  py::class_<PairKey>(m, "PairKey")
      .def(py::init([](int buyer, Bundle bundle) {
             return PairKey{buyer, bundle};
           }),
           py::arg("buyer"), py::arg("bundle"))
      .def_readonly("buyer", &PairKey::buyer)
      .def_readonly("bundle", &PairKey::bundle)
      .def("__eq__",
           [](const PairKey& a, const PairKey& b) { return a == b; })
      .def("__hash__",
           [](const PairKey& key) {
             return py::hash(py::make_tuple(key.buyer, key.bundle));
           })
      .def("__repr__", [](const PairKey& key) {
        return "PairKey(buyer=" + std::to_string(key.buyer) +
               ", bundle=" + std::to_string(key.bundle) + ")";
      });

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("mean", &Estimate::mean)
      .def_readonly("radius", &Estimate::radius)
      .def_readonly("pruned", &Estimate::pruned)
      .def_readonly("samples", &Estimate::samples)
      .def("__repr__", [](const Estimate& est) {
        return "Estimate(mean=" + format_double(est.mean) +
               ", radius=" + format_double(est.radius) +
               ", pruned=" + (est.pruned ? std::string("True")
                                         : std::string("False")) +
               ", samples=" + std::to_string(est.samples) + ")";
      });

  py::class_<EstimateTable>(m, "EstimateTable")
      .def("at", &EstimateTable::at, py::arg("buyer"), py::arg("bundle"))
      .def("active_pairs", &EstimateTable::active_pairs)
      .def("items",
           [](const EstimateTable& table) {
             return estimate_items(table.entries);
           })
      .def("__len__",
           [](const EstimateTable& table) { return table.entries.size(); });

  m.def("hoeffding_eps", &hoeffding_eps, py::arg("c"), py::arg("idx_size"),
        py::arg("delta"), py::arg("t"));
  m.def("invert_hoeffding_t", &invert_hoeffding_t, py::arg("c"),
        py::arg("idx_size"), py::arg("delta"), py::arg("eps"));

  py::class_<EaResult>(m, "EaResult")
      .def_readonly("eps_hat", &EaResult::eps_hat)
      .def("items",
           [](const EaResult& result) {
             return estimate_items(result.estimates);
           });

  m.def("ea", &ea, py::arg("oracle"), py::arg("index_set"), py::arg("t"),
        py::arg("delta"), py::arg("c"));

  py::class_<Schedules>(m, "Schedules")
      .def(py::init<>())
      .def_readwrite("sampling", &Schedules::sampling)
      .def_readwrite("failure", &Schedules::failure)
      .def_readwrite("budgets", &Schedules::budgets)
      .def("rounds", &Schedules::rounds)
      .def("validate", &Schedules::validate);

  py::enum_<BoundMode>(m, "BoundMode")
      .value("Exact", BoundMode::Exact)
      .value("Relaxed", BoundMode::Relaxed)
      .value("TwoPass", BoundMode::TwoPass);

  m.def("bound_mode_from_string", &bound_mode_from_string, py::arg("name"));
  m.def("build_doubling_schedule", &build_doubling_schedule, py::arg("eps"),
        py::arg("c"), py::arg("idx_size"), py::arg("total_delta") = 0.1);

  py::class_<LearnResult>(m, "LearnResult")
      .def_readonly("estimates", &LearnResult::estimates)
      .def_readonly("eps_hat", &LearnResult::eps_hat)
      .def_readonly("delta_spent", &LearnResult::delta_spent)
      .def_readonly("delta_budget", &LearnResult::delta_budget)
      .def_readonly("iterations", &LearnResult::iterations)
      .def_readonly("total_samples", &LearnResult::total_samples);

  m.def(
      "eap",
      [](NoisyOracle& oracle, const Schedules& schedules, double c,
         double target_eps, BoundMode mode) {
        return eap(oracle, schedules, c, target_eps, mode);
      },
      py::arg("oracle"), py::arg("schedules"), py::arg("c"),
      py::arg("target_eps") = 0.0, py::arg("mode") = BoundMode::TwoPass);

  m.def("um_loss_buyer", &um_loss_buyer, py::arg("market"),
        py::arg("outcome"), py::arg("buyer"));
  m.def("um_loss_per_buyer", &um_loss_per_buyer, py::arg("market"),
        py::arg("outcome"));
  m.def("um_loss", &um_loss, py::arg("market"), py::arg("outcome"));
  m.def("um_loss_unit_demand", &um_loss_unit_demand, py::arg("matrix"),
        py::arg("allocation"), py::arg("prices"));
  m.def("sample_efficiency", &sample_efficiency, py::arg("ea_samples"),
        py::arg("eap_samples"));

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("um_loss_per_buyer", &EvalReport::um_loss_per_buyer)
      .def_readonly("um_loss_market", &EvalReport::um_loss_market)
      .def_readonly("ea_samples", &EvalReport::ea_samples)
      .def_readonly("eap_samples", &EvalReport::eap_samples)
      .def_readonly("savings_fraction", &EvalReport::savings_fraction)
      .def_readonly("eps_target", &EvalReport::eps_target)
      .def_readonly("eps_achieved", &EvalReport::eps_achieved);

  m.def("evaluate_outcome", &evaluate_outcome, py::arg("market"),
        py::arg("outcome"));

  m.def("format_double", &format_double, py::arg("x"));
  m.def("load_market", &load_market, py::arg("path"));
  m.def("save_market", &save_market, py::arg("market"), py::arg("path"));
  m.def("load_outcome", &load_outcome, py::arg("path"));
  m.def("save_outcome", &save_outcome, py::arg("outcome"),
        py::arg("num_goods"), py::arg("path"));
  m.def("load_unit_demand_csv", &load_unit_demand_csv, py::arg("path"));
  m.def("save_unit_demand_csv", &save_unit_demand_csv, py::arg("matrix"),
        py::arg("path"));
  m.def("estimates_csv", &estimates_csv, py::arg("table"));
  m.def("save_estimates_csv", &save_estimates_csv, py::arg("table"),
        py::arg("path"));
  m.def("load_estimates_csv", &load_estimates_csv, py::arg("path"));
  m.def("learn_result_json", &learn_result_json, py::arg("result"));
  m.def("save_learn_result", &save_learn_result, py::arg("result"),
        py::arg("path"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("desk_defaults", &ExperimentConfig::desk_defaults)
      .def_static("full_defaults", &ExperimentConfig::full_defaults)
      .def_readwrite("distributions", &ExperimentConfig::distributions)
      .def_readwrite("buyer_counts", &ExperimentConfig::buyer_counts)
      .def_readwrite("good_counts", &ExperimentConfig::good_counts)
      .def_readwrite("noise_half_width", &ExperimentConfig::noise_half_width)
      .def_readwrite("eps_list", &ExperimentConfig::eps_list)
      .def_readwrite("draws", &ExperimentConfig::draws)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("total_delta", &ExperimentConfig::total_delta)
      .def_readwrite("bound_mode", &ExperimentConfig::bound_mode)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def("validate", &ExperimentConfig::validate)
      .def("value_range_c", &ExperimentConfig::value_range_c);

  py::class_<ResultRow>(m, "ResultRow")
      .def_readonly("distribution", &ResultRow::distribution)
      .def_readonly("n", &ResultRow::n)
      .def_readonly("m", &ResultRow::m)
      .def_readonly("eps", &ResultRow::eps)
      .def_readonly("draw", &ResultRow::draw)
      .def_readonly("objective", &ResultRow::objective)
      .def_readonly("um_loss", &ResultRow::um_loss)
      .def_readonly("ea_samples", &ResultRow::ea_samples)
      .def_readonly("eap_samples", &ResultRow::eap_samples)
      .def_readonly("savings", &ResultRow::savings)
      .def_readonly("eps_achieved", &ResultRow::eps_achieved);

  m.def("run_table1_experiment", &run_table1_experiment, py::arg("config"));
  m.def("run_sample_efficiency_experiment",
        &run_sample_efficiency_experiment, py::arg("config"));
}
