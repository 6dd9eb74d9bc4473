"""Smoke tests for the python bindings: one pass over each main operation."""

import celearn as ce


def uniform_matrix(n=4, m=4, seed=7):
    return ce.gen_unit_demand(ce.UdDistribution.Uniform, n, m, seed)


def test_version_and_caps():
    assert ce.__version__
    assert ce.MAX_GOODS == 20
    assert ce.UNBOUNDED_BUDGET == -1


def test_welfare_solvers_agree():
    matrix = uniform_matrix()
    market = ce.unit_demand_to_market(matrix)
    fast = ce.max_welfare_unit_demand(matrix)
    exact = ce.max_welfare_exact(market)
    assert abs(fast.value - exact.value) <= 1e-9
    assert ce.is_feasible(exact.allocation)
    assert abs(ce.welfare(market, exact.allocation) - exact.value) <= 1e-9


def test_prices_support_the_optimum():
    matrix = uniform_matrix(seed=12)
    market = ce.unit_demand_to_market(matrix)
    alloc = ce.max_welfare_unit_demand(matrix).allocation
    lo = ce.linear_ce_prices_unit_demand(matrix, alloc,
                                         ce.PriceObjective.MinRevenue)
    hi = ce.linear_ce_prices_unit_demand(matrix, alloc,
                                         ce.PriceObjective.MaxRevenue)
    assert lo.total_slack <= 1e-7
    assert lo.revenue() <= hi.revenue() + 1e-7
    assert ce.verify_price_solution(market, alloc, lo).ok

    outcome = ce.Outcome(alloc, ce.Pricing.linear(lo.prices))
    assert ce.is_approx_ce(market, outcome, 1e-6)
    assert ce.um_loss(market, outcome) <= 1e-6
    assert ce.evaluate_outcome(market, outcome).um_loss_market <= 1e-6


def test_ea_is_deterministic_and_within_radius():
    matrix = uniform_matrix(seed=3)
    idx = ce.IndexSet.singletons(matrix.n, matrix.m)
    t = ce.invert_hoeffding_t(11.0, len(idx), 0.1, 0.5)
    assert ce.hoeffding_eps(11.0, len(idx), 0.1, t) <= 0.5

    oracle = ce.NoisyOracle(matrix, ce.NoiseSpec(1.0), 3)
    result = ce.ea(oracle, idx, t, 0.1, 11.0)
    assert result.eps_hat <= 0.5
    items = result.items()
    assert len(items) == len(idx)
    for buyer, bundle, est in items:
        assert est.samples == t
        assert abs(est.mean - oracle.base_value(buyer, bundle)) <= 1.0

    again = ce.ea(ce.NoisyOracle(matrix, ce.NoiseSpec(1.0), 3), idx, t, 0.1,
                  11.0)
    assert [e.mean for _, _, e in again.items()] == \
        [e.mean for _, _, e in items]


def test_eap_prunes_dominated_buyers():
    matrix = ce.UnitDemandMatrix(3, 1)
    for buyer, value in enumerate([9.0, 1.0, 1.0]):
        matrix.set(buyer, 0, value)
    oracle = ce.NoisyOracle(matrix, ce.NoiseSpec(0.1), 5)

    schedules = ce.Schedules()
    schedules.sampling = [200, 400, 800, 1600]
    schedules.failure = [0.025] * 4
    schedules.budgets = [ce.UNBOUNDED_BUDGET] * 4

    result = ce.eap(oracle, schedules, 10.1)
    assert result.iterations == 4
    assert result.total_samples == 3400
    assert not result.estimates.at(0, 1).pruned
    assert result.estimates.at(1, 1).pruned
    assert result.estimates.at(2, 1).pruned
    assert result.estimates.active_pairs() == [ce.PairKey(0, 1)]


def test_io_round_trips(tmp_path):
    matrix = uniform_matrix(seed=9)
    market = ce.unit_demand_to_market(matrix)

    market_path = str(tmp_path / "market.json")
    ce.save_market(market, market_path)
    loaded = ce.load_market(market_path)
    assert loaded.same_shape(market)
    assert loaded.value(2, 0b1010) == market.value(2, 0b1010)

    csv_path = str(tmp_path / "ud.csv")
    ce.save_unit_demand_csv(matrix, csv_path)
    back = ce.load_unit_demand_csv(csv_path)
    assert back.at(1, 2) == matrix.at(1, 2)

    assert ce.format_double(0.1) == "0.1"


def test_experiment_writes_results(tmp_path):
    config = ce.ExperimentConfig.desk_defaults()
    config.distributions = [ce.UdDistribution.Uniform]
    config.buyer_counts = [2]
    config.good_counts = [2]
    config.eps_list = [0.5]
    config.draws = 2
    config.seed = 3
    config.out_dir = str(tmp_path / "table1")
    rows = ce.run_table1_experiment(config)
    assert len(rows) == 2 * 2  # draws x objectives
    assert (tmp_path / "table1" / "table1.csv").exists()
    assert (tmp_path / "table1" / "manifest.json").exists()
