"""Learning competitive equilibria of combinatorial markets from noisy
value queries.

Thin re-export of the compiled core; see the project README for the model
and the command line interface.
"""

from ._core import (  # noqa: F401
    BoundMode,
    EaResult,
    Estimate,
    EstimateTable,
    EvalReport,
    ExperimentConfig,
    IndexSet,
    LearnResult,
    Market,
    MAX_GOODS,
    NoiseSpec,
    NoisyOracle,
    Outcome,
    PairKey,
    PriceCheck,
    PriceObjective,
    PriceSolution,
    Pricing,
    ResultRow,
    Schedules,
    UNBOUNDED_BUDGET,
    UdDistribution,
    UnitDemandMatrix,
    WelfareResult,
    __version__,
    bound_mode_from_string,
    build_doubling_schedule,
    bundle_size,
    ea,
    eap,
    estimates_csv,
    evaluate_outcome,
    format_double,
    gen_unit_demand,
    hoeffding_eps,
    invert_hoeffding_t,
    is_approx_ce,
    is_feasible,
    learn_result_json,
    linear_ce_prices,
    linear_ce_prices_unit_demand,
    load_estimates_csv,
    load_market,
    load_outcome,
    load_unit_demand_csv,
    market_distance,
    max_welfare_exact,
    max_welfare_unit_demand,
    price_objective_from_string,
    relaxed_upper_bound,
    rm_holds,
    run_sample_efficiency_experiment,
    run_table1_experiment,
    sample_efficiency,
    save_estimates_csv,
    save_learn_result,
    save_market,
    save_outcome,
    save_unit_demand_csv,
    to_string,
    ud_distribution_from_string,
    um_loss,
    um_loss_buyer,
    um_loss_per_buyer,
    um_loss_unit_demand,
    um_violation,
    unit_demand_to_market,
    verify_price_solution,
    welfare,
)
