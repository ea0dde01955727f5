"""Submodular maximization with exact oracle-query accounting."""

from .cardinality import (
    FillState,
    draw_rank,
    lazy_greedy_improved,
    lazy_greedy_simple,
    nonmonotone_regime_threshold,
    random_greedy,
    random_sampling,
    random_sampling_monotone,
    random_sampling_nonmonotone,
    standard_greedy,
)
from .errors import InstanceTooLargeError, InvalidInputError
from .harness import (
    RunConfig,
    RunRecord,
    brute_force_opt,
    generate_instance,
    generate_matroid,
    run_experiment,
    summarize,
)
from .ledger import QueryLedger
from .matroid_algos import (
    CombinedParams,
    CombinedResult,
    LazyGreedyOutcome,
    LazyGreedyState,
    PartitionLazyGreedyState,
    choose_lambda,
    combined_algorithm,
    combined_parameters,
    linear_greedy,
    linear_greedy_partition,
    random_lazy_greedy,
    thresholding_greedy,
)
from .matroids import (
    ContractedMatroid,
    DummyAugmentedProblem,
    ExplicitMatroid,
    GraphicMatroid,
    Matroid,
    PartitionMatroid,
    RankCappedMatroid,
    UniformMatroid,
    augment_with_dummies,
    check_exchange_axiom,
    contract,
    greedy_basis,
    matroid_rank,
    remove_self_loops,
)
from .multilinear import (
    FractionalPoint,
    continuous_greedy,
    crude_opt_estimate,
    estimate_marginal_F,
    estimator_sample_count,
    swap_round,
)
from .oracles import (
    CoverageOracle,
    DirectedCutOracle,
    FacilityLocationOracle,
    ModularOracle,
    ResidualOracle,
    TableOracle,
    ValueOracle,
    check_monotone,
    check_submodular,
    make_coverage,
    make_directed_cut,
    make_facility_location,
    make_modular,
    make_table,
    marginal,
    sample_correlated_subset,
)

__version__ = "0.1.0"
