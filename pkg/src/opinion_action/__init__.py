"""Simulation and structural analysis of the opinion-action coevolution model."""

from .graph import (
    CapacityError,
    Digraph,
    SccPartition,
    StructureClass,
    StructureReport,
    classify_structure,
    condensation,
    cut_balance_exhaustive,
    digraph_of,
    omega_theta_partition,
    sources_and_sinks,
    strongly_connected_components,
    to_dot,
)
from .model import (
    ModelParams,
    NeighborSets,
    PopulationState,
    average_action,
    hk_step,
    neighbor_sets,
    step,
    update_actions,
    update_opinions,
)
from .simulation import (
    Hull,
    Regime,
    SimulationReport,
    Tolerances,
    Trajectory,
    classify_regime,
    compare_direct_vs_matrix,
    detect_stabilization,
    hk_simulate,
    hull_distance,
    initial_population,
    limiting_digraph,
    run,
    simulate,
    verify_lemma4,
)
from .state_matrix import (
    AugmentedState,
    CoefficientBounds,
    StateMatrix,
    assemble_state_matrix,
    check_row_stochastic,
    coefficient_bounds,
    lift,
    matrix_step,
    reconstruct_actions,
    verify_bounds,
)

__version__ = "0.1.0"
