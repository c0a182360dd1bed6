"""Discrete isocapacitary laboratory on the integer lattice.

Capacities and capacitary potentials of finite lattice sets, discrete
Schwarz-type rearrangements, continuum reference formulas, simplicial
embeddings, shape optimization at fixed cardinality, and experiment
drivers with CSV/JSON output.
"""

from .lattice import (
    Direction,
    LatticeError,
    LatticeSet,
    SliceIndex,
    coordinate_direction,
    diameter,
    is_convex,
    is_direction_convex,
    lattice_ball,
    min_sym_diff_to_ball,
    neighbors,
    perimeter,
    quasi_ball,
    rearrangement_directions,
    scaled_perimeter,
    slice_of_point,
    sym_diff_count,
)
from .energy import (
    EnergyBreakdown,
    LatticeFunction,
    decompose_energy,
    diag_1d,
    edge_energy,
    energy_1d,
    energy_p,
    energy_scaled,
    interaction_1d,
)
from .rearrange import (
    PnReport,
    RearrangementPlan,
    check_Pn,
    flip,
    iterate_symmetrize,
    level_set,
    reflect,
    symmetrize_1d,
    symmetrize_direction,
    walled_in_check,
)
from .continuum import (
    ContinuumBallData,
    ball_volume,
    cap_p_ball,
    cap_relative_ball,
    discretized_test_function,
    r_alpha,
    radial_potential_p,
    radial_potential_relative,
    truncation_correction,
)
from .capacity import (
    CapacityResult,
    EigenResult,
    PotentialReport,
    eigen_ground_state,
    p_capacity,
    relative_capacity,
    truncation_study,
    verify_potential,
)
from .embedding import (
    EmbeddedSet,
    KuhnSimplex,
    embed,
    interpolation_energy,
    interpolation_integral,
    kuhn_simplices_of_cube,
    zeta_ball_sym_diff,
    zeta_volume_bounds_check,
)
from .optimize import (
    Objective,
    SearchState,
    canonical_form,
    exchange_move,
    minimize,
    structural_audit,
    symmetrization_descent_step,
)
from .experiments import (
    ConvergenceRecord,
    ExperimentRecord,
    Ledger,
    run_convergence,
    run_fluctuation,
    write_convergence_csv,
    write_fluctuation_csv,
)
from .io import (
    FormatError,
    read_config,
    read_function_file,
    read_set_file,
    write_function_file,
    write_set_file,
)
from .verification import run_suite

__version__ = "0.1.0"
