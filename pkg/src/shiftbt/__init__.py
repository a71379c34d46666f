"""Balanced truncation model reduction for asymptotically stable LTI systems
with nonzero initial conditions.

Besides standard balanced truncation and the established initial-value-aware
variants (state translation, input augmentation, two separate truncations),
the package provides joint and separate decaying-shift truncation with a
priori error bounds of the form c_u ||u||_L2 + c_x0 ||z0||_2, plus the
machinery to evaluate and optimize the shift parameters cheaply from
precomputed Gramian factor products.
"""

from .balancing import BalancedRealization, BtResult, GramianFactors, balance_full, bt, gramian_factors, project
from .bounds import (
    BoundConstants,
    augbt_posteriori_bound,
    bt_bound,
    bt_initial_value_error_term,
    btbt_posteriori_bound,
    jshift_bound,
    sshift_bound,
)
from .harness import (
    ComparisonReport,
    ExperimentConfig,
    MethodSpec,
    construct_example,
    error_trajectory,
    run_comparison,
    smooth,
)
from .linalg import (
    PsdFactor,
    matrix_exponential,
    psd_factor,
    solve_lyapunov,
    solve_sylvester,
    spectral_abscissa,
)
from .lti import (
    LtiSystem,
    PiecewiseConstantInput,
    TimeGrid,
    Trajectory,
    default_horizon,
    h2_norm,
    is_asymptotically_stable,
    l2_norm_input,
    l2_norm_trajectory,
    linf_norm_trajectory,
    simulate,
)
from .paramopt import (
    OptResult,
    PrecomputedBlocks,
    c_u_gradient,
    c_u_of_alpha,
    heuristic_alpha,
    heuristic_beta,
    hsv_matrix,
    optimize_alpha,
    precompute_blocks,
    sample_alpha,
    shift_hsv,
)
from .reduction import (
    Rom,
    SeparateRom,
    expand_rom_phi,
    expand_rom_psi,
    precompute_initial_responses,
    reduce_augbt,
    reduce_bt,
    reduce_btbt,
    reduce_jshift,
    reduce_sshift,
    reduce_trlbt,
    rom_output,
    superpose,
)

__version__ = "0.1.0"
