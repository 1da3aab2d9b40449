"""Simulator for consensus-based functional optimization over networks.

Agents hold private empirical risks over a shared function space (a kernel
expansion space, or a discretized probability simplex) and iterate local
descent steps interleaved with doubly stochastic gossip averaging.  The
package provides the two iteration engines (gradient descent and mirror
descent), certified time-varying communication schedules, centralized
oracles for optimization-error curves, synthetic data generation, and an
experiment harness with a CSV-emitting CLI.
"""

from .datagen import ExperimentData, generate, inject_outliers, load_data, save_data
from .errors import DfoError
from .gradient_descent import (
    DfgdConfig,
    consensus_bound_margins,
    dfgd_step,
    ergodic_average,
    run_dfgd,
)
from .harness import (
    ExperimentPreset,
    MetricsRow,
    emit_csv,
    get_presets,
    make_data,
    make_global_risk,
    make_schedule,
    run_preset,
    run_single,
)
from .kernels import (
    CenterSet,
    GaussianKernel,
    RkhsFunction,
    atom,
    evaluate,
    gram_matrix,
    linear_combine,
    rkhs_inner,
    zero_function,
)
from .losses import LossSpec, SmoothnessBounds, loss_derivative, loss_value, smoothness_bounds
from .mirror_descent import (
    DecisionDomain,
    EntropyGeometry,
    LinearFunctional,
    ProbabilityVector,
    QuadraticFunctional,
    QuadraticGeometry,
    dfmd_step,
    entropy_geometry,
    probability_simplex,
    quadratic_geometry,
    rkhs_ball,
    run_dfmd,
    run_ms_dfmd,
    whole_space,
)
from .network import (
    MixingBoundParams,
    MixingSchedule,
    load_schedule,
    matching_cycle_schedule,
    mixing_bound,
    mixing_params,
    ring_schedule,
    save_schedule,
    transition,
    validate_assumption1,
)
from .objective import (
    GlobalRisk,
    LocalData,
    LocalRisk,
    directional_fd_check,
    frechet_gradient,
    global_value,
    risk_value,
)
from .oracle import OracleReport, brute_force_simplex, solve_centralized_gd, solve_ls_pooled
from .trajectory import RunTrajectory

__version__ = "0.1.0"
