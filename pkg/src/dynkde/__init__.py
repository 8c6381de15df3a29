"""Kernel estimation of invariant densities and evolution maps of chaotic
dynamical systems, with exponential deviation envelopes under weak mixing.
"""

from ._core import BACKEND_NAME
from .kernels import Kernel, kernel_by_name, make_box, make_epanechnikov
from .stochastics import NoiseLaw, RngState, split_stream
from .dynamics import (
    DynamicalSystem,
    Trajectory,
    beta_map,
    gauss_map,
    alpha_gauss_map,
    logistic_map,
    matrix_beta_map,
    generate_trajectory,
    sample_stationary,
    system_by_spec,
)
from .estimators import (
    ame,
    ame_vector,
    bias_bound_check,
    density_estimate,
    full_estimate,
    make_grid,
    map_estimate,
    regression_estimate,
)
from .regularity import bv_lemma_bounds, oscillation_bad_set, total_variation
from .bounds import (
    BoundParams,
    MixingModel,
    bandwidth_schedule,
    concentration_bound,
    density_deviation_envelope,
    moment_bound,
    regression_deviation_envelope,
    smallest_linear_majorant,
    weighted_phi_sum,
)
from .experiments import (
    ExperimentSpec,
    ResultRow,
    convergence_sweep,
    coverage_study,
    reproduce_paper_suite,
    run_experiment,
    run_table,
)

__version__ = "0.1.0"
