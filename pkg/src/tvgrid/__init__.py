"""2-D total-variation denoising estimators, partition schemes and
tangent-cone geometry, with a Monte Carlo scaling-law harness."""

from .core import (
    EdgeIndex,
    edge_count,
    edge_gradient,
    edges,
    load_matrix_csv,
    make_signal,
    save_matrix_csv,
    tv,
    tv_cols,
    tv_norm,
    tv_rows,
)
from .experiments import ExperimentReport, ExperimentSpec, fit_loglog_slope, run_experiment
from .geometry import (
    SignPattern,
    WidthEstimate,
    cone_membership,
    gaussian_width_cone,
    lower_bound_witness,
    project_onto_cone,
    sign_pattern,
)
from .partition import (
    Rect,
    RectPartition,
    block_average,
    epsilon_net_representative,
    gns_bound,
    greedy_1d_partition,
    greedy_tv_partition,
)
from .solver import (
    ConvergenceError,
    DenoiseResult,
    SolverConfig,
    denoise_penalized,
    project_tv_ball,
)
from .tuning_free import TuningFreeResult, denoise_notuning, sigma_hat

__version__ = "0.1.0"
