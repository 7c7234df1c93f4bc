"""Generalized totally asymmetric exclusion process on a ring.

Exact finite-size stationary observables and current cumulants, their
thermodynamic and crossover asymptotics, a kinetic Monte Carlo engine with an
exact stationary sampler, and a brute-force Markov oracle tying everything
together.
"""

from .asymptotics import (
    KpzInvariants,
    ScalingBundle,
    TransferMatrixStats,
    flow_diagram,
    kpz_invariants,
    saddle_points,
    scaling_constants,
    transfer_matrix_stats,
)
from .bethe import CgfSeries, cgf_parametric, cumulants_from_series, series_coeffs
from .exact import (
    appell_f1_terminating,
    diffusion_exact,
    gauss_2f1_terminating,
    mean_jumps,
    occupation_distribution,
    partition_function,
)
from .model import (
    Geometry,
    ModelParams,
    WeightTriple,
    density_map,
    derive_params,
    hop_kernel,
    site_weight,
)
from .oracle import (
    build_deformed_matrix,
    cumulants_fd,
    hop_distribution,
    largest_eigenvalue,
    stationary_vector,
)
from .simulate import (
    ObservableReport,
    RingState,
    ZrpState,
    cluster_decomposition,
    run_ensemble,
    sample_stationary,
    step_gtasep,
    step_zrp,
)
from .special import bessel_i, bessel_i_scaled, dl_function, legendre_dl, polylog
from .transition import (
    cumulant_ratio,
    delta_theta,
    theta_parameter,
    transition_cgf,
    transition_cluster_dist,
    transition_cumulants,
)

__version__ = "0.1.0"
