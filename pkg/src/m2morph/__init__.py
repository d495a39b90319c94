"""
m2morph: distances and morphological PDE kernels on the space M2 of 2-D
positions and orientations.

The package computes the exact left-invariant (sub-)Riemannian distance on
M2 by an eikonal solver, provides the closed-form distance approximations
(log, half-angle, sub-Riemannian, combined) with their analytic error
estimates and global bounds, and uses morphological kernels built from
these distances to solve the erosion and dilation Hamilton-Jacobi PDEs by
infimal convolution.  A verification layer checks every claimed symmetry,
bound and error estimate; the ``m2morph`` CLI exposes the whole pipeline.
"""

from .group import (
    IDENTITY,
    PointM2,
    apply_symmetry,
    classify_relation,
    exp_map,
    group_product,
    half_angle,
    inverse,
    log_map,
    sinc,
    wrap_angle,
)
from .metric import (
    FrameVector,
    MetricParams,
    coordinate_to_frame,
    dual_norm,
    frame_norm,
    intersection_y,
    lower_bound_l,
    upper_bound_u1,
    upper_bound_u2,
)
from .approx import (
    EXACT_FIELD,
    ApproxKind,
    KernelParams,
    approx_distance,
    dual_norm_grad_rho_b,
    kernel_profile,
    local_error_epsilon,
    morph_kernel,
    rho_b,
    rho_c,
    rho_com,
    rho_sr_new,
    rho_sr_old,
    tolerance_region_radius,
)
from .grid import GridSpec, ScalarField, read_mg1, sample_field, write_csv, write_mg1
from .eikonal import (
    SolverError,
    SolverOpts,
    eikonal_residual,
    solve_exact_distance,
    solve_subriemannian_distance,
)
from .morphology import (
    ConvectionSpec,
    MorphKernelSpec,
    convect,
    dilate,
    erode,
    hj_timestep_oracle,
    morph_convolve,
    shifted_kernel_erode,
)
from .analysis import (
    ErrorReport,
    isocontour_export,
    mean_relative_error,
    verify_bounds,
    verify_symmetries,
)

__version__ = "0.1.0"
