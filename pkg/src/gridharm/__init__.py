"""Discrete potential theory on rectangular lattices.

Dirichlet solvers, Dirichlet-Laplacian spectra, a Fourier transfer solver for
tempered harmonic functions in a strip, spectral harmonic-measure expansions
in truncated cylinders, a random-walk oracle, and executable verifiers for
the quantitative inequalities these objects satisfy (maximum principle,
tempered layer bounds, three-line log-convexity, Phragmen-Lindelof lower
bounds, conditional stability).
"""

from .cylinder import (
    CylinderSpec,
    MeasureExpansion,
    PLBound,
    PLReport,
    PartitionReport,
    PositivityError,
    harmonic_basis,
    harmonic_measure,
    make_cylinder_spec,
    measure_mid_values,
    midsection_linear_bound,
    pl_constant_partition_report,
    pl_lower_bound,
    solve_measure_directly,
    stability_bound,
    verify_pl,
)
from .dirichlet import dirichlet_matrix, residual, solve
from .lattice import (
    DisconnectedDomainError,
    DomainError,
    EmptyDomainError,
    GridDomain,
    Mesh,
    Point,
    boundary_of,
    build_box_domain,
    cylinder_caps,
    cylinder_domain,
    cylinder_wall,
    is_connected,
    neighbors,
    points_domain,
)
from .montecarlo import ExitEstimate, WalkConfig, estimate_exit_probability
from .operators import (
    GridFunction,
    NeighborUndefinedError,
    check_max_principle,
    default_harmonic_tol,
    gradient_at,
    is_harmonic,
    is_subharmonic,
    laplacian_at,
    laplacian_interior,
    partial_laplacian_at,
)
from .spectral import (
    EigensolverError,
    RatePair,
    Spectrum,
    WeylBound,
    a_of_lambda,
    axial_rates,
    b_of_lambda1,
    counting_function,
    cube_modes,
    cube_spectrum_closed_form,
    dirichlet_spectrum,
    eigenspace_groups,
    weyl_bound,
)
from .strip import (
    StripBoundaryData,
    StripSolution,
    TransferSymbol,
    layer_parseval_sq_norm,
    layer_sq_norm,
    logconvex_sum_check,
    q_symbol,
    solve_strip,
    three_line_bound,
    three_line_m,
    three_line_m_frequency,
    transfer_coefficients,
)

__version__ = "0.1.0"
