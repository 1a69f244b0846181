"""Linear eigenvalue statistics of the classical compact groups.

Exact combinatorial identities, finite-n and limiting cumulants, determinant
based moment generating functions, and an exact sampler for the eigenvalue
angles of U(n), SO(2n), SO(2n+1) and Sp(n).
"""

from .combinatorics import (
    ResourceError,
    clamp_count,
    comp_coeff_sum,
    enumerate_trees,
    g_direct,
    g_subset_form,
    rotate_tree,
    rs_identity_sides,
    u_tree_sum,
)
from .cumulants import (
    Caps,
    CumulantReport,
    cumulant_direct_unitary,
    cumulant_trace,
    limit_cumulant,
    local_cumulant,
    localized_symbol,
)
from .determinants import (
    NumericalError,
    cumulants_from_mgf,
    fredholm_mgf,
    szego_residual,
    toeplitz_mgf,
    weyl_quadrature_mgf,
)
from .ensembles import Ensemble, ProjectionBasis, kernel_matrix, weyl_density
from .exact import GaussianRational
from .fourier import (
    FourierPoly,
    LocalTestFunction,
    convolve_power,
    exp_symbol_coeffs,
    localize,
    make_poly,
    poly_from_json,
    variance_limit_local,
)
from .sampler import EigenSample, linear_statistic, local_statistic, sample_angles, sample_batch
from .stats import EmpiricalSummary, empirical_cumulants

__version__ = "0.1.0"
