"""conecheck: property testing and numeric certification for
subadditivity-type inequalities of functions on convex cones."""

from .catalog import (
    CatalogEntry,
    PropertyLabel,
    SourceStatus,
    builtin_entries,
    instantiate,
    lookup,
)
from .certify import (
    Certificate,
    LaplaceCertificate,
    certify_differential_monotone,
    certify_hessian_sign,
    certify_topkis,
    gaussian_detcert_check,
    laplace_as_handle,
    laplace_eval,
)
from .checkers import (
    CheckConfig,
    CheckReport,
    MajorizationPair,
    Witness,
    check,
    check_alpha_strong,
    check_chebyshev,
    check_lipschitz_box,
    check_popoviciu,
    check_remark_double_inequality,
    refute,
    reevaluate_witness,
    tomic_weyl,
)
from .cones import (
    ConeSpec,
    Point,
    Rng,
    comonotonic,
    full_space,
    grid_lp_positive,
    leq,
    meet_join,
    member,
    nonneg_orthant,
    positive_orthant,
    product,
    psd_cone,
    sample,
    sample_comonotone_pair,
)
from .diffops import FunctionHandle, delta, kth_diff, second_diff, shift_and_center
from .numkernel import (
    EigenDecomposition,
    ScalarFunction,
    det,
    fd_directional,
    fd_gradient,
    fd_hessian,
    gamma,
    log_det,
    matrix_function,
    schatten_norm,
    sym_eig,
    trace_pow,
    vn_entropy,
    weyl_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
