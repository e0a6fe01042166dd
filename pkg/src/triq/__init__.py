"""Exact arithmetic dynamics on the (1,1,1) ∩ (2,2,2) fourfolds in P^2 x P^2 x P^2."""

__version__ = "0.1.0"

from triq.algebra import (  # noqa: E402
    QQ,
    Cubic,
    IntMatrix3,
    PrimeField,
    PrimeFieldElement,
    QuadraticSurd,
    RationalField,
    char_poly_3x3,
    field_inverse,
    mat_pow,
    parse_field,
    spectral_radius_exact,
)
from triq.dynamics import (  # noqa: E402
    OrbitRecord,
    OrbitStatus,
    composite,
    fiber_points_bruteforce,
    orbit,
    scan_points,
    sigma,
)
from triq.picard import (  # noqa: E402
    DivisorClass,
    apply_pullback,
    char_poly_composite,
    composite_matrix,
    dynamical_degree,
    polarization_solve,
    pullback_matrix,
)
from triq.variety import (  # noqa: E402
    AxisPair,
    CoefficientTensorA,
    CoefficientTensorB,
    ProjectivePoint2,
    TriPoint,
    Variety,
    congruence_residual,
    eval_L,
    eval_Q,
    fiber_degenerate,
    g_form,
    h_form,
    is_on_variety,
    partial_L,
    partial_Q,
)
