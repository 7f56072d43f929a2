"""Exact traveling-wave solutions of the (2+1)-dimensional NLS equation with
dual-power nonlinearity, ``i q_t + (q_xx + q_yy)/2 + (|q|^2m + k|q|^4m) q = 0``.
"""

from .errors import (
    AllPointsSingular,
    AmbiguousClustering,
    ConfigError,
    DomainError,
    InvalidParameters,
    NLSDualError,
    NonRealAmplitude,
    NotDegenerate,
    SingularPoint,
    StiffnessFailure,
    UnsupportedPattern,
)
from .families import (
    Family,
    SolutionDescriptor,
    construct_solution,
    degenerate_limits,
    evaluate_field,
    evaluate_profile,
)
from .params import DerivedCoefficients, ProblemParams, derive_coefficients, validate
from .quartic import Pattern, QuarticPoly, RootClassification, build_quartic, classify_roots, find_roots
from .verify import Grid, ResidualReport, ode_identity_residual, ode_shoot_compare, pde_residual

__version__ = "0.1.0"
