"""Exact planar correlation functions of the cubic (Phi^3_2) matrix model.

Typical use::

    from phi3matrix import solve_c, G1, G_1plus1
    cp = solve_c(lam=0.3)
    G1(cp, 1.0)
"""

from .bell import (
    bell_partial,
    bell_partial_definition,
    double_factorial,
    gamma_closed,
    gamma_recursive,
    verify_bell_identity_1,
    verify_conjecture,
    verify_footnote_identity,
)
from .correlators import (
    BoundarySpec,
    G1,
    G2,
    GN_single_boundary,
    G_1plus1,
    G_1plus1plus1,
    G_1plusTower,
    G_1plusTower_ansatz,
    G_multi_boundary,
    PlanarFunctionValue,
    Provenance,
    W,
    W_jet,
    X_of_x,
    evaluate,
)
from .errors import (
    ConditioningError,
    ConvergenceError,
    DomainError,
    InconsistencyError,
    InputError,
    Phi3Error,
    QuadratureError,
    SingularityError,
)
from .jet import Jet
from .mpoly import MPoly
from .schwinger import S2_hat, S2_position, positivity_check, schwinger_N_integrand
from .spectral import (
    C_C,
    LAMBDA_C,
    LINEAR,
    Coupling,
    EigenvalueFunction,
    c_series,
    critical_point,
    moments,
    solve_c,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Jet",
    "MPoly",
    "bell_partial",
    "bell_partial_definition",
    "double_factorial",
    "gamma_closed",
    "gamma_recursive",
    "verify_bell_identity_1",
    "verify_conjecture",
    "verify_footnote_identity",
    "EigenvalueFunction",
    "LINEAR",
    "Coupling",
    "solve_c",
    "critical_point",
    "c_series",
    "moments",
    "LAMBDA_C",
    "C_C",
    "BoundarySpec",
    "PlanarFunctionValue",
    "Provenance",
    "X_of_x",
    "W",
    "W_jet",
    "G1",
    "G2",
    "GN_single_boundary",
    "G_1plus1",
    "G_1plus1plus1",
    "G_1plusTower",
    "G_1plusTower_ansatz",
    "G_multi_boundary",
    "evaluate",
    "S2_hat",
    "S2_position",
    "positivity_check",
    "schwinger_N_integrand",
    "Phi3Error",
    "InputError",
    "DomainError",
    "ConvergenceError",
    "QuadratureError",
    "SingularityError",
    "ConditioningError",
    "InconsistencyError",
]
