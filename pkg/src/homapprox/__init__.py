"""Exact homogeneous approximations of single-input control-affine systems."""

from .algebra import (
    AlgElem,
    concat,
    devectorize,
    enumerate_basis,
    phi,
    psi,
    shuffle,
    shuffle_power,
    vectorize,
    word_order,
)
from .approx import (
    ApproximationResult,
    CoreDecomposition,
    NoAutonomousApproximation,
    NotAccessibleError,
    NotRepresentableError,
    PolynomialSystem,
    ShufflePolynomial,
    approximate,
    build_ideal_blocks,
    build_autonomous,
    build_nonautonomous,
    check_self_consistency,
    express_as_shuffle_poly,
    project_core,
    select_core,
)
from .expr import (
    Expr,
    ExprSyntaxError,
    differentiate,
    eval_at_origin,
    eval_float,
    expr_to_str,
    parse_expr,
    simplify,
)
from .lie import (
    LieBasisElement,
    build_lie_basis,
    expand_right_normed,
    witt_dimension,
)
from .series import (
    ControlSystem,
    EquilibriumError,
    SeriesComputer,
    SeriesTable,
    lie_coefficient,
    moment_coefficient,
    series_up_to,
    system_from_strings,
)

__version__ = "0.1.0"
