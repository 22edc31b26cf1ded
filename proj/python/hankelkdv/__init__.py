"""KdV solver for step-like singular Miura initial data.

The heavy lifting lives in the C++ extension `_core`: Titchmarsh-Weyl
m-functions, reflection coefficients on a shifted contour, Hankel-operator
discretizations, and the log-determinant evaluation of q(x, t).
"""

from ._core import (
    ConfigError,
    MMode,
    MValue,
    MiuraProfile,
    NumericalError,
    ParabolicDomain,
    SolutionSample,
    SolveOptions,
    kdv_residual,
    m_function,
    norm_bound,
    optimize_h,
    pole_free_margin,
    q_grid,
    q_value,
    reflection,
    set_workers,
    singular_values,
    xi,
    xi_abs,
)

__all__ = [
    "ConfigError",
    "MMode",
    "MValue",
    "MiuraProfile",
    "NumericalError",
    "ParabolicDomain",
    "SolutionSample",
    "SolveOptions",
    "kdv_residual",
    "m_function",
    "norm_bound",
    "optimize_h",
    "pole_free_margin",
    "q_grid",
    "q_value",
    "reflection",
    "set_workers",
    "singular_values",
    "xi",
    "xi_abs",
]

__version__ = "0.1.0"
