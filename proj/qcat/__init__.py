"""Even and odd q-deformed charge coherent states: core numerics."""

from ._qcat import (
    QcatError,
    correlation_g,
    find_zeta,
    hyperbolic_ratios,
    overlap,
    qbessel_j,
    qexp,
    qfactorial,
    qnumber,
    radial_moment_check,
    squeezing_scan,
    state_coefficients,
    su11_variances,
)

__all__ = [
    "QcatError",
    "correlation_g",
    "find_zeta",
    "hyperbolic_ratios",
    "overlap",
    "qbessel_j",
    "qexp",
    "qfactorial",
    "qnumber",
    "radial_moment_check",
    "squeezing_scan",
    "state_coefficients",
    "su11_variances",
]
