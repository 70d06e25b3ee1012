"""Long-time (tau >> 1) asymptotic forms of the bounds.

These are reference curves for tests and documentation. The production bound
functions always evaluate the exact expressions.
"""

from __future__ import annotations

import math

from ..gaussian import SqueezedThermalSpec

__all__ = ["position_bound_large_tau", "qcrb_pure_large_tau"]


def position_bound_large_tau(spec: SqueezedThermalSpec, tau: float, lambda_tilde: float) -> float:
    """Dimensionless position-measurement bound for ``tau >> 1``."""
    r, phi = spec.r, spec.phi
    shape = math.cosh(2 * r) - math.sinh(2 * r) * math.cos(2 * phi)
    return 2.0 * (lambda_tilde + spec.T * shape * 3.0 / tau) ** 2


def qcrb_pure_large_tau(r: float, tau: float, lambda_tilde: float) -> float:
    """Dimensionless QCRB for a pure input (T = 1) squeezed at the optimal angle, ``tau >> 1``.

    ``r`` may have either sign; anti-squeezing can be the better choice.
    """
    e2 = math.exp(-2 * r)
    lt = lambda_tilde
    numerator = 8.0 * lt * (e2 + tau * lt / 4.0) * (1.0 + tau**3 * e2 * lt / 6.0 + tau**4 * lt * lt / 24.0)
    denominator = 2.0 * tau**3 / 3.0 * e2 * e2 + tau**4 / 3.0 * e2 * lt + tau**5 / 12.0 * lt * lt
    return numerator / denominator
