"""Quantum Cramer-Rao bound for a squeezed thermal state under free diffusion."""

from __future__ import annotations

import math

from ..errors import DegenerateRegimeError, UninformativeMeasurementError
from ..gaussian import (
    SqueezedThermalSpec,
    comoving_covariance,
    dcov_dlambda_comoving,
    initial_covariance,
)
from .core import PrecisionBound, SldOptimal, qfi_numeric

__all__ = [
    "z_factor",
    "qcrb_closed_form",
    "qfi_evolved",
    "optimal_qcrb_squeeze_angle",
    "qcrb_candidate_angles",
    "qcrb_branch_select",
]


def _root(tau: float) -> float:
    return math.sqrt(9.0 + 3.0 * tau * tau + tau**4)


def _tan_numerator(tau: float) -> float:
    # tau^2 - 3 + sqrt(9 + 3 tau^2 + tau^4), written without cancellation at small tau.
    t2 = tau * tau
    return t2 + (3.0 * t2 + t2 * t2) / (_root(tau) + 3.0)


def z_factor(spec: SqueezedThermalSpec, tau: float) -> float:
    """The squeezing-dependent combination that carries all of (r, phi) in the QCRB."""
    r, phi = spec.r, spec.phi
    t2 = tau * tau
    return (1.0 + t2 / 3.0) * math.cosh(2 * r) + (
        (1.0 - t2 / 3.0) * math.cos(2 * phi) + tau * math.sin(2 * phi)
    ) * math.sinh(2 * r)


def _qcrb_dimensionless(T: float, Z: float, tau: float, lambda_tilde: float) -> float:
    if T == 1.0 and lambda_tilde == 0.0:
        raise DegenerateRegimeError(
            "pure initial state with zero diffusion (T = 1, lambda = 0): the QCRB is 0/0 there"
        )
    if tau == 0.0:
        raise UninformativeMeasurementError("tau = 0: no evolution, the state carries no information on lambda")
    t4_12 = tau**4 / 12.0
    y = tau * T * lambda_tilde * Z + t4_12 * lambda_tilde * lambda_tilde
    T2 = T * T
    numerator = (T2 - 1.0 + y) * (T2 + 1.0 + y)
    denominator = t4_12 * (1.0 - T2 + y) + 0.5 * tau * tau * T2 * Z * Z
    return numerator / denominator


def qcrb_closed_form(
    spec: SqueezedThermalSpec, tau: float, lambda_tilde: float, lambda_sql: float = 1.0
) -> PrecisionBound:
    """Closed-form QCRB; the variance bound is ``lambda_sql**2`` times a function of dimensionless inputs."""
    if lambda_tilde < 0:
        raise ValueError("lambda_tilde must be >= 0")
    bound = _qcrb_dimensionless(spec.T, z_factor(spec, tau), tau, lambda_tilde)
    return PrecisionBound.from_dimensionless(bound, SldOptimal(), lambda_sql)


def qfi_evolved(spec: SqueezedThermalSpec, tau: float, lambda_tilde: float) -> float:
    """QFI per unit ``lambda_tilde``^2 from the 4x4 linear solve.

    The solve runs in the co-moving frame (free-flight shear removed), which
    is a symplectic change of variables and leaves the QFI unchanged.
    """
    sigma = comoving_covariance(initial_covariance(spec), tau, lambda_tilde)
    return qfi_numeric(sigma, dcov_dlambda_comoving(tau))


def optimal_qcrb_squeeze_angle(tau: float) -> float:
    """Squeezing angle that extremises the QCRB (tends to 0 at long times)."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    return math.atan(-3.0 * tau / _tan_numerator(tau))


def qcrb_candidate_angles(tau: float) -> tuple[float, float]:
    """The two stationary squeezing angles ``(phi_plus, phi_minus)``; they differ by pi/2."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    num = _tan_numerator(tau)
    return math.atan(num / (3.0 * tau)), math.atan(-3.0 * tau / num)


def _phi_plus_preferred(T: float, r: float, tau: float, lambda_tilde: float) -> bool:
    # Expanded form of c < d (a^2 + b^2 - 1) / (2ab) for r > 0.
    t2 = tau * tau
    u = lambda_tilde * lambda_tilde * tau**4 / 12.0
    T2 = T * T
    T4 = T2 * T2
    value = (
        lambda_tilde
        * tau
        * (-T4 * (1.0 + 0.75 * t2 + t2 * t2 / 9.0) + t2 / 12.0 * (1.0 + u) ** 2 + T2 * t2 / 6.0 * (1.0 - u))
        + T * (1.0 + t2 / 3.0) * (1.0 - T4 + 2.0 * u * (1.0 - 2.0 * T2) + u * u) * math.cosh(2 * r)
        - tau**3 / 6.0 * T4 * lambda_tilde * math.cosh(4 * r)
    )
    return value < 0.0


def qcrb_branch_select(spec: SqueezedThermalSpec, tau: float, lambda_tilde: float) -> tuple[float, int]:
    """Best squeezing orientation for squeezing magnitude ``|spec.r|``.

    Returns ``(phi, sign)``: the QCRB is minimised by the state
    ``SqueezedThermalSpec(T, sign * abs(r), phi)`` with ``phi`` the angle of
    :func:`optimal_qcrb_squeeze_angle`. ``sign = -1`` means anti-squeezing
    that quadrature, i.e. squeezing the orthogonal stationary angle.
    """
    phi = optimal_qcrb_squeeze_angle(tau)
    r = abs(spec.r)
    if r == 0.0:
        return phi, 1
    return phi, (-1 if _phi_plus_preferred(spec.T, r, tau, lambda_tilde) else 1)
