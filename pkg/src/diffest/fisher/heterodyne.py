"""Heterodyne detection: sampling the Husimi Q function, whose covariance is sigma + 1."""

from __future__ import annotations

from ..errors import UninformativeMeasurementError
from ..gaussian import (
    CovMatrix2,
    SqueezedThermalSpec,
    dcov_dlambda,
    evolve_covariance,
    evolved_determinant,
    initial_covariance,
)
from .core import Heterodyne, PrecisionBound, gaussian_cfi

__all__ = ["heterodyne_covariance", "heterodyne_crb", "heterodyne_crb_generic"]

_IDENTITY = CovMatrix2(1.0, 0.0, 1.0)


def heterodyne_covariance(sigma_tau: CovMatrix2) -> CovMatrix2:
    return sigma_tau + _IDENTITY


def heterodyne_crb(
    spec: SqueezedThermalSpec, tau: float, lambda_tilde: float, lambda_sql: float = 1.0
) -> PrecisionBound:
    """Closed-form heterodyne CRB in terms of the initial covariance entries."""
    s0 = initial_covariance(spec)
    xx, xp, pp = s0.xx, s0.xp, s0.pp
    sigma_tau = evolve_covariance(s0, tau, lambda_tilde)
    # det(sigma + 1) = det(sigma) + tr(sigma) + 1
    det = evolved_determinant(s0, tau, lambda_tilde) + sigma_tau.trace + 1.0
    t2 = tau * tau
    t4 = t2 * t2
    denominator = (
        t4 * det
        + 6.0 * t2 * (1.0 + xx + tau * xp + t2 / 3.0 * pp) ** 2
        + 2.0 * t4 * (1.0 + xx - pp - xx * pp + xp * xp + t2 / 3.0 * (1.0 - pp))
    )
    if not denominator > 0:
        raise UninformativeMeasurementError(f"heterodyne outcomes carry no information at tau={tau}")
    return PrecisionBound.from_dimensionless(12.0 * det * det / denominator, Heterodyne(), lambda_sql)


def heterodyne_crb_generic(
    spec: SqueezedThermalSpec, tau: float, lambda_tilde: float, lambda_sql: float = 1.0
) -> PrecisionBound:
    sigma = heterodyne_covariance(evolve_covariance(initial_covariance(spec), tau, lambda_tilde))
    info = gaussian_cfi(sigma, dcov_dlambda(tau))
    if info == 0:
        raise UninformativeMeasurementError(f"heterodyne outcomes carry no information at tau={tau}")
    return PrecisionBound.from_dimensionless(1.0 / info, Heterodyne(), lambda_sql)
