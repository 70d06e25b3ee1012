"""Measurement schemes, precision bounds and the generic Gaussian information formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import IllConditionedError, PureStateSingularError, SingularCovarianceError
from ..gaussian import OMEGA, CovMatrix2

__all__ = [
    "Homodyne",
    "Heterodyne",
    "SldOptimal",
    "MeasurementScheme",
    "POSITION",
    "MOMENTUM",
    "PrecisionBound",
    "qfi_numeric",
    "gaussian_cfi",
    "canonical_theta",
    "cos_sin",
]

MAX_CONDITION = 1e12
PURE_TOL = 1e-12


def canonical_theta(theta: float) -> float:
    """Reduce a quadrature angle to ``(-pi/2, pi/2]``."""
    t = math.fmod(theta, math.pi)
    if t > math.pi / 2:
        t -= math.pi
    elif t <= -math.pi / 2:
        t += math.pi
    return t


def cos_sin(theta: float) -> tuple[float, float]:
    """``(cos, sin)`` that are exact at the position and momentum quadratures."""
    if theta == 0.0:
        return 1.0, 0.0
    if theta == math.pi / 2:
        return 0.0, 1.0
    if theta == -math.pi / 2:
        return 0.0, -1.0
    return math.cos(theta), math.sin(theta)


@dataclass(frozen=True)
class Homodyne:
    """Measurement of the quadrature ``x cos(theta) + p sin(theta)``."""

    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", canonical_theta(float(self.theta)))

    @property
    def name(self) -> str:
        if self.theta == 0.0:
            return "position"
        if self.theta == math.pi / 2:
            return "momentum"
        return f"homodyne({self.theta:.6g})"


@dataclass(frozen=True)
class Heterodyne:
    name = "heterodyne"


@dataclass(frozen=True)
class SldOptimal:
    """Projection onto the SLD eigenbasis; attains the QCRB."""

    name = "qcrb"


MeasurementScheme = Union[Homodyne, Heterodyne, SldOptimal]

POSITION = Homodyne(0.0)
MOMENTUM = Homodyne(math.pi / 2)


@dataclass(frozen=True)
class PrecisionBound:
    """Single-shot lower bound on the variance of an unbiased estimate of Lambda.

    ``variance_bound`` is in (m^-2 s^-1)^2 and equals
    ``lambda_sql**2 * dimensionless_bound``; ``fisher_info`` is its reciprocal.
    """

    variance_bound: float
    fisher_info: float
    scheme: MeasurementScheme
    dimensionless_bound: float
    lambda_sql: float = 1.0

    @classmethod
    def from_dimensionless(cls, bound: float, scheme: MeasurementScheme, lambda_sql: float = 1.0) -> "PrecisionBound":
        if not bound >= 0:
            raise ValueError(f"variance bound must be non-negative, got {bound}")
        variance = lambda_sql * lambda_sql * bound
        info = 1.0 / variance if variance > 0 else math.inf
        return cls(variance, info, scheme, bound, lambda_sql)

    def variance(self, repetitions: int = 1) -> float:
        """Variance bound after ``repetitions`` independent shots."""
        return self.variance_bound / repetitions

    def std(self, repetitions: int = 1) -> float:
        return math.sqrt(self.variance(repetitions))


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, CovMatrix2):
        return m.as_array()
    return np.asarray(m, dtype=float)


def qfi_numeric(sigma, dsigma, max_condition: float = MAX_CONDITION) -> float:
    """Quantum Fisher information of a zero-drift single-mode Gaussian family.

    Solves ``(sigma (x) sigma - Omega (x) Omega) vec(L) = vec(dsigma)`` as a
    dense 4x4 system and returns ``vec(dsigma) . vec(L) / 2``. The covariance
    is first balanced by the symplectic scaling ``diag(s, 1/s)`` that equalises
    its diagonal; the QFI is invariant under that change of variables.

    Raises :class:`PureStateSingularError` when ``det sigma`` is 1 to within
    ``1e-12`` and :class:`IllConditionedError` when the system's condition
    number exceeds ``max_condition``.
    """
    s = _as_matrix(sigma)
    ds = _as_matrix(dsigma)
    if s.shape != (2, 2) or ds.shape != (2, 2):
        raise ValueError("qfi_numeric expects 2x2 matrices")
    if s[0, 0] <= 0 or s[1, 1] <= 0:
        raise SingularCovarianceError("covariance must have positive diagonal")
    det = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
    if det - 1.0 <= PURE_TOL * max(1.0, det):
        raise PureStateSingularError(f"det(sigma) = {det!r} is pure to within tolerance; QFI system is singular")

    k = (s[1, 1] / s[0, 0]) ** 0.25
    scale = np.array([k, 1.0 / k])
    s = s * np.outer(scale, scale)
    ds = ds * np.outer(scale, scale)

    m = np.kron(s, s) - np.kron(OMEGA, OMEGA)
    cond = np.linalg.cond(m)
    if not cond <= max_condition:
        raise IllConditionedError(f"QFI system condition number {cond:.3e} exceeds {max_condition:.1e}", cond)
    v = ds.reshape(-1)
    return 0.5 * float(v @ np.linalg.solve(m, v))


def gaussian_cfi(Sigma, dSigma) -> float:
    """Fisher information ``Tr[(Sigma^-1 dSigma)^2] / 2`` of a zero-mean Gaussian.

    Accepts scalars (one outcome) or 2x2 covariances.
    """
    if np.ndim(Sigma) == 0 and not isinstance(Sigma, CovMatrix2):
        S, dS = float(Sigma), float(dSigma)
        if not S > 0:
            raise SingularCovarianceError(f"variance must be positive, got {S}")
        return dS * dS / (2.0 * S * S)
    S = _as_matrix(Sigma)
    dS = _as_matrix(dSigma)
    try:
        chol = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError("covariance is not positive definite") from exc
    # Symmetric whitening keeps the product well scaled.
    half = np.linalg.solve(chol, np.linalg.solve(chol, dS).T)
    return 0.5 * float(np.sum(half * half))
