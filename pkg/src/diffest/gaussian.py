"""Single-mode Gaussian states and their free evolution under momentum diffusion.

Everything here is dimensionless: quadratures are scaled so that the ground
state has covariance equal to the identity, time is ``tau = omega * t`` and the
diffusion strength is ``lambda_tilde = Lambda / Lambda_SQL``.

Free flight is the shear ``S(tau) = [[1, tau], [0, 1]]`` and diffusion adds
``lambda_tilde * D(tau)`` with ``D(tau) = [[tau^3/3, tau^2/2], [tau^2/2, tau]]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OMEGA",
    "CovMatrix2",
    "Displacement2",
    "GaussianState",
    "SqueezedThermalSpec",
    "initial_covariance",
    "evolve_covariance",
    "evolve_displacement",
    "evolve_state",
    "dcov_dlambda",
    "comoving_covariance",
    "dcov_dlambda_comoving",
    "evolved_determinant",
    "db_to_r",
    "r_to_db",
]

#: Commutator matrix of (x, p).
OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class CovMatrix2:
    """Symmetric 2x2 matrix stored as its three independent entries.

    Used both for covariance matrices and for their parameter derivatives, so
    positivity is not enforced on construction; see :meth:`is_physical`.
    """

    xx: float
    xp: float
    pp: float

    def __post_init__(self):
        for name in ("xx", "xp", "pp"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"CovMatrix2.{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, a, atol: float = 1e-12) -> "CovMatrix2":
        a = np.asarray(a, dtype=float)
        if a.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
        scale = max(1.0, float(np.max(np.abs(a))))
        if abs(a[0, 1] - a[1, 0]) > atol * scale:
            raise ValueError("matrix is not symmetric")
        return cls(a[0, 0], 0.5 * (a[0, 1] + a[1, 0]), a[1, 1])

    def as_array(self) -> np.ndarray:
        return np.array([[self.xx, self.xp], [self.xp, self.pp]])

    @property
    def det(self) -> float:
        return self.xx * self.pp - self.xp * self.xp

    @property
    def trace(self) -> float:
        return self.xx + self.pp

    def quadratic_form(self, u) -> float:
        """``u^T M u`` for a 2-vector ``u``."""
        u0, u1 = u
        return self.xx * u0 * u0 + 2.0 * self.xp * u0 * u1 + self.pp * u1 * u1

    def is_physical(self, tol: float = 1e-9) -> bool:
        """Positive diagonal and ``det >= 1`` (uncertainty relation)."""
        return self.xx > 0 and self.pp > 0 and self.det >= 1.0 - tol

    def __add__(self, other: "CovMatrix2") -> "CovMatrix2":
        return CovMatrix2(self.xx + other.xx, self.xp + other.xp, self.pp + other.pp)

    def __sub__(self, other: "CovMatrix2") -> "CovMatrix2":
        return CovMatrix2(self.xx - other.xx, self.xp - other.xp, self.pp - other.pp)

    def scale(self, factor: float) -> "CovMatrix2":
        return CovMatrix2(factor * self.xx, factor * self.xp, factor * self.pp)


@dataclass(frozen=True)
class Displacement2:
    x: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ValueError("displacement entries must be finite")


@dataclass(frozen=True)
class GaussianState:
    d: Displacement2
    sigma: CovMatrix2


@dataclass(frozen=True)
class SqueezedThermalSpec:
    """Thermal variance ``T`` squeezed by ``r`` e-folds at angle ``phi``.

    Negative ``r`` is allowed: ``(phi, r)`` and ``(phi + pi/2, -r)`` are the
    same state. ``phi`` is reduced to ``[0, pi)``.
    """

    T: float = 1.0
    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        T, r, phi = float(self.T), float(self.r), float(self.phi)
        if not (math.isfinite(T) and math.isfinite(r) and math.isfinite(phi)):
            raise ValueError("squeezed thermal parameters must be finite")
        if T < 1.0:
            raise ValueError(f"thermal variance must satisfy T >= 1, got {T}")
        phi = math.fmod(phi, math.pi)
        if phi < 0:
            phi += math.pi
        if phi >= math.pi:
            phi = 0.0
        phi += 0.0  # drop the sign of -0.0
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_db(cls, T: float, squeezing_db: float, phi: float = 0.0) -> "SqueezedThermalSpec":
        return cls(T, db_to_r(squeezing_db), phi)


def db_to_r(db: float) -> float:
    """Squeezing in dB (variance ratio ``e^{2r}``) to e-folds ``r``."""
    return db / 20.0 * math.log(10.0)


def r_to_db(r: float) -> float:
    return 20.0 * r / math.log(10.0)


def initial_covariance(spec: SqueezedThermalSpec) -> CovMatrix2:
    T, r, phi = spec.T, spec.r, spec.phi
    if T < 1.0:
        raise ValueError(f"thermal variance must satisfy T >= 1, got {T}")
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    c2, s2 = math.cos(2 * phi), math.sin(2 * phi)
    return CovMatrix2(T * (c + s * c2), T * s * s2, T * (c - s * c2))


def _check_tau_lambda(tau: float, lambda_tilde: float = 0.0) -> None:
    if not tau >= 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    if not lambda_tilde >= 0:
        raise ValueError(f"lambda_tilde must be >= 0, got {lambda_tilde}")


def dcov_dlambda(tau: float) -> CovMatrix2:
    """Derivative of the evolved covariance with respect to ``lambda_tilde``."""
    _check_tau_lambda(tau)
    return CovMatrix2(tau**3 / 3.0, tau**2 / 2.0, tau)


def evolve_covariance(sigma0: CovMatrix2, tau: float, lambda_tilde: float) -> CovMatrix2:
    _check_tau_lambda(tau, lambda_tilde)
    xx = sigma0.xx + 2.0 * tau * sigma0.xp + tau * tau * sigma0.pp
    xp = sigma0.xp + tau * sigma0.pp
    pp = sigma0.pp
    if lambda_tilde:
        d = dcov_dlambda(tau)
        xx += lambda_tilde * d.xx
        xp += lambda_tilde * d.xp
        pp += lambda_tilde * d.pp
    return CovMatrix2(xx, xp, pp)


def evolve_displacement(d0: Displacement2, tau: float) -> Displacement2:
    _check_tau_lambda(tau)
    return Displacement2(d0.x + tau * d0.p, d0.p)


def evolve_state(state: GaussianState, tau: float, lambda_tilde: float) -> GaussianState:
    return GaussianState(
        evolve_displacement(state.d, tau),
        evolve_covariance(state.sigma, tau, lambda_tilde),
    )


# The free-flight shear is symplectic, so undoing it leaves every Fisher
# information unchanged while avoiding the tau^2-sized entries whose products
# cancel in det(sigma(tau)).
def dcov_dlambda_comoving(tau: float) -> CovMatrix2:
    """``S(tau)^-1 D(tau) S(tau)^-T``: the diffusion matrix in the co-moving frame."""
    _check_tau_lambda(tau)
    return CovMatrix2(tau**3 / 3.0, -(tau**2) / 2.0, tau)


def comoving_covariance(sigma0: CovMatrix2, tau: float, lambda_tilde: float) -> CovMatrix2:
    """Evolved covariance with the free-flight shear removed.

    Related to :func:`evolve_covariance` by ``sigma(tau) = S sigma' S^T``.
    """
    _check_tau_lambda(tau, lambda_tilde)
    return sigma0 + dcov_dlambda_comoving(tau).scale(lambda_tilde)


def evolved_determinant(sigma0: CovMatrix2, tau: float, lambda_tilde: float) -> float:
    """``det sigma(tau)`` without the cancellation of the lab-frame product."""
    _check_tau_lambda(tau, lambda_tilde)
    cross = tau * sigma0.xx + tau * tau * sigma0.xp + tau**3 / 3.0 * sigma0.pp
    return sigma0.det + lambda_tilde * cross + lambda_tilde**2 * tau**4 / 12.0
