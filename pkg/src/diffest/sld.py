"""Symmetric logarithmic derivative of the diffusion parameter and its Williamson form.

The SLD is ``L = r^T L2 r - Tr(L2 sigma)/2`` with ``L2`` solving
``sigma L2 sigma + Omega L2 Omega = d sigma / d lambda``. Its eigenbasis is
reached by a phase rotation followed by single-mode squeezing, after which
phonon counting attains the QCRB. Everything here is per unit
``lambda_tilde``; the physical ``L2`` is this divided by ``Lambda_SQL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PureStateSingularError
from .gaussian import (
    OMEGA,
    CovMatrix2,
    SqueezedThermalSpec,
    evolve_covariance,
    evolved_determinant,
    initial_covariance,
)

__all__ = [
    "SldQuadraticForm",
    "SldDecomposition",
    "l2_matrix",
    "sld_spectrum",
    "required_squeezing_db",
    "sld_for_spec",
    "williamson_normal_form",
    "residual",
]


@dataclass(frozen=True)
class SldQuadraticForm:
    l2: CovMatrix2
    constant_offset: float


@dataclass(frozen=True)
class SldDecomposition:
    """Eigen/Williamson data of ``L2``.

    ``D1`` is the eigenvalue along the direction ``(cos psi, sin psi)`` and is
    the larger one; ``squeezing_factor`` is ``e^{2z} = sqrt(D1/D2) >= 1``.
    """

    D1: float
    D2: float
    psi: float
    z: float
    symplectic_eigenvalue: float

    @property
    def squeezing_factor(self) -> float:
        return math.exp(2.0 * self.z)


def l2_matrix(sigma_tau: CovMatrix2, tau: float, det: Optional[float] = None) -> SldQuadraticForm:
    """Closed-form ``L2`` for the evolved covariance ``sigma_tau``.

    ``det`` may be supplied when ``det(sigma_tau)`` is known more accurately
    than the product of the (large) lab-frame entries allows.
    """
    xx, xp, pp = sigma_tau.xx, sigma_tau.xp, sigma_tau.pp
    if det is None:
        det = sigma_tau.det
    if det * det - 1.0 <= 1e-12 * det * det:
        raise PureStateSingularError(f"det(sigma) = {det!r}: SLD equation is singular for a pure state")
    t, t2, t3 = tau, tau * tau, tau**3
    lxx = t + t * xp * xp - t2 * xp * pp + t3 / 3.0 * pp * pp
    lxp = -t * xx * xp + 0.5 * t2 * (det + 2.0 * xp * xp - 1.0) - t3 / 3.0 * xp * pp
    lpp = t * xx * xx - t2 * xx * xp + t3 / 3.0 * (1.0 + xp * xp)
    scale = 1.0 / (det * det - 1.0)
    l2 = CovMatrix2(lxx * scale, lxp * scale, lpp * scale)
    offset = -0.5 * (l2.xx * xx + 2.0 * l2.xp * xp + l2.pp * pp)
    return SldQuadraticForm(l2, offset)


def sld_spectrum(form: SldQuadraticForm, sigma_tau: CovMatrix2, tau: float, det: Optional[float] = None) -> SldDecomposition:
    """Eigenvalues, diagonalising phase and squeezing of ``L2``.

    Uses ``alpha = Tr(l)/2`` and ``det(l)`` of the unnormalised matrix in
    closed form; the smaller eigenvalue comes from ``det / D1`` to avoid the
    cancellation in ``alpha - sqrt(alpha^2 - det)``.
    """
    xx, xp, pp = sigma_tau.xx, sigma_tau.xp, sigma_tau.pp
    if det is None:
        det = sigma_tau.det
    t2 = tau * tau
    alpha = 0.5 * tau * (
        1.0 + xx * xx - xp * (xx + pp) * tau + t2 / 3.0 * (1.0 + pp * pp) + xp * xp * (1.0 + t2 / 3.0)
    )
    q = t2 * (xx - tau * xp + t2 / 3.0 * pp) ** 2 + t2 * t2 / 12.0 * (det - 1.0) ** 2
    scale = 1.0 / (det * det - 1.0)
    big = alpha + math.sqrt(max(alpha * alpha - q, 0.0))
    small = q / big if big > 0 else 0.0
    D1, D2 = big * scale, small * scale

    l2 = form.l2
    if D1 == D2 or D2 <= 0:
        psi, z = 0.0, 0.0
    else:
        psi = 0.5 * math.atan2(2.0 * l2.xp, l2.xx - l2.pp)
        # e^{2z} = sqrt(D1/D2) = D1 / sqrt(D1 D2)
        z = 0.5 * math.log(big / math.sqrt(q))
    return SldDecomposition(D1, D2, psi, z, math.sqrt(max(D1 * D2, 0.0)))


def williamson_normal_form(form: SldQuadraticForm, decomp: SldDecomposition) -> np.ndarray:
    """``L2`` after rotating the quadratures by ``psi`` and squeezing by ``diag(e^z, e^-z)``.

    A quadratic form transforms contragrediently to the quadratures, so the
    result is ``K^-1 R L2 R^T K^-1``; it is the symplectic eigenvalue times
    the identity.
    """
    c, s = math.cos(decomp.psi), math.sin(decomp.psi)
    R = np.array([[c, s], [-s, c]])
    K_inv = np.diag([math.exp(-decomp.z), math.exp(decomp.z)])
    return K_inv @ R @ form.l2.as_array() @ R.T @ K_inv


def required_squeezing_db(decomp: SldDecomposition) -> float:
    return 10.0 * math.log10(decomp.squeezing_factor)


def sld_for_spec(spec: SqueezedThermalSpec, tau: float, lambda_tilde: float):
    """Convenience: evolve ``spec`` and return ``(form, decomposition)``."""
    sigma0 = initial_covariance(spec)
    sigma_tau = evolve_covariance(sigma0, tau, lambda_tilde)
    det = evolved_determinant(sigma0, tau, lambda_tilde)
    form = l2_matrix(sigma_tau, tau, det)
    return form, sld_spectrum(form, sigma_tau, tau, det)


def residual(form: SldQuadraticForm, sigma_tau: CovMatrix2, dsigma: CovMatrix2) -> np.ndarray:
    """``sigma L2 sigma + Omega L2 Omega - dsigma``."""
    s = sigma_tau.as_array()
    L = form.l2.as_array()
    return s @ L @ s + OMEGA @ L @ OMEGA - dsigma.as_array()
