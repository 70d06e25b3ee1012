"""Homodyne (single-quadrature) measurement: marginal statistics and Cramer-Rao bounds."""

from __future__ import annotations

import math

from ..errors import UninformativeMeasurementError
from ..gaussian import SqueezedThermalSpec, dcov_dlambda, evolve_covariance, initial_covariance
from .core import MOMENTUM, POSITION, Homodyne, PrecisionBound, cos_sin, gaussian_cfi

__all__ = [
    "homodyne_variance",
    "homodyne_diffusion_gain",
    "homodyne_crb",
    "homodyne_crb_generic",
    "position_crb",
    "momentum_crb",
    "optimal_homodyne_squeeze_angle",
    "chi",
    "optimal_homodyne_angle",
    "optimal_homodyne_crb",
    "posmom_squeezing_homodyne_optimum",
    "posmom_squeezing_homodyne_crb",
]


def homodyne_diffusion_gain(theta: float, tau: float) -> float:
    """``d Sigma / d lambda_tilde`` for quadrature ``theta``: ``u^T D(tau) u``."""
    c, s = cos_sin(theta)
    return tau**3 / 3.0 * c * c + tau * tau * c * s + tau * s * s


def homodyne_variance(theta: float, spec: SqueezedThermalSpec, tau: float, lambda_tilde: float) -> float:
    """Variance of the homodyne outcome distribution after free evolution.

    Only the initial-state part scales with ``T``; the diffusion term does not.
    """
    c, s = cos_sin(theta)
    t2 = tau * tau
    s2t = 2.0 * s * c
    c2t = c * c - s * s
    ch, sh = math.cosh(2 * spec.r), math.sinh(2 * spec.r)
    c2p, s2p = math.cos(2 * spec.phi), math.sin(2 * spec.phi)
    state = (
        ((1.0 + t2) * c * c + tau * s2t + s * s) * ch
        + ((c2t - t2 * c * c - tau * s2t) * c2p + (2.0 * tau * c * c + s2t) * s2p) * sh
    )
    return spec.T * state + lambda_tilde * homodyne_diffusion_gain(theta, tau)


def _squeeze_response(theta: float, tau: float) -> tuple[float, float]:
    """``(N, delta)`` with the state part of the variance equal to
    ``T N (cosh 2r - cos(2 phi - delta) sinh 2r)``."""
    c, s = cos_sin(theta)
    a = c * c
    s2t = 2.0 * s * c
    n = tau * tau * a + tau * s2t + 1.0
    # n**2 == x**2 + y**2 identically (symplectic shear), so delta is the optimal 2*phi.
    x = tau * tau * a + tau * s2t - (a - s * s)
    y = -(2.0 * tau * a + s2t)
    return n, math.atan2(y, x)


def _state_term(theta: float, spec: SqueezedThermalSpec, tau: float, gain: float) -> float:
    n, delta = _squeeze_response(theta, tau)
    r = spec.r
    # cosh - cos(.) sinh rewritten as e^{-2r} + 2 sin^2(.) sinh 2r (no cancellation for large r > 0).
    if r >= 0:
        shape = math.exp(-2 * r) + 2.0 * math.sin(spec.phi - 0.5 * delta) ** 2 * math.sinh(2 * r)
    else:
        shape = math.exp(2 * r) - 2.0 * math.cos(spec.phi - 0.5 * delta) ** 2 * math.sinh(2 * r)
    return spec.T * n * shape / gain


def homodyne_crb(
    theta: float, spec: SqueezedThermalSpec, tau: float, lambda_tilde: float, lambda_sql: float = 1.0
) -> PrecisionBound:
    """CRB for homodyne detection at angle ``theta``: ``2 lambda_sql^2 [lambda_tilde + Sigma_0/gain]^2``."""
    gain = homodyne_diffusion_gain(theta, tau)
    if not gain > 0:
        raise UninformativeMeasurementError(
            f"quadrature theta={theta} carries no dependence on lambda at tau={tau}"
        )
    bracket = lambda_tilde + _state_term(theta, spec, tau, gain)
    return PrecisionBound.from_dimensionless(2.0 * bracket * bracket, Homodyne(theta), lambda_sql)


def homodyne_crb_generic(
    theta: float, spec: SqueezedThermalSpec, tau: float, lambda_tilde: float, lambda_sql: float = 1.0
) -> PrecisionBound:
    """Same bound through evolve -> project -> Gaussian CFI -> reciprocal."""
    sigma = evolve_covariance(initial_covariance(spec), tau, lambda_tilde)
    c, s = cos_sin(theta)
    info = gaussian_cfi(sigma.quadratic_form((c, s)), dcov_dlambda(tau).quadratic_form((c, s)))
    if info == 0:
        raise UninformativeMeasurementError(f"quadrature theta={theta} is uninformative at tau={tau}")
    return PrecisionBound.from_dimensionless(1.0 / info, Homodyne(theta), lambda_sql)


def position_crb(spec, tau, lambda_tilde, lambda_sql=1.0) -> PrecisionBound:
    return homodyne_crb(POSITION.theta, spec, tau, lambda_tilde, lambda_sql)


def momentum_crb(spec, tau, lambda_tilde, lambda_sql=1.0) -> PrecisionBound:
    return homodyne_crb(MOMENTUM.theta, spec, tau, lambda_tilde, lambda_sql)


def optimal_homodyne_squeeze_angle(theta: float, tau: float) -> float:
    """Squeezing angle minimising the homodyne CRB at fixed ``theta``: ``-arctan(1/(tau + tan theta))``."""
    c, s = cos_sin(theta)
    den = tau * c + s
    if den == 0.0:
        return -math.pi / 2
    return -math.atan(c / den)


def chi(tau: float, theta: float) -> float:
    """Initial-state noise per unit diffusion gain for quadrature ``theta``."""
    gain = homodyne_diffusion_gain(theta, tau)
    if not gain > 0:
        raise UninformativeMeasurementError(f"quadrature theta={theta} is uninformative at tau={tau}")
    n, _ = _squeeze_response(theta, tau)
    return n / gain


def _root(tau: float) -> float:
    return math.sqrt(9.0 + 3.0 * tau * tau + tau**4)


def optimal_homodyne_angle(tau: float) -> float:
    """Homodyne angle minimising ``chi`` (tends to ``-pi/2 + 1/tau``)."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    # -arctan(X) == -pi/2 + arctan(1/X) for X > 0
    return -math.pi / 2 + math.atan(3.0 * tau / (3.0 + 2.0 * tau * tau + _root(tau)))


def optimal_homodyne_crb(
    spec: SqueezedThermalSpec, tau: float, lambda_tilde: float, lambda_sql: float = 1.0
) -> PrecisionBound:
    """Optimal quadrature with optimally oriented squeezing of magnitude ``|r|``."""
    if not tau > 0:
        raise UninformativeMeasurementError("tau = 0: no quadrature depends on lambda")
    # (3 + tau^2 - root) / (tau^3 / 2) == 6 / (tau (3 + tau^2 + root))
    coefficient = 6.0 / (tau * (3.0 + tau * tau + _root(tau)))
    bracket = lambda_tilde + spec.T * math.exp(-2.0 * abs(spec.r)) * coefficient
    return PrecisionBound.from_dimensionless(2.0 * bracket * bracket, Homodyne(optimal_homodyne_angle(tau)), lambda_sql)


def posmom_squeezing_homodyne_optimum(r: float, tau: float) -> tuple[float, float]:
    """Best quadrature for a state squeezed along position/momentum (phi = 0).

    Returns ``(theta, coefficient)``; the bound is then
    ``2 lambda_sql^2 [lambda_tilde + T coefficient]^2``. ``r > 0`` squeezes momentum.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    e4 = math.exp(4 * r)
    t2 = tau * tau
    theta = -math.pi / 2 + math.atan(3.0 * tau / (3.0 * e4 + 2.0 * t2 + math.sqrt(9.0 * e4 * e4 + 3.0 * e4 * t2 + t2 * t2)))
    a = 3.0 * math.exp(2 * r)
    b = math.exp(-2 * r) * t2
    # 2 (a + b - sqrt(a^2 + ab + b^2)) / tau^3 with the difference rationalised
    coefficient = 6.0 / (tau * (a + b + math.sqrt(a * a + a * b + b * b)))
    return theta, coefficient


def posmom_squeezing_homodyne_crb(
    spec: SqueezedThermalSpec, tau: float, lambda_tilde: float, lambda_sql: float = 1.0
) -> PrecisionBound:
    """Bound at the quadrature of :func:`posmom_squeezing_homodyne_optimum`; ``spec.phi`` must be 0."""
    if spec.phi != 0.0:
        raise ValueError("position/momentum squeezing requires phi = 0")
    theta, coefficient = posmom_squeezing_homodyne_optimum(spec.r, tau)
    bracket = lambda_tilde + spec.T * coefficient
    return PrecisionBound.from_dimensionless(2.0 * bracket * bracket, Homodyne(theta), lambda_sql)
