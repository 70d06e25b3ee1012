"""Mapping diffusion-rate precision onto CSL collapse parameters.

A sphere of mass ``m`` and radius ``r_S`` under CSL with rate ``lambda`` and
correlation length ``r_C`` diffuses in momentum at

    Lambda = lambda / (4 r_C^2) * (m / m0)^2 * f(r_S / r_C)

so an uncertainty on ``Lambda`` converts linearly into one on ``lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fisher import MeasurementScheme, scheme_bound
from .gaussian import SqueezedThermalSpec
from .scenario import AMU

__all__ = [
    "CslPoint",
    "SphereSpec",
    "SERIES_CROSSOVER",
    "shape_factor_f",
    "shape_factor_series",
    "shape_factor_direct",
    "lambda_from_csl",
    "delta_lambda_csl",
    "single_shot_std_at_zero",
    "min_detectable_rate",
    "min_detectable_curve",
    "load_overlay",
]

#: Below this x the bracket of f loses more than ~3 digits to cancellation.
SERIES_CROSSOVER = 0.5
_SERIES_TERMS = 24


@dataclass(frozen=True)
class CslPoint:
    lambda_csl: float  # s^-1
    r_c: float  # m

    def __post_init__(self):
        if not (self.lambda_csl > 0 and self.r_c > 0):
            raise ValueError("CSL rate and correlation length must be positive")


@dataclass(frozen=True)
class SphereSpec:
    mass: float  # kg
    radius: float  # m
    m0: float = AMU  # reference nucleon mass, kg

    def __post_init__(self):
        for name in ("mass", "radius", "m0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"SphereSpec.{name} must be positive, got {value}")

    @property
    def mass_ratio_sq(self) -> float:
        return (self.mass / self.m0) ** 2


def shape_factor_series(x: float) -> float:
    """Taylor series of ``f`` in ``u = x^2``: ``1 - u/2 + 3u^2/20 - u^3/30 + ...``.

    The general term is ``6 (-1)^n (n-1) u^(n-2) / (n+1)!`` for ``n >= 2``.
    """
    u = x * x
    total = 0.0
    term_u = 1.0
    fact = 6.0  # (n+1)! at n = 2
    for n in range(2, 2 + _SERIES_TERMS):
        total += (-1) ** n * (n - 1) * term_u / fact
        term_u *= u
        fact *= n + 2
    return 6.0 * total


def shape_factor_direct(x: float) -> float:
    """Closed form, regrouped as ``(1 + e^-u) - (2/u)(1 - e^-u)`` for accuracy."""
    u = x * x
    one_minus = -math.expm1(-u)
    bracket = (2.0 - one_minus) - 2.0 / u * one_minus
    return 6.0 / (u * u) * bracket


def shape_factor_f(x: float) -> float:
    """CSL geometry factor for a sphere; decreases from 1 at 0 to ``6/x^4`` at infinity."""
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise ValueError(f"shape factor argument must be positive, got {x}")
    if x < SERIES_CROSSOVER:
        return shape_factor_series(x)
    return shape_factor_direct(x)


def lambda_from_csl(point: CslPoint, sphere: SphereSpec) -> float:
    """Momentum diffusion rate (m^-2 s^-1) induced by CSL."""
    f = shape_factor_f(sphere.radius / point.r_c)
    return point.lambda_csl / (4.0 * point.r_c**2) * sphere.mass_ratio_sq * f


def delta_lambda_csl(delta_Lambda: float, r_c: float, sphere: SphereSpec) -> float:
    """Uncertainty on the collapse rate corresponding to ``delta_Lambda``."""
    if not r_c > 0:
        raise ValueError(f"r_c must be positive, got {r_c}")
    f = shape_factor_f(sphere.radius / r_c)
    return 4.0 * r_c**2 / (sphere.mass_ratio_sq * f) * delta_Lambda


def single_shot_std_at_zero(
    scheme: MeasurementScheme, spec: SqueezedThermalSpec, tau: float, lambda_sql: float
) -> float:
    """Single-shot standard deviation of the diffusion estimate in the limit Lambda -> 0.

    Raises the degenerate-regime error for schemes whose bound has no such
    limit (the quantum bound of a pure input state).
    """
    return scheme_bound(scheme, spec, tau, 0.0, lambda_sql).std()


def min_detectable_rate(lambda0: float, nu: float) -> float:
    """Threshold rule ``lambda_min = 2 lambda0 / sqrt(nu)``."""
    if not nu >= 1:
        raise ValueError(f"repetitions must be >= 1, got {nu}")
    return 2.0 / math.sqrt(nu) * lambda0


def min_detectable_curve(
    r_c,
    scheme: MeasurementScheme,
    spec: SqueezedThermalSpec,
    tau: float,
    lambda_sql: float,
    sphere: SphereSpec,
    nu: float,
) -> np.ndarray:
    """``lambda_min`` over an array of correlation lengths."""
    std0 = single_shot_std_at_zero(scheme, spec, tau, lambda_sql)
    return np.array([min_detectable_rate(delta_lambda_csl(std0, rc, sphere), nu) for rc in np.atleast_1d(r_c)])


def load_overlay(path) -> np.ndarray:
    """Read a two-column ``(r_C [m], lambda [s^-1])`` text file; ``#`` starts a comment."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"overlay file {path} must have exactly two columns, got {data.shape[1]}")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"overlay file {path} contains non-finite values")
    return data
