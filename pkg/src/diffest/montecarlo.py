"""Monte Carlo sampling of measurement outcomes and maximum-likelihood estimation.

Random streams are counter based: chunk ``i`` of replicate ``k`` draws from
``PCG64(SeedSequence(seed, spawn_key=(k, i)))``. Any chunk can therefore be
generated independently, and results do not depend on the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, UninformativeMeasurementError
from .fisher import (
    Heterodyne,
    Homodyne,
    MeasurementScheme,
    homodyne_diffusion_gain,
    homodyne_variance,
    scheme_bound,
)
from .gaussian import (
    CovMatrix2,
    SqueezedThermalSpec,
    comoving_covariance,
    dcov_dlambda_comoving,
    initial_covariance,
)

__all__ = [
    "DEFAULT_CHUNK",
    "ExperimentRun",
    "EstimationReport",
    "sample_homodyne",
    "sample_heterodyne",
    "mle_lambda",
    "saturation_study",
    "ratio_half_width",
]

DEFAULT_CHUNK = 1 << 16


def _chunk_rng(seed: int, key: tuple, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(*key, chunk))
    return np.random.Generator(np.random.PCG64(ss))


def _standard_normals(n: int, seed: int, key: tuple, chunk_size: int, threads: int, width: int = 1) -> np.ndarray:
    """``n`` rows of ``width`` standard normals assembled chunk by chunk in order."""
    if n < 1:
        raise ValueError(f"number of samples must be >= 1, got {n}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    out = np.empty((n, width))
    bounds = [(i, lo, min(lo + chunk_size, n)) for i, lo in enumerate(range(0, n, chunk_size))]

    def fill(b):
        i, lo, hi = b
        out[lo:hi] = _chunk_rng(seed, key, i).standard_normal((hi - lo, width))

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, bounds))
    else:
        for b in bounds:
            fill(b)
    return out if width > 1 else out[:, 0]


def sample_homodyne(
    theta: float,
    spec: SqueezedThermalSpec,
    tau: float,
    lambda_tilde: float,
    n: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int = 1,
    key: tuple = (),
) -> np.ndarray:
    """``n`` outcomes of quadrature ``theta`` measured on the evolved state."""
    var = homodyne_variance(theta, spec, tau, lambda_tilde)
    return math.sqrt(var) * _standard_normals(n, seed, key, chunk_size, threads)


def _heterodyne_comoving(spec: SqueezedThermalSpec, tau: float, lambda_tilde: float) -> np.ndarray:
    # S^-1 (sigma + I) S^-T with S the free-flight shear.
    shear_inv_sq = CovMatrix2(1.0 + tau * tau, -tau, 1.0)
    return (comoving_covariance(initial_covariance(spec), tau, lambda_tilde) + shear_inv_sq).as_array()


def _shear(tau: float) -> np.ndarray:
    return np.array([[1.0, tau], [0.0, 1.0]])


def sample_heterodyne(
    spec: SqueezedThermalSpec,
    tau: float,
    lambda_tilde: float,
    n: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int = 1,
    key: tuple = (),
) -> np.ndarray:
    """``(n, 2)`` array of simultaneous (x, p) outcomes with covariance ``sigma(tau) + I``."""
    chol = _shear(tau) @ np.linalg.cholesky(_heterodyne_comoving(spec, tau, lambda_tilde))
    z = _standard_normals(n, seed, key, chunk_size, threads, width=2)
    return z @ chol.T


def _homodyne_mle(outcomes, theta, spec, tau, clamp):
    gain = homodyne_diffusion_gain(theta, tau)
    if not gain > 0:
        raise UninformativeMeasurementError(f"quadrature theta={theta} carries no information at tau={tau}")
    base = homodyne_variance(theta, spec, tau, 0.0)
    m2 = float(np.mean(np.square(outcomes)))
    est = (m2 - base) / gain
    return max(est, 0.0) if clamp else est


def _heterodyne_mle(outcomes, spec, tau, clamp):
    y = np.asarray(outcomes, dtype=float)
    if y.ndim != 2 or y.shape[1] != 2:
        raise ValueError("heterodyne outcomes must have shape (n, 2)")
    # Undo the shear so the likelihood is evaluated without tau^2-sized entries.
    y = y @ np.linalg.inv(_shear(tau)).T
    S = y.T @ y / len(y)
    base = _heterodyne_comoving(spec, tau, 0.0)
    D = dcov_dlambda_comoving(tau).as_array()

    def nll(lt):
        C = base + lt * D
        sign, logdet = np.linalg.slogdet(C)
        if sign <= 0:
            return np.inf
        return logdet + np.trace(np.linalg.solve(C, S))

    moment = np.trace(S - base) / np.trace(D)
    # Lower end: where base + lt*D stops being positive definite.
    w = np.linalg.eigvals(np.linalg.solve(base, D)).real.max()
    lo = 0.0 if clamp else -(1.0 - 1e-9) / w
    hi = max(moment, 0.0) * 4.0 + np.trace(base) / np.trace(D)
    while True:
        res = minimize_scalar(nll, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * max(hi, 1e-300)})
        if res.x < hi * (1 - 1e-6):
            return float(res.x)
        hi *= 4.0


def mle_lambda(
    outcomes,
    scheme: MeasurementScheme,
    spec: SqueezedThermalSpec,
    tau: float,
    clamp: bool = True,
) -> float:
    """Maximum-likelihood estimate of ``lambda_tilde``.

    Homodyne uses the closed-form inversion of the affine variance; heterodyne
    maximises the bivariate Gaussian likelihood numerically. With ``clamp``
    the estimate is restricted to ``lambda_tilde >= 0``.
    """
    if len(outcomes) < 2:
        raise ValueError("need at least two outcomes")
    if isinstance(scheme, Homodyne):
        return _homodyne_mle(outcomes, scheme.theta, spec, tau, clamp)
    if isinstance(scheme, Heterodyne):
        return _heterodyne_mle(outcomes, spec, tau, clamp)
    raise ConfigError(f"no sampling model for scheme {scheme.name!r}")


@dataclass(frozen=True)
class ExperimentRun:
    scheme: MeasurementScheme
    spec: SqueezedThermalSpec
    tau: float
    true_lambda_tilde: float
    samples: int
    seed: int
    chunk_size: int = DEFAULT_CHUNK
    clamp: bool = True

    def __post_init__(self):
        if self.samples < 2:
            raise ConfigError(f"samples must be >= 2, got {self.samples}")
        if self.chunk_size < 1:
            raise ConfigError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if not self.true_lambda_tilde >= 0:
            raise ConfigError("true lambda_tilde must be >= 0")
        if not isinstance(self.scheme, (Homodyne, Heterodyne)):
            raise ConfigError(f"no sampling model for scheme {self.scheme.name!r}")

    def outcomes(self, replicate: int = 0, threads: int = 1) -> np.ndarray:
        args = (self.spec, self.tau, self.true_lambda_tilde, self.samples, self.seed, self.chunk_size, threads, (replicate,))
        if isinstance(self.scheme, Homodyne):
            return sample_homodyne(self.scheme.theta, *args)
        return sample_heterodyne(*args)

    def estimate(self, replicate: int = 0, threads: int = 1) -> float:
        return mle_lambda(self.outcomes(replicate, threads), self.scheme, self.spec, self.tau, self.clamp)


def ratio_half_width(ratio: float, n_replicates: int, z: float = 1.96) -> float:
    """Normal-theory 95% half-width of a variance ratio from ``n`` replicates."""
    return z * ratio * math.sqrt(2.0 / (n_replicates - 1))


@dataclass(frozen=True)
class EstimationReport:
    estimate_mean: float
    empirical_variance: float
    crb: float
    saturation_ratio: float
    ratio_half_width: float
    n_replicates: int
    clamped_fraction: float = 0.0
    estimates: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        return {
            "estimate_mean": self.estimate_mean,
            "empirical_variance": self.empirical_variance,
            "crb": self.crb,
            "saturation_ratio": self.saturation_ratio,
            "ratio_half_width": self.ratio_half_width,
            "n_replicates": self.n_replicates,
            "clamped_fraction": self.clamped_fraction,
        }


def saturation_study(run: ExperimentRun, n_replicates: int, threads: int = 1) -> EstimationReport:
    """Repeat ``run`` and compare the estimator variance with ``1/(nu F)``.

    Replicates are independent streams and are farmed out to ``threads``
    workers; the result does not depend on the thread count.
    """
    if n_replicates < 2:
        raise ConfigError("need at least two replicates")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            est = np.array(list(pool.map(run.estimate, range(n_replicates))))
    else:
        est = np.array([run.estimate(k) for k in range(n_replicates)])
    bound = scheme_bound(run.scheme, run.spec, run.tau, run.true_lambda_tilde)
    crb = bound.dimensionless_bound / run.samples
    var = float(np.var(est, ddof=1))
    ratio = var / crb
    return EstimationReport(
        estimate_mean=float(np.mean(est)),
        empirical_variance=var,
        crb=crb,
        saturation_ratio=ratio,
        ratio_half_width=ratio_half_width(ratio, n_replicates),
        n_replicates=n_replicates,
        clamped_fraction=float(np.mean(est == 0.0)) if run.clamp else 0.0,
        estimates=est,
    )
