"""Closed-form information ratios for a ground-state input (T = 1, r = 0).

Each ratio is a function of ``(tau, lambda_tilde)`` only. All differences that
cancel at large ``tau`` or small ``lambda_tilde`` are rationalised first.
"""

from __future__ import annotations

import math

from ..errors import DegenerateRegimeError

__all__ = ["ratio_hom_qfi", "ratio_het_qfi", "ratio_het_hom"]


def _pieces(tau: float, lambda_tilde: float):
    if not tau > 0:
        raise ValueError("tau must be positive")
    if lambda_tilde < 0:
        raise ValueError("lambda_tilde must be >= 0")
    t2 = tau * tau
    u = 1.0 + t2 / 3.0
    v = tau**3 * lambda_tilde / 12.0
    a = u + v
    q = math.sqrt(9.0 + 3.0 * t2 + t2 * t2) / 3.0
    # 1 + tau^2/3 + tau^3 lambda/6 - q, with u - q = (tau^2/3) / (u + q)
    gap = t2 / 3.0 / (u + q) + 2.0 * v
    het = (1.0 + 0.5 * tau * lambda_tilde) * (1.0 + t2 / 4.0 + tau**3 * lambda_tilde / 24.0)
    # a^2 - (1/2) u (u + 2v)
    mixed = 0.5 * u * u + u * v + v * v
    return t2, u, v, a, gap, het, mixed


def _excess(tau: float, lambda_tilde: float, a: float) -> float:
    # (x + 1)^2 - 1 with x = lambda tau a
    x = lambda_tilde * tau * a
    return x * (x + 2.0)


def ratio_hom_qfi(tau: float, lambda_tilde: float) -> float:
    """``F_hom(theta_opt) / H``: optimal homodyne CFI over the QFI."""
    if lambda_tilde == 0:
        raise DegenerateRegimeError("QFI diverges for a pure state at lambda = 0")
    t2, u, v, a, gap, het, mixed = _pieces(tau, lambda_tilde)
    return t2 * t2 * _excess(tau, lambda_tilde, a) / (72.0 * gap * gap * mixed)


def ratio_het_qfi(tau: float, lambda_tilde: float) -> float:
    """``F_het / H``: heterodyne CFI over the QFI."""
    if lambda_tilde == 0:
        raise DegenerateRegimeError("QFI diverges for a pure state at lambda = 0")
    t2, u, v, a, gap, het, mixed = _pieces(tau, lambda_tilde)
    return _excess(tau, lambda_tilde, a) * (a * a + (1.0 + t2 / 6.0) ** 2) / (16.0 * het * het * mixed)


def ratio_het_hom(tau: float, lambda_tilde: float) -> float:
    """``F_het / F_hom(theta_opt)``: heterodyne over optimal homodyne CFI."""
    t2, u, v, a, gap, het, mixed = _pieces(tau, lambda_tilde)
    return 9.0 * (a * a + (1.0 + t2 / 6.0) ** 2) * gap * gap / (2.0 * t2 * t2 * het * het)
