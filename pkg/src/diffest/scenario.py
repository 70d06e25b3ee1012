"""Physical scenario: SI inputs and the dimensionless quantities derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants

__all__ = [
    "HBAR",
    "AMU",
    "TABLE1_LAMBDA_SQL",
    "TABLE1_TAU",
    "YEAR",
    "Scenario",
    "lambda_sql",
    "scenario_derive",
    "repetitions_from_duration",
]

HBAR = constants.hbar
AMU = constants.physical_constants["atomic mass constant"][0]
YEAR = 365.25 * 86400.0

# Literal values quoted in the MAQRO parameter table. They are not consistent
# with the table's own m, omega and t, so they are only used on request.
TABLE1_LAMBDA_SQL = 1.6e26
TABLE1_TAU = 6.3e7


def lambda_sql(mass: float, omega: float) -> float:
    """Diffusion rate ``m omega^2 / (4 hbar)`` in m^-2 s^-1 used for normalisation."""
    return mass * omega * omega / (4.0 * HBAR)


@dataclass(frozen=True)
class Scenario:
    mass: float  # kg
    omega: float  # rad/s
    time: float  # s
    lambda_: float  # m^-2 s^-1
    sphere_radius: float  # m
    repetitions: int
    tau: float
    lambda_sql: float
    lambda_tilde: float
    table1_literal: bool = False


def scenario_derive(
    mass: float,
    omega: float,
    time: float,
    lambda_: float = 0.0,
    sphere_radius: float = 100e-9,
    repetitions: int = 1,
    table1_literal: bool = False,
) -> Scenario:
    """Fill in ``tau``, ``lambda_sql`` and ``lambda_tilde`` from SI inputs.

    With ``table1_literal`` the quoted table values of ``tau`` and
    ``lambda_sql`` replace the formula-derived ones.
    """
    for name, value in (("mass", mass), ("omega", omega), ("time", time), ("sphere_radius", sphere_radius)):
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be positive, got {value}")
    if not (math.isfinite(lambda_) and lambda_ >= 0):
        raise ValueError(f"lambda must be >= 0, got {lambda_}")
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    if table1_literal:
        tau, lsql = TABLE1_TAU, TABLE1_LAMBDA_SQL
    else:
        tau, lsql = omega * time, lambda_sql(mass, omega)
    return Scenario(
        mass=mass,
        omega=omega,
        time=time,
        lambda_=lambda_,
        sphere_radius=sphere_radius,
        repetitions=int(repetitions),
        tau=tau,
        lambda_sql=lsql,
        lambda_tilde=lambda_ / lsql,
        table1_literal=table1_literal,
    )


def repetitions_from_duration(total_seconds: float, shot_time: float, duty_cycle: float = 1.0) -> int:
    """Number of shots ``floor(duty_cycle * total / t)`` that fit in an observation window."""
    if shot_time <= 0 or total_seconds <= 0:
        raise ValueError("durations must be positive")
    if not 0 < duty_cycle <= 1:
        raise ValueError(f"duty cycle must lie in (0, 1], got {duty_cycle}")
    return int(math.floor(duty_cycle * total_seconds / shot_time))
