"""Fisher information and Cramer-Rao bounds for diffusion estimation."""

from __future__ import annotations

from ..gaussian import SqueezedThermalSpec
from .core import (
    MOMENTUM,
    POSITION,
    Heterodyne,
    Homodyne,
    MeasurementScheme,
    PrecisionBound,
    SldOptimal,
    canonical_theta,
    gaussian_cfi,
    qfi_numeric,
)
from .heterodyne import heterodyne_covariance, heterodyne_crb, heterodyne_crb_generic
from .homodyne import (
    chi,
    homodyne_crb,
    homodyne_crb_generic,
    homodyne_diffusion_gain,
    homodyne_variance,
    momentum_crb,
    optimal_homodyne_angle,
    optimal_homodyne_crb,
    optimal_homodyne_squeeze_angle,
    position_crb,
    posmom_squeezing_homodyne_crb,
    posmom_squeezing_homodyne_optimum,
)
from .quantum import (
    optimal_qcrb_squeeze_angle,
    qcrb_branch_select,
    qcrb_candidate_angles,
    qcrb_closed_form,
    qfi_evolved,
    z_factor,
)
from .ratios import ratio_het_hom, ratio_het_qfi, ratio_hom_qfi


def scheme_bound(
    scheme: MeasurementScheme,
    spec: SqueezedThermalSpec,
    tau: float,
    lambda_tilde: float,
    lambda_sql: float = 1.0,
) -> PrecisionBound:
    """Single-shot bound for any measurement scheme."""
    if isinstance(scheme, Homodyne):
        return homodyne_crb(scheme.theta, spec, tau, lambda_tilde, lambda_sql)
    if isinstance(scheme, Heterodyne):
        return heterodyne_crb(spec, tau, lambda_tilde, lambda_sql)
    if isinstance(scheme, SldOptimal):
        return qcrb_closed_form(spec, tau, lambda_tilde, lambda_sql)
    raise TypeError(f"unknown measurement scheme {scheme!r}")


__all__ = [
    "MOMENTUM",
    "POSITION",
    "Heterodyne",
    "Homodyne",
    "MeasurementScheme",
    "PrecisionBound",
    "SldOptimal",
    "canonical_theta",
    "chi",
    "gaussian_cfi",
    "heterodyne_covariance",
    "heterodyne_crb",
    "heterodyne_crb_generic",
    "homodyne_crb",
    "homodyne_crb_generic",
    "homodyne_diffusion_gain",
    "homodyne_variance",
    "momentum_crb",
    "optimal_homodyne_angle",
    "optimal_homodyne_crb",
    "optimal_homodyne_squeeze_angle",
    "optimal_qcrb_squeeze_angle",
    "position_crb",
    "posmom_squeezing_homodyne_crb",
    "posmom_squeezing_homodyne_optimum",
    "qcrb_branch_select",
    "qcrb_candidate_angles",
    "qcrb_closed_form",
    "qfi_evolved",
    "qfi_numeric",
    "ratio_het_hom",
    "ratio_het_qfi",
    "ratio_hom_qfi",
    "scheme_bound",
    "z_factor",
]
