"""Johnson-Cook flow stress and the derived crush-cell force law.

The flow stress multiplies strain hardening, logarithmic rate sensitivity
and thermal softening. The crush law collapses it to a rate-dependent
plateau force for the reduced-order crash cells: a calibratable stand-in
for tube fold mechanics, not a fold model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .sections import RectHollowSection, compute_properties

if TYPE_CHECKING:
    from .model import MaterialSpec

# DP600 constants as commonly tabulated for this steel (a, b in Pa);
# keys match JCParams fields so JCParams(**DP600_JC) works.
DP600_JC = {"a": 350e6, "b": 902e6, "c": 0.014, "m": 1.23, "n": 0.189}


@dataclass(frozen=True)
class JCParams:
    """Johnson-Cook constants. A, B in Pa; reference strain rate in 1/s."""

    a: float
    b: float
    c: float
    n: float
    m: float
    ref_strain_rate: float = 1.0  # not tabulated for DP600; calibration knob

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("JC yield A and hardening B must be positive")
        if self.c < 0 or self.n < 0:
            raise ValueError("JC rate coefficient C and exponent n must be >= 0")
        if self.ref_strain_rate <= 0:
            raise ValueError("reference strain rate must be positive")


def flow_stress(
    params: JCParams,
    plastic_strain: float,
    strain_rate: float,
    homologous_temp: float = 0.0,
) -> float:
    """Flow stress [Pa] at the given plastic strain, strain rate and T*.

    sigma = (A + B*eps^n) * (1 + C*ln(rate/rate0)) * (1 - T*^m)
    """
    if plastic_strain < 0:
        raise ValueError("plastic strain must be >= 0")
    if strain_rate <= 0:
        raise ValueError("strain rate must be positive (log domain)")
    if not (0.0 <= homologous_temp <= 1.0):
        raise ValueError("homologous temperature must be in [0, 1]")

    hardening = params.a + params.b * plastic_strain**params.n
    rate_term = 1.0 + params.c * math.log(strain_rate / params.ref_strain_rate)
    thermal = 1.0 - homologous_temp**params.m
    return hardening * rate_term * thermal


@dataclass(frozen=True)
class CrushLaw:
    """Rate-dependent crush plateau plus elastic pre-crush stiffness.

    plateau(rate) = efficiency * sigma_flow(eps_ref, rate, 0) * area
    """

    jc: JCParams
    area: float  # m^2, aggregate section area feeding the cell
    efficiency: float  # mean-crush-force efficiency, (0, 1]
    effective_strain: float  # eps_ref in the plateau evaluation
    elastic_stiffness: float  # N/m, EA/L of the cell
    densification_fraction: float  # crush/length ratio where lock-up starts

    def plateau(self, strain_rate: float) -> float:
        """Plateau force [N] at the given crush strain rate [1/s]."""
        rate = max(strain_rate, self.jc.ref_strain_rate)
        return self.efficiency * flow_stress(self.jc, self.effective_strain, rate) * self.area


def crush_law(
    section: RectHollowSection,
    material: "MaterialSpec",
    efficiency: float,
    cell_length: float,
    effective_strain: float = 0.3,
    densification_fraction: float = 0.7,
    area_override: float | None = None,
) -> CrushLaw:
    """Reduce a tube section + JC material to a crush cell law.

    `area_override` lets the crash chain feed an aggregate area (several
    parallel members collapsed into one strand).
    """
    if not (0 < efficiency <= 1):
        raise ValueError("crush efficiency must be in (0, 1]")
    if cell_length <= 0:
        raise ValueError("cell length must be positive")
    if not (0 < densification_fraction < 1):
        raise ValueError("densification fraction must be in (0, 1)")
    if material.jc is None:
        raise ValueError(f"material '{material.name}' has no Johnson-Cook block")

    area = area_override if area_override is not None else compute_properties(section).area
    return CrushLaw(
        jc=material.jc,
        area=area,
        efficiency=efficiency,
        effective_strain=effective_strain,
        elastic_stiffness=material.youngs_modulus * area / cell_length,
        densification_fraction=densification_fraction,
    )
