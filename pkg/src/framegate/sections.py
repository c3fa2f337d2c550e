"""Rectangular hollow profiles and their cross-section properties.

Local convention: the member's local y axis lies along the section height h,
local z along the width b. I_z resists bending that deflects along local y
(depth h), I_y the transposed case. Walls are thin (0.7-1.2 mm on 40-70 mm
sides), so the torsion constant uses the single-cell Bredt formula.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RectHollowSection:
    """Hollow rectangular tube, SI units (m)."""

    outer_width: float  # b, along local z
    outer_height: float  # h, along local y
    wall_thickness: float  # t, uniform

    def __post_init__(self):
        b, h, t = self.outer_width, self.outer_height, self.wall_thickness
        if not (b > 0 and h > 0):
            raise ValueError("section outer dimensions must be positive")
        if not (0 < t < min(b, h) / 2):
            raise ValueError(
                f"wall thickness invalid: t < min(b,h)/2 violated (t={t}, b={b}, h={h})"
            )


@dataclass(frozen=True)
class SectionProperties:
    """Derived properties of a hollow rectangular tube, SI units."""

    area: float  # m^2
    i_y: float  # m^4, bending inertia (deflection along local z / width b)
    i_z: float  # m^4, bending inertia (deflection along local y / depth h)
    torsion_j: float  # m^4, Bredt single-cell constant
    shear_area_y: float  # m^2, walls carrying local-y shear (the two h-walls)
    shear_area_z: float  # m^2, walls carrying local-z shear (the two b-walls)


def compute_properties(section: RectHollowSection) -> SectionProperties:
    """Area, bending inertias, Bredt torsion constant and shear areas.

    Sharp-corner idealization; corner radii are not modeled.
    """
    b, h, t = section.outer_width, section.outer_height, section.wall_thickness

    bi = b - 2 * t
    hi = h - 2 * t
    area = b * h - bi * hi
    i_z = (b * h**3 - bi * hi**3) / 12.0
    i_y = (h * b**3 - hi * bi**3) / 12.0

    # Bredt: J = 4 Am^2 t / pm over the mid-wall contour
    bm = b - t
    hm = h - t
    a_mid = bm * hm
    p_mid = 2.0 * (bm + hm)
    torsion_j = 4.0 * a_mid**2 * t / p_mid

    return SectionProperties(
        area=area,
        i_y=i_y,
        i_z=i_z,
        torsion_j=torsion_j,
        shear_area_y=2.0 * h * t,
        shear_area_z=2.0 * b * t,
    )
