"""Unit tags and conversion to internal SI.

Internals are strict SI (m, kg, s, N, Pa, rad). Model files declare units
per field family; the defaults mirror the usual automotive presentation
(lengths in mm, E in MPa, speeds in km/h).
"""

from __future__ import annotations

# family -> {tag: factor to SI}
_FACTORS = {
    "length": {"m": 1.0, "mm": 1e-3, "cm": 1e-2},
    "force": {"N": 1.0, "kN": 1e3},
    "moment": {"N*m": 1.0, "kN*m": 1e3, "N*mm": 1e-3},
    "stress": {"Pa": 1.0, "MPa": 1e6, "GPa": 1e9},
    "density": {"kg/m^3": 1.0},
    "mass": {"kg": 1.0, "t": 1e3},
    "speed": {"m/s": 1.0, "km/h": 1.0 / 3.6, "mm/min": 1e-3 / 60.0},
    "time": {"s": 1.0, "ms": 1e-3},
    "angle": {"deg": 1.0, "rad": 57.29577951308232},  # angles kept in degrees at the file boundary
}

DEFAULT_UNITS = {
    "length": "mm",
    "force": "N",
    "moment": "N*m",
    "stress": "MPa",
    "density": "kg/m^3",
    "mass": "kg",
    "speed": "km/h",
    "time": "ms",
    "angle": "deg",
}

#: Unit tags the serializer emits so that re-parsing multiplies by exactly 1.0.
SI_UNITS = {
    "length": "m",
    "force": "N",
    "moment": "N*m",
    "stress": "Pa",
    "density": "kg/m^3",
    "mass": "kg",
    "speed": "m/s",
    "time": "s",
    "angle": "deg",
}


class UnknownUnitError(ValueError):
    """Raised for a unit tag not registered for its field family."""


def factor(family: str, tag: str) -> float:
    """Conversion factor from `tag` to the family's SI unit."""
    try:
        fam = _FACTORS[family]
    except KeyError:
        raise UnknownUnitError(f"unknown unit family '{family}'") from None
    try:
        return fam[tag]
    except KeyError:
        raise UnknownUnitError(
            f"unknown unit '{tag}' for family '{family}' (known: {sorted(fam)})"
        ) from None


def to_si(value: float, family: str, tag: str) -> float:
    return value * factor(family, tag)
