import pytest

from framegate.units import (
    DEFAULT_UNITS,
    SI_UNITS,
    UnknownUnitError,
    factor,
    to_si,
)


def test_si_tags_are_identity():
    for family, tag in SI_UNITS.items():
        if family == "angle":
            continue  # angles stay in degrees at the file boundary
        assert factor(family, tag) == 1.0, family


def test_default_tags_are_registered():
    for family, tag in DEFAULT_UNITS.items():
        assert factor(family, tag) > 0


def test_common_factors():
    assert to_si(1.0, "length", "mm") == 1e-3
    assert to_si(1.0, "stress", "MPa") == 1e6
    assert to_si(1.0, "force", "kN") == 1e3
    assert to_si(36.0, "speed", "km/h") == pytest.approx(10.0)
    assert to_si(60.0, "speed", "mm/min") == pytest.approx(1e-3)
    assert to_si(1.0, "time", "ms") == 1e-3
    assert to_si(1.0, "mass", "t") == 1e3


def test_unknown_tag_raises():
    with pytest.raises(UnknownUnitError):
        factor("length", "furlong")
    with pytest.raises(UnknownUnitError):
        factor("volume", "m^3")
