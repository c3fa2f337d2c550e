import json

import pytest

from framegate.modelio import (
    ModelFileError,
    model_from_dict,
    model_to_dict,
    parse_model,
    serialize_model,
)


def minimal_dict() -> dict:
    """A hand-written file in the default units (mm, MPa, km/h, kg)."""
    return {
        "meta": {"name": "mini", "wheelbase": 2500.0, "track_width": 1650.0,
                 "vehicle_mass": 980.0},
        "materials": {
            "steel": {
                "youngs_modulus": 210000.0,  # MPa
                "poisson_ratio": 0.3,
                "density": 7850.0,
                "jc": {"a": 350.0, "b": 902.0, "c": 0.014, "n": 0.189, "m": 1.23},
            }
        },
        "sections": {
            "tube": {"outer_width": 40.0, "outer_height": 40.0,
                     "wall_thickness": 1.0}
        },
        "nodes": [
            {"id": 1, "position": [0.0, 0.0, 0.0]},
            {"id": 2, "position": [2000.0, 0.0, 0.0], "lumped_mass": 5.0,
             "structural": True},
        ],
        "members": [
            {"id": 1, "nodes": [1, 2], "section": "tube", "material": "steel",
             "module": "Deck"}
        ],
        "scenarios": {"frontal": {"speed": 55.0}},  # km/h
        "targets": {"natural_frequency_min_hz": 40.0,
                    "crash": {"frontal": {"max_intrusion_mm": 100.0}}},
    }


def test_default_units_are_converted_to_si():
    model = model_from_dict(minimal_dict())
    assert model.wheelbase == pytest.approx(2.5)
    assert model.track_width == pytest.approx(1.65)
    assert model.nodes[2].position[0] == pytest.approx(2.0)
    assert model.nodes[2].lumped_mass == pytest.approx(5.0)
    assert model.nodes[2].mass_is_structural
    assert model.materials["steel"].youngs_modulus == pytest.approx(210e9)
    assert model.materials["steel"].jc.a == pytest.approx(350e6)
    assert model.sections["tube"].outer_width == pytest.approx(0.040)
    assert model.scenarios["frontal"].speed == pytest.approx(55.0 / 3.6)


def test_scenario_overrides_merge_with_defaults():
    model = model_from_dict(minimal_dict())
    sc = model.scenarios["frontal"]
    assert sc.member_group == "front_rails"  # default preserved
    # untouched scenarios keep their full default configuration
    assert model.scenarios["roof"].kind == "quasi_static"


def test_targets_merge_with_defaults():
    t = model_from_dict(minimal_dict()).targets
    assert t.natural_frequency_min_hz == 40.0
    assert t.bending_stiffness_min_kn_mm == 10.0  # default
    assert t.crash["frontal"]["max_intrusion_mm"] == 100.0
    assert t.crash["frontal"]["max_deceleration_g"] == 30.0  # default kept
    assert t.crash["rear"]["max_intrusion_mm"] == 145.0


def test_explicit_si_units_block():
    data = minimal_dict()
    data["units"] = {"length": "m", "stress": "Pa", "speed": "m/s"}
    data["meta"]["wheelbase"] = 2.5
    data["meta"]["track_width"] = 1.65
    data["materials"]["steel"]["youngs_modulus"] = 210e9
    data["materials"]["steel"]["jc"] = None
    data["sections"]["tube"] = {"outer_width": 0.04, "outer_height": 0.04,
                                "wall_thickness": 0.001}
    for node in data["nodes"]:
        node["position"] = [c * 1e-3 for c in node["position"]]
    data["scenarios"]["frontal"]["speed"] = 55.0 / 3.6
    model = model_from_dict(data)
    assert model.wheelbase == pytest.approx(2.5)
    assert model.nodes[2].position[0] == pytest.approx(2.0)
    assert model.scenarios["frontal"].speed == pytest.approx(55.0 / 3.6)


def test_round_trip_is_identity(demo):
    first = model_to_dict(demo)
    second = model_to_dict(model_from_dict(first))
    assert first == second


def test_file_round_trip(tmp_path, demo):
    path = tmp_path / "demo.json"
    serialize_model(demo, path)
    again = parse_model(path)
    assert model_to_dict(again) == model_to_dict(demo)


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ModelFileError, match="not found"):
        parse_model(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelFileError, match="invalid JSON"):
        parse_model(bad)


def test_errors_carry_field_paths():
    data = minimal_dict()
    del data["meta"]["wheelbase"]
    with pytest.raises(ModelFileError, match="meta"):
        model_from_dict(data)

    data = minimal_dict()
    data["nodes"][0]["position"] = [0.0, 0.0]
    with pytest.raises(ModelFileError, match=r"nodes\[0\].position"):
        model_from_dict(data)

    data = minimal_dict()
    data["members"][0]["nodes"] = [1]
    with pytest.raises(ModelFileError, match=r"members\[0\].nodes"):
        model_from_dict(data)

    data = minimal_dict()
    data["materials"]["steel"]["youngs_modulus"] = "big"
    with pytest.raises(ModelFileError, match="youngs_modulus"):
        model_from_dict(data)


def test_duplicate_ids_rejected():
    data = minimal_dict()
    data["nodes"].append(dict(data["nodes"][0]))
    with pytest.raises(ModelFileError, match="duplicate node id"):
        model_from_dict(data)


def test_unknown_unit_tag_rejected():
    data = minimal_dict()
    data["units"] = {"length": "furlong"}
    with pytest.raises(ModelFileError, match="units.length"):
        model_from_dict(data)


def test_unknown_scenario_field_rejected():
    data = minimal_dict()
    data["scenarios"]["frontal"]["warp_drive"] = 9
    with pytest.raises(ModelFileError, match="warp_drive"):
        model_from_dict(data)


def test_serialized_form_is_valid_json_with_si_tags(tmp_path, demo):
    path = tmp_path / "demo.json"
    serialize_model(demo, path)
    data = json.loads(path.read_text())
    assert data["units"]["length"] == "m"
    assert data["units"]["speed"] == "m/s"
    assert {"meta", "nodes", "members", "materials", "sections"} <= set(data)
