import dataclasses

import pytest

from conftest import STEEL, TUBE_40X40X1, straight_beam_model
from framegate.model import (
    ConstraintSpec,
    MemberSpec,
    NodeGroup,
    NodeSpec,
    MaterialSpec,
    SCENARIO_NAMES,
    ScenarioConfig,
    TargetSet,
    default_scenarios,
    module_masses,
    structural_mass,
    total_lumped_mass,
    validate,
)


def test_node_validation():
    with pytest.raises(ValueError):
        NodeSpec(id=1, position=(0.0, 0.0, 0.0), lumped_mass=-1.0)
    with pytest.raises(ValueError):
        NodeSpec(id=1, position=(0.0, float("nan"), 0.0))


def test_material_validation():
    with pytest.raises(ValueError):
        MaterialSpec(name="m", youngs_modulus=0.0, poisson_ratio=0.3, density=7850)
    with pytest.raises(ValueError):
        MaterialSpec(name="m", youngs_modulus=210e9, poisson_ratio=0.5, density=7850)
    with pytest.raises(ValueError):
        MaterialSpec(name="m", youngs_modulus=210e9, poisson_ratio=0.3, density=0.0)
    assert STEEL.shear_modulus == pytest.approx(210e9 / 2.6)


def test_member_validation():
    with pytest.raises(ValueError):
        MemberSpec(id=1, node_i=3, node_j=3, section="s", material="m",
                   module_tag="Deck")
    with pytest.raises(ValueError):
        MemberSpec(id=1, node_i=1, node_j=2, section="s", material="m",
                   module_tag="Chassis")


def test_constraint_and_group_validation():
    with pytest.raises(ValueError):
        ConstraintSpec(node=1, dofs=())
    with pytest.raises(ValueError):
        ConstraintSpec(node=1, dofs=("Ux", "Qz"))
    with pytest.raises(ValueError):
        NodeGroup(nodes=(1, 2), fractions=(0.5,))
    with pytest.raises(ValueError):
        NodeGroup(nodes=(1, 2), fractions=(0.5, 0.6))


@pytest.mark.parametrize("kwargs", [
    {"kind": "implicit"},
    {"barrier": "honeycomb"},
    {"n_cells": 0},
    {"n_strands": 0},
    {"n_cells": 4, "cell_grading": (1.0, 1.0)},
    {"n_cells": 4, "mass_fractions": (0.5, 0.5)},
    {"n_cells": 2, "mass_fractions": (0.5, 0.4, 0.2)},
])
def test_scenario_validation(kwargs):
    with pytest.raises(ValueError):
        ScenarioConfig(name="x", **kwargs)


def test_target_set_rejects_nonpositive_limits():
    with pytest.raises(ValueError):
        TargetSet(natural_frequency_min_hz=0.0)
    with pytest.raises(ValueError):
        TargetSet(crash={"frontal": {"max_intrusion_mm": -1.0}})


def test_default_scenarios_cover_all_four():
    scs = default_scenarios()
    assert set(scs) == set(SCENARIO_NAMES)
    assert scs["frontal"].speed == pytest.approx(55.0 / 3.6)
    assert scs["lateral"].barrier == "deformable"
    assert scs["lateral"].angle_deg == pytest.approx(27.0)
    assert scs["roof"].kind == "quasi_static"


def test_member_geometry_helpers():
    model = straight_beam_model(length=2.0)
    assert model.member_length(1) == pytest.approx(2.0)
    assert model.member_mass(1) == pytest.approx(7850.0 * 156e-6 * 2.0, rel=1e-9)


def test_structural_mass_counts_only_structural_lumps():
    model = straight_beam_model()
    nodes = dict(model.nodes)
    nodes[3] = NodeSpec(id=3, position=(1.0, 1.0, 0.0), lumped_mass=25.0,
                        mass_is_structural=False)
    nodes[1] = dataclasses.replace(nodes[1], lumped_mass=4.0,
                                   mass_is_structural=True)
    model = dataclasses.replace(model, nodes=nodes)
    member = model.member_mass(1)
    assert structural_mass(model) == pytest.approx(member + 4.0)
    assert total_lumped_mass(model) == pytest.approx(29.0)


def test_functional_updates_do_not_mutate():
    model = straight_beam_model()
    bigger = dataclasses.replace(TUBE_40X40X1, outer_width=0.050)
    updated = model.with_sections({"big": bigger}).with_member_sections({1: "big"})
    assert updated.members[1].section == "big"
    assert model.members[1].section == "tube"
    assert "big" not in model.sections


def test_validate_demo_is_clean(demo):
    report = validate(demo)
    assert report.ok
    assert report.errors == ()
    assert report.structural_mass_kg == pytest.approx(structural_mass(demo))
    assert all(m > 0 for m in report.module_masses_kg.values())


def test_module_masses_sum_close_to_structural(demo):
    # lumped masses at shared nodes stay unassigned, so the module split is
    # bounded by, and close to, the frame total
    per_module = module_masses(demo)
    assert sum(per_module.values()) <= structural_mass(demo) + 1e-9


def _broken(model, **replacements):
    return dataclasses.replace(model, **replacements)


def test_validate_catches_reference_errors():
    model = straight_beam_model()
    missing_node = _broken(model, members={
        1: dataclasses.replace(model.members[1], node_j=99)})
    assert any("node 99" in e for e in validate(missing_node).errors)

    bad_section = _broken(model, members={
        1: dataclasses.replace(model.members[1], section="ghost")})
    assert any("section 'ghost'" in e for e in validate(bad_section).errors)

    bad_material = _broken(model, members={
        1: dataclasses.replace(model.members[1], material="ghost")})
    assert any("material 'ghost'" in e for e in validate(bad_material).errors)


def test_validate_catches_geometry_errors():
    model = straight_beam_model()
    parallel = _broken(model, members={
        1: dataclasses.replace(model.members[1], orientation=(1.0, 0.0, 0.0))})
    assert any("parallel" in e for e in validate(parallel).errors)

    zero_orient = _broken(model, members={
        1: dataclasses.replace(model.members[1], orientation=(0.0, 0.0, 0.0))})
    assert any("orientation" in e for e in validate(zero_orient).errors)


def test_validate_catches_disconnected_frame():
    model = straight_beam_model()
    nodes = dict(model.nodes)
    nodes[7] = NodeSpec(id=7, position=(5.0, 5.0, 5.0))
    floating = dataclasses.replace(model, nodes=nodes)
    assert any("not connected" in e for e in validate(floating).errors)


def test_validate_catches_bad_set_references():
    model = straight_beam_model()
    bad = dataclasses.replace(
        model,
        node_groups={"g": NodeGroup(nodes=(42,))},
        constraint_sets={"c": (ConstraintSpec(node=43, dofs=("Ux",)),)},
        member_groups={"m": (44,)},
    )
    errors = validate(bad).errors
    assert any("node group 'g'" in e for e in errors)
    assert any("constraint set 'c'" in e for e in errors)
    assert any("member group 'm'" in e for e in errors)
