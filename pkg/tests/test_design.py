import dataclasses

import pytest

from framegate.assembly import AnalysisSettings
from framegate.crash import CrashMetrics
from framegate.design import (
    DesignVector,
    GateRow,
    apply_module_design,
    brute_force_module,
    design_loop,
    evaluate_design,
    evaluate_static,
    gate,
    module_frequency,
    module_interface_nodes,
    module_mass,
    module_members,
    module_submodel,
    optimize_module,
)
from framegate.model import MODULE_TAGS, TargetSet
from framegate.static import AnalysisError


def _metrics(scenario, intrusion_mm, decel_g=0.0, intr_vel=0.0, plate=None):
    return CrashMetrics(
        scenario=scenario,
        max_intrusion=intrusion_mm * 1e-3,
        peak_decel=decel_g * 9.81,
        max_intrusion_velocity=intr_vel,
        end_time=0.09,
        energy={},
        plate_velocity_mm_min=plate,
    )


def test_gate_row_arithmetic():
    row = GateRow("f", target=38.0, result=41.8, sense="min", units="Hz")
    assert row.deviation_pct == pytest.approx(10.0)
    assert row.passed
    row = GateRow("m", target=250.0, result=275.0, sense="max", units="kg")
    assert row.deviation_pct == pytest.approx(-10.0)
    assert not row.passed
    # sitting exactly on the limit is a pass
    assert GateRow("x", 12.0, 12.0, "min", "u").passed
    assert GateRow("x", 12.0, 12.0, "max", "u").passed
    with pytest.raises(ValueError):
        GateRow("x", 1.0, 1.0, "at-least", "u")


def test_gate_builds_expected_rows():
    report = gate(TargetSet(), frequency_hz=40.0, bending_kn_mm=11.0,
                  torsion_knm_deg=13.0, biw_mass_kg=200.0, total_mass_kg=990.0,
                  crash={"frontal": _metrics("frontal", 80.0, decel_g=25.0)})
    names = [r.name for r in report.rows]
    assert names[:5] == ["first_natural_frequency", "bending_stiffness",
                         "torsional_stiffness", "biw_mass", "total_mass"]
    assert "frontal:max_intrusion_mm" in names
    assert "frontal:max_deceleration_g" in names
    assert report.passed
    assert report.row("biw_mass").deviation_pct == pytest.approx(20.0)
    with pytest.raises(KeyError):
        report.row("no_such_row")


def test_gate_rejects_crash_scenario_without_targets():
    with pytest.raises(KeyError):
        gate(TargetSet(), 40.0, 11.0, 13.0, 200.0,
             crash={"sideswipe": _metrics("sideswipe", 10.0)})


def test_crash_block_deviation_takes_worst_row():
    report = gate(TargetSet(), 40.0, 11.0, 13.0, 200.0,
                  crash={"frontal": _metrics("frontal", 82.0, decel_g=25.0)})
    # intrusion margin 25.45%, decel margin 16.67%: the block scores 16.67
    assert report.crash_block_deviation("frontal") == pytest.approx(16.67, abs=0.01)
    with pytest.raises(KeyError):
        report.crash_block_deviation("rear")


def test_report_to_dict_is_plain_data():
    report = gate(TargetSet(), 40.0, 11.0, 13.0, 200.0)
    data = report.to_dict()
    assert data["passed"] is True
    assert all(isinstance(r["result"], float) for r in data["rows"])


# --- module machinery ------------------------------------------------------


def test_every_module_has_members_and_interfaces(demo):
    for tag in MODULE_TAGS:
        assert module_members(demo, tag), tag
        assert module_interface_nodes(demo, tag), tag
        assert module_mass(demo, tag) > 0.0


def test_module_submodel_is_pinned_and_self_contained(demo):
    sub = module_submodel(demo, "Roof")
    assert set(sub.members) == set(module_members(demo, "Roof"))
    used = {n for m in sub.members.values() for n in (m.node_i, m.node_j)}
    assert set(sub.nodes) == used
    pins = sub.constraint_sets["interface"]
    assert {c.node for c in pins} == set(module_interface_nodes(demo, "Roof"))
    assert module_frequency(demo, "Roof") > 0.0


def test_apply_module_design_changes_only_that_module(demo):
    design = DesignVector(0.05, 0.05, 0.001)
    updated = apply_module_design(demo, "Front", design)
    front = set(module_members(demo, "Front"))
    for mid, member in updated.members.items():
        if mid in front:
            assert member.section == "front_sized"
        else:
            assert member.section == demo.members[mid].section
    sec = updated.sections["front_sized"]
    assert (sec.outer_width, sec.outer_height, sec.wall_thickness) == design.as_tuple()
    # the original model is untouched
    assert all(demo.members[mid].section != "front_sized" for mid in front)
    assert "front_sized" not in demo.sections


# --- optimizer -------------------------------------------------------------

SMALL_WIDTHS = (0.050, 0.060, 0.070)
SMALL_THICK = (0.0008, 0.0012)


def test_coordinate_descent_matches_brute_force_on_reduced_grid(demo):
    kwargs = dict(widths=SMALL_WIDTHS, heights=SMALL_WIDTHS,
                  thicknesses=SMALL_THICK)
    cd = optimize_module(demo, "Roof", **kwargs)
    bf = brute_force_module(demo, "Roof", **kwargs)
    assert cd.design == bf.design
    assert cd.frequency_hz == pytest.approx(bf.frequency_hz, rel=1e-12)
    assert cd.module_mass_kg == pytest.approx(bf.module_mass_kg, rel=1e-12)
    assert cd.n_evaluations <= bf.n_evaluations


def test_optimizer_respects_bounds_and_budget(demo):
    budget = module_mass(demo, "Roof") * 1.05
    res = optimize_module(demo, "Roof", mass_budget=budget,
                          widths=SMALL_WIDTHS, heights=SMALL_WIDTHS,
                          thicknesses=SMALL_THICK)
    b, h, t = res.design.as_tuple()
    assert b in SMALL_WIDTHS and h in SMALL_WIDTHS and t in SMALL_THICK
    assert res.module_mass_kg <= budget + 1e-9
    assert res.n_sweeps >= 1


def test_optimizer_impossible_budget_raises(demo):
    with pytest.raises(AnalysisError, match="budget"):
        optimize_module(demo, "Roof", mass_budget=0.1,
                        widths=SMALL_WIDTHS, heights=SMALL_WIDTHS,
                        thicknesses=SMALL_THICK)


def test_optimizer_unknown_module(demo):
    model = dataclasses.replace(demo, members={
        mid: m for mid, m in demo.members.items() if m.module_tag != "Roof"})
    with pytest.raises(AnalysisError, match="Roof"):
        optimize_module(model, "Roof")


# --- evaluation and the loop ----------------------------------------------


def test_evaluate_static_skips_crash(demo, coarse):
    report, ev = evaluate_design(demo, coarse, include_crash=False)
    assert len(report.rows) == 5
    assert ev.crash == {}
    assert ev.frequency_hz > 38.0


def test_evaluate_static_matches_design_row_inputs(demo, coarse):
    ev = evaluate_static(demo, coarse)
    report, _ = evaluate_design(demo, coarse, include_crash=False)
    assert report.row("first_natural_frequency").result == pytest.approx(
        ev.frequency_hz)
    assert report.row("bending_stiffness").result == pytest.approx(ev.bending.value)


def test_design_loop_reports_honest_failure_on_unreachable_target(demo, coarse):
    hard = dataclasses.replace(demo.targets, natural_frequency_min_hz=1000.0)
    model = dataclasses.replace(demo, targets=hard)
    res = design_loop(model, coarse, max_tries=1)
    assert not res.passed
    assert res.tries_used == 1
    assert [it.action for it in res.iterations] == ["gate", "optimize:all", "gate"]
    assert any("first_natural_frequency" in name
               for name in res.iterations[-1].failing_rows)
    assert res.report.row("first_natural_frequency").deviation_pct < 0.0
