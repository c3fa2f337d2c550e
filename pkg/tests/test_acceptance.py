"""Release acceptance gate: one test per criterion, run with `pytest -v`.

Each test prints a single ``[PASS]``/``[FAIL]`` verdict line and enforces its
own wall-clock budget, so this module doubles as the release checklist.  The
oracles are closed-form hand calculations or committed regression fixtures;
nothing here depends on the outcome of the other test modules.
"""

import functools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import COARSE, straight_beam_model
from framegate.assembly import AnalysisSettings
from framegate.beam import consistent_mass, lumped_mass
from framegate.crash import (
    CrashMetrics,
    CrushCell,
    CrushChain,
    _stable_dt,
    build_chain,
    explicit_integrate,
    run_scenario,
)
from framegate.demo import build_demo_model
from framegate.design import (
    GRID_HEIGHTS,
    GRID_THICKNESSES,
    GRID_WIDTHS,
    brute_force_module,
    design_loop,
    gate,
    module_mass,
    optimize_module,
)
from framegate.material import DP600_JC, JCParams, flow_stress
from framegate.model import ConstraintSpec, LoadSpec, TargetSet, default_scenarios
from framegate.modelio import model_from_dict, model_to_dict
from framegate.report import RunReport, emit_report, model_digest, round6
from framegate.sections import compute_properties
from framegate.static import (
    solve_static,
    torsional_stiffness_eq1,
    torsional_stiffness_eq2,
)

from test_beam import E, G, PROPS, PROPS_RIGID_SHEAR, RHO, _cantilever_tip
from test_properties import _l_frame, _rotation

G_ACCEL = 9.81
FIXTURE = Path(__file__).parent / "data" / "demo_gate_expected.json"


#: verdict lines collected here; conftest prints them in the terminal summary
ACCEPTANCE_LOG: list = []


def criterion(num, label, budget_s=None):
    """Record one verdict line per criterion and enforce its time budget."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_LOG.append(f"[FAIL] criterion {num}: {label}")
                print(f"\n[FAIL] criterion {num}: {label}")
                raise
            elapsed = time.perf_counter() - t0
            ACCEPTANCE_LOG.append(
                f"[PASS] criterion {num}: {label} ({elapsed:.2f}s)")
            if budget_s is not None:
                assert elapsed < budget_s, (
                    f"criterion {num} passed but took {elapsed:.1f}s "
                    f"(budget {budget_s:.0f}s)")
        return wrapper

    return deco


def _stub(scenario, intrusion_mm, decel_g=0.0, intr_vel=0.0, plate=None):
    return CrashMetrics(scenario=scenario, max_intrusion=intrusion_mm * 1e-3,
                        peak_decel=decel_g * G_ACCEL,
                        max_intrusion_velocity=intr_vel, end_time=0.09,
                        energy={}, plate_velocity_mm_min=plate)


@criterion(1, "gate arithmetic reproduces the reference margins", budget_s=1.0)
def test_criterion_1_gate_arithmetic():
    targets = TargetSet()
    beam = gate(targets, frequency_hz=39.70, bending_kn_mm=11.53,
                torsion_knm_deg=11.67, biw_mass_kg=167.0)
    shell = gate(targets, frequency_hz=38.34, bending_kn_mm=10.96,
                 torsion_knm_deg=12.20, biw_mass_kg=167.0)
    assert beam.row("bending_stiffness").deviation_pct == pytest.approx(15.30, abs=1.0)
    assert beam.row("torsional_stiffness").deviation_pct == pytest.approx(-2.75, abs=1.0)
    assert not beam.row("torsional_stiffness").passed
    assert shell.row("torsional_stiffness").deviation_pct == pytest.approx(1.66, abs=1.0)
    assert shell.row("first_natural_frequency").deviation_pct == pytest.approx(0.89, abs=1.0)
    # the reference tabulation swapped these two margins between the beam and
    # shell variants (printed 9.60 / 4.47); the recomputed values are asserted
    assert beam.row("first_natural_frequency").deviation_pct == pytest.approx(4.47, abs=0.01)
    assert shell.row("bending_stiffness").deviation_pct == pytest.approx(9.60, abs=0.01)

    crash = gate(targets, 39.70, 11.53, 11.67, 167.0, crash={
        "frontal": _stub("frontal", 82.0, decel_g=25.0),
        "rear": _stub("rear", 142.0, decel_g=8.5),
        "lateral": _stub("lateral", 44.0, intr_vel=6.45),
        "roof": _stub("roof", 102.2, plate=1.5),
    })
    for scenario, expected in (("frontal", 16.0), ("rear", 2.0),
                               ("lateral", 28.0), ("roof", 19.0)):
        block = crash.crash_block_deviation(scenario)
        assert block == pytest.approx(expected, abs=1.0), scenario
    assert all(r.passed for r in crash.rows if ":" in r.name)


@criterion(2, "Johnson-Cook flow stress hand values", budget_s=1.0)
def test_criterion_2_material_law():
    jc = JCParams(**DP600_JC)
    assert flow_stress(jc, 0.0, 1.0) == 350e6
    assert flow_stress(jc, 0.1, 1.0) == pytest.approx(933.7e6, rel=1e-3)
    # at strain rate e the rate bracket is exactly (1 + C)
    assert flow_stress(jc, 0.0, math.e) == 350e6 * 1.014


@criterion(3, "beam element: cantilever and free-free modal oracles", budget_s=5.0)
def test_criterion_3_beam_oracles():
    # tip deflection P L^3 / 3EI with shear off, four sub-elements
    length, p = 2.0, 1000.0
    expected = p * length**3 / (3.0 * E * PROPS_RIGID_SHEAR.i_z)
    tip = _cantilever_tip(PROPS_RIGID_SHEAR, 4, np.array([0.0, p, 0.0]), length)
    assert tip[1] == pytest.approx(expected, rel=1e-3)

    # free-free beam: exactly six rigid modes, then the classic closed form
    from framegate.modal import modal_analysis
    modes = modal_analysis(straight_beam_model(length=2.0),
                           AnalysisSettings(element_length=0.05), n_modes=8)
    assert modes.n_rigid == 6
    f_expected = (4.730041**2 / (2.0 * math.pi * length**2)
                  * math.sqrt(E * PROPS.i_z / (RHO * PROPS.area)))
    assert modes.first_flexible_hz == pytest.approx(f_expected, rel=0.01)


@criterion(4, "torsional stiffness formulas", budget_s=5.0)
def test_criterion_4_torsion_formulas():
    # 1000 N at a 1.65 m lever, both corners move 5 mm at 0.825 m half-track
    twist = math.degrees(math.atan2(0.005, 0.825))
    k = torsional_stiffness_eq1(1650.0, twist, twist)
    assert k == pytest.approx(4752.0, rel=1e-3)
    # equal side twists collapse the mean exactly
    assert torsional_stiffness_eq1(1650.0, 0.31, 0.31) == 1650.0 / 0.31
    # displacement form reads ~4x the mean-twist value for small angles
    force, lever, u = 1000.0, 1.65, 0.001
    twist = math.degrees(math.atan2(u, lever / 2.0))
    k1 = torsional_stiffness_eq1(force * lever, twist, twist)
    k2 = torsional_stiffness_eq2(force, lever, u)
    assert k2 / k1 == pytest.approx(4.0, rel=5e-3)


@criterion(5, "crash integrator oracles, energy audit, dt convergence",
           budget_s=30.0)
def test_criterion_5_crash_dynamics():
    # elastic contact: half-sine pulse, F_peak = v0 sqrt(k m)
    m, k, v0 = 1000.0, 1e6, 10.0
    chain = CrushChain(masses=np.array([m]),
                       cells=(CrushCell(stiffness=k, length=1.0,
                                        carries_tension=False),))
    metrics, hist = explicit_integrate(chain, speed=v0, duration=0.15, dt=2e-4)
    assert hist.cell_force[:, 0].max() == pytest.approx(v0 * math.sqrt(k * m),
                                                        rel=0.01)
    assert metrics.end_time == pytest.approx(math.pi * math.sqrt(m / k), rel=0.01)

    # rigid-plastic plateau: stopping distance m v0^2 / (2 F_p)
    m, fp, v0 = 1000.0, 400e3, 55.0 / 3.6
    chain = CrushChain(masses=np.array([m]),
                       cells=(CrushCell(stiffness=1e9, length=1.0,
                                        plateau_force=fp,
                                        carries_tension=False),))
    metrics, _ = explicit_integrate(chain, speed=v0, duration=0.05)
    assert metrics.max_intrusion == pytest.approx(m * v0**2 / (2.0 * fp),
                                                  rel=0.01)

    # every bundled scenario closes its energy ledger within 2 percent,
    # and halving dt moves the peak deceleration by under 2 percent
    demo = build_demo_model()
    for name, sc in sorted(default_scenarios().items()):
        base, _ = run_scenario(demo, name)
        assert base.energy["balance_error_rel"] < 0.02, name
        if name == "roof":
            continue  # quasi-static ramp: no explicit time integration
        dt0 = _stable_dt(build_chain(demo, sc), sc.duration)
        halved, _ = run_scenario(demo, name, dt=dt0 / 2.0)
        rel = abs(halved.peak_decel - base.peak_decel) / base.peak_decel
        assert rel < 0.02, name


@criterion(6, "module optimizer matches exhaustive grid search", budget_s=120.0)
def test_criterion_6_optimizer_exactness():
    demo = build_demo_model()
    cd = optimize_module(demo, "Deck")
    bf = brute_force_module(demo, "Deck")
    assert cd.design == bf.design
    assert cd.frequency_hz == bf.frequency_hz
    assert cd.module_mass_kg == bf.module_mass_kg
    assert bf.n_evaluations == (len(GRID_WIDTHS) * len(GRID_HEIGHTS)
                                * len(GRID_THICKNESSES))
    assert cd.n_evaluations < bf.n_evaluations

    # returned candidates respect the section bounds ...
    for result in (cd, bf):
        assert 0.040 <= result.design.width <= 0.070
        assert 0.040 <= result.design.height <= 0.070
        assert 0.0007 <= result.design.thickness <= 0.0012
        assert result.design.width in GRID_WIDTHS
        assert result.design.height in GRID_HEIGHTS
        assert result.design.thickness in GRID_THICKNESSES

    # ... and a mass budget when one is imposed
    budget = module_mass(demo, "Deck")
    capped = optimize_module(demo, "Deck", mass_budget=budget)
    assert capped.module_mass_kg <= budget + 1e-9


@criterion(7, "demo frame passes the full gate deterministically", budget_s=300.0)
def test_criterion_7_design_loop_regression():
    res = design_loop(build_demo_model(), COARSE)
    assert res.passed
    assert res.tries_used <= 6

    expected = json.loads(FIXTURE.read_text())
    assert model_digest(res.model) == expected["model_digest"]
    assert res.tries_used == expected["tries_used"]
    got_rows = {r["name"]: r for r in round6(res.report.to_dict())["rows"]}
    for row in expected["rows"]:
        got = got_rows[row["name"]]
        for key, value in row.items():
            assert got[key] == value, (row["name"], key)
    report = res.report
    assert round6(report.row("first_natural_frequency").result) == expected["frequency_hz"]
    assert round6(report.row("bending_stiffness").result) == expected["bending_kn_mm"]
    assert round6(report.row("torsional_stiffness").result) == expected["torsion_knm_deg"]
    assert round6(report.row("biw_mass").result) == expected["biw_mass_kg"]

    # a second run reproduces the same report to the emitted precision
    res2 = design_loop(build_demo_model(), COARSE)
    assert round6(res2.report.to_dict()) == round6(res.report.to_dict())
    assert model_digest(res2.model) == model_digest(res.model)


@criterion(8, "conservation, frame indifference, round-trip, determinism")
def test_criterion_8_invariants():
    # mass matrices conserve translational mass exactly
    length, total = 1.234, RHO * PROPS.area * 1.234
    for build in (consistent_mass, lumped_mass):
        mm = build(RHO, length, PROPS)
        for d in range(3):
            u = np.zeros(12)
            u[d] = u[d + 6] = 1.0
            assert u @ mm @ u == pytest.approx(total, rel=1e-12)

    # static reactions balance the applied load to 1e-6 relative
    applied = np.array([300.0, -700.0, 450.0])
    res = solve_static(
        straight_beam_model(), loads=[LoadSpec(node=2, force=tuple(applied))],
        constraints=[ConstraintSpec(node=1,
                                    dofs=("Ux", "Uy", "Uz", "Rx", "Ry", "Rz"))],
        settings=AnalysisSettings(element_length=0.5))
    for d in range(3):
        react = res.reactions[res.fixed_dofs % 6 == d].sum()
        assert abs(react + applied[d]) <= 1e-6 * np.abs(applied).max()

    # flexible frequencies are invariant under a rigid rotation of the frame
    from framegate.modal import modal_analysis
    settings = AnalysisSettings(element_length=0.31)
    base = modal_analysis(_l_frame(), settings, n_modes=10)
    rot = modal_analysis(_l_frame(_rotation(0.3, -0.7, 1.1)), settings,
                         n_modes=10)
    np.testing.assert_allclose(rot.frequencies_hz[rot.n_rigid:],
                               base.frequencies_hz[base.n_rigid:], rtol=1e-8)

    # serialization round-trips to the identical dictionary
    demo = build_demo_model()
    d1 = model_to_dict(demo)
    assert model_to_dict(model_from_dict(d1)) == d1

    # report emission is byte-deterministic
    rep = RunReport(command="gate", model_name=demo.name,
                    digest=model_digest(demo), results={"x": 1.0})
    assert emit_report(rep) == emit_report(rep)
