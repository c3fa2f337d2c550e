"""Design gating and the iterative sizing loop.

The gate compares analysis results against the target set and reports a
signed margin per row: positive deviation means the target is met with room
to spare, zero sits exactly on the limit (a pass), negative fails. Crash
scenarios contribute a block of rows each; a block's score is its worst row.

The sizing loop re-sections one structural module at a time on a coarse
(b, h, t) grid, driving the module's standalone natural frequency up inside
a mass budget, and re-gates the full frame after every change.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .assembly import AnalysisSettings, assemble
from .crash import CrashHistories, CrashMetrics, run_scenario
from .modal import modal_analysis
from .model import (
    ConstraintSpec,
    FrameModel,
    MODULE_TAGS,
    TargetSet,
    module_masses,
    structural_mass,
)
from .sections import RectHollowSection
from .static import (
    AnalysisError,
    StiffnessResult,
    bending_stiffness_test,
    torsional_stiffness_test,
)

# sizing grid: outer dimensions 40..70 mm in 5 mm steps, walls 0.7..1.2 mm
GRID_WIDTHS = tuple(round(0.040 + 0.005 * i, 6) for i in range(7))
GRID_HEIGHTS = GRID_WIDTHS
GRID_THICKNESSES = tuple(round(0.0007 + 0.0001 * i, 7) for i in range(6))

OPTIMIZER_SETTINGS = AnalysisSettings(element_length=0.25)


@dataclass(frozen=True)
class DesignVector:
    width: float  # m
    height: float  # m
    thickness: float  # m

    def to_section(self) -> RectHollowSection:
        return RectHollowSection(outer_width=self.width, outer_height=self.height,
                                 wall_thickness=self.thickness)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.width, self.height, self.thickness)


@dataclass(frozen=True)
class GateRow:
    name: str
    target: float
    result: float
    sense: str  # "min": result must be >= target; "max": result must be <= target
    units: str

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"gate row '{self.name}': sense must be 'min' or 'max'")
        # keep rows JSON-serializable whatever numeric type the caller passed
        object.__setattr__(self, "target", float(self.target))
        object.__setattr__(self, "result", float(self.result))

    @property
    def deviation_pct(self) -> float:
        """Signed margin in percent of target; >= 0 is a pass."""
        if self.sense == "min":
            return (self.result - self.target) / self.target * 100.0
        return (self.target - self.result) / self.target * 100.0

    @property
    def passed(self) -> bool:
        return self.deviation_pct >= 0.0


@dataclass(frozen=True)
class GateReport:
    rows: tuple[GateRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failing(self) -> tuple[GateRow, ...]:
        return tuple(r for r in self.rows if not r.passed)

    def row(self, name: str) -> GateRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(f"no gate row named '{name}'")

    def crash_block_deviation(self, scenario: str) -> float:
        """Worst (minimum) row deviation within one crash scenario block."""
        devs = [r.deviation_pct for r in self.rows if r.name.startswith(f"{scenario}:")]
        if not devs:
            raise KeyError(f"no crash rows for scenario '{scenario}'")
        return min(devs)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rows": [
                {
                    "name": r.name,
                    "target": r.target,
                    "result": r.result,
                    "sense": r.sense,
                    "units": r.units,
                    "deviation_pct": r.deviation_pct,
                    "passed": r.passed,
                }
                for r in self.rows
            ],
        }


_CRASH_ROW_UNITS = {
    "max_intrusion_mm": "mm",
    "max_deceleration_g": "g",
    "max_intrusion_velocity_ms": "m/s",
    "max_plate_velocity_mm_min": "mm/min",
}


def gate(targets: TargetSet,
         frequency_hz: float,
         bending_kn_mm: float,
         torsion_knm_deg: float,
         biw_mass_kg: float,
         total_mass_kg: Optional[float] = None,
         crash: Optional[Mapping[str, CrashMetrics]] = None) -> GateReport:
    """Pure gate arithmetic over already-computed results."""
    rows = [
        GateRow("first_natural_frequency", targets.natural_frequency_min_hz,
                frequency_hz, "min", "Hz"),
        GateRow("bending_stiffness", targets.bending_stiffness_min_kn_mm,
                bending_kn_mm, "min", "kN/mm"),
        GateRow("torsional_stiffness", targets.torsional_stiffness_min_knm_deg,
                torsion_knm_deg, "min", "kN*m/deg"),
        GateRow("biw_mass", targets.biw_mass_max_kg, biw_mass_kg, "max", "kg"),
    ]
    if total_mass_kg is not None:
        rows.append(GateRow("total_mass", targets.total_mass_max_kg,
                            total_mass_kg, "max", "kg"))
    for scenario, metrics in (crash or {}).items():
        limits = targets.crash.get(scenario)
        if limits is None:
            raise KeyError(f"targets define no crash block for scenario '{scenario}'")
        for key, limit in limits.items():
            rows.append(GateRow(f"{scenario}:{key}", limit, metrics.metric(key),
                                "max", _CRASH_ROW_UNITS.get(key, "")))
    return GateReport(rows=tuple(rows))


# --- full-frame evaluation -------------------------------------------------


@dataclass(frozen=True)
class Evaluation:
    frequency_hz: float
    bending: StiffnessResult
    torsion: StiffnessResult
    biw_mass_kg: float
    total_mass_kg: float
    crash: Mapping[str, tuple[CrashMetrics, CrashHistories]] = field(default_factory=dict)

    @property
    def crash_metrics(self) -> dict[str, CrashMetrics]:
        return {name: pair[0] for name, pair in self.crash.items()}


def evaluate_static(model: FrameModel,
                    settings: Optional[AnalysisSettings] = None) -> Evaluation:
    settings = settings or AnalysisSettings()
    system = assemble(model, settings)
    modes = modal_analysis(model, settings, n_modes=10, system=system)
    bending = bending_stiffness_test(model, settings, system=system)
    torsion = torsional_stiffness_test(model, settings, system=system)
    return Evaluation(
        frequency_hz=modes.first_flexible_hz,
        bending=bending,
        torsion=torsion,
        biw_mass_kg=structural_mass(model),
        total_mass_kg=model.vehicle_mass,
    )


def evaluate_design(model: FrameModel,
                    settings: Optional[AnalysisSettings] = None,
                    include_crash: bool = True) -> tuple[GateReport, Evaluation]:
    """Run every gate analysis on the model and score it."""
    ev = evaluate_static(model, settings)
    if include_crash:
        crash = {name: run_scenario(model, name) for name in sorted(model.scenarios)}
        ev = dataclasses.replace(ev, crash=crash)
    report = gate(
        model.targets,
        frequency_hz=ev.frequency_hz,
        bending_kn_mm=ev.bending.value,
        torsion_knm_deg=ev.torsion.value,
        biw_mass_kg=ev.biw_mass_kg,
        total_mass_kg=ev.total_mass_kg,
        crash=ev.crash_metrics if include_crash else None,
    )
    return report, ev


# --- module-level sizing ---------------------------------------------------


def module_members(model: FrameModel, tag: str) -> tuple[int, ...]:
    return tuple(mid for mid in sorted(model.members)
                 if model.members[mid].module_tag == tag)


def module_interface_nodes(model: FrameModel, tag: str) -> tuple[int, ...]:
    """Nodes the module shares with the rest of the frame."""
    own: set[int] = set()
    other: set[int] = set()
    for m in model.members.values():
        endpoints = (m.node_i, m.node_j)
        (own if m.module_tag == tag else other).update(endpoints)
    return tuple(sorted(own & other))


def module_submodel(model: FrameModel, tag: str) -> FrameModel:
    """The module alone, with its interface nodes pinned (set 'interface')."""
    mids = module_members(model, tag)
    if not mids:
        raise AnalysisError(f"module '{tag}' has no members")
    node_ids = {n for mid in mids for n in (model.members[mid].node_i,
                                            model.members[mid].node_j)}
    interface = module_interface_nodes(model, tag)
    if not interface:
        raise AnalysisError(f"module '{tag}' shares no nodes with the rest of the frame")
    pins = tuple(ConstraintSpec(node=nid, dofs=("Ux", "Uy", "Uz"))
                 for nid in interface)
    return dataclasses.replace(
        model,
        name=f"{model.name}:{tag}",
        nodes={nid: model.nodes[nid] for nid in sorted(node_ids)},
        members={mid: model.members[mid] for mid in mids},
        node_groups={},
        member_groups={},
        constraint_sets={"interface": pins},
        loadcases={},
    )


def apply_module_design(model: FrameModel, tag: str, design: DesignVector) -> FrameModel:
    """Re-section every member of the module with the candidate tube."""
    sec_name = f"{tag.lower()}_sized"
    updated = model.with_sections({sec_name: design.to_section()})
    return updated.with_member_sections({mid: sec_name
                                         for mid in module_members(model, tag)})


def module_frequency(model: FrameModel, tag: str,
                     settings: AnalysisSettings = OPTIMIZER_SETTINGS) -> float:
    """First natural frequency of the module with pinned interfaces."""
    sub = module_submodel(model, tag)
    modes = modal_analysis(sub, settings, n_modes=1, constraints="interface")
    return float(modes.frequencies_hz[0])


def module_mass(model: FrameModel, tag: str) -> float:
    return sum(model.member_mass(mid) for mid in module_members(model, tag))


@dataclass(frozen=True)
class OptimizeResult:
    tag: str
    design: DesignVector
    frequency_hz: float
    module_mass_kg: float
    n_evaluations: int
    n_sweeps: int
    improved: bool


def _candidate_key(freq: float, mass: float,
                   bht: tuple[float, float, float]) -> tuple:
    # best candidate minimizes this: highest frequency, then lightest,
    # then lexicographically smallest dimensions
    return (-freq, mass, bht)


def optimize_module(model: FrameModel, tag: str,
                    mass_budget: Optional[float] = None,
                    widths: Sequence[float] = GRID_WIDTHS,
                    heights: Sequence[float] = GRID_HEIGHTS,
                    thicknesses: Sequence[float] = GRID_THICKNESSES,
                    settings: AnalysisSettings = OPTIMIZER_SETTINGS,
                    max_sweeps: int = 8) -> OptimizeResult:
    """Coordinate descent over the section grid, maximizing the module's
    pinned-interface frequency subject to the module mass budget."""
    mids = module_members(model, tag)
    if not mids:
        raise AnalysisError(f"module '{tag}' has no members")

    cache: dict[tuple[float, float, float], tuple[float, float]] = {}
    n_evals = 0

    def measure(bht: tuple[float, float, float]) -> tuple[float, float]:
        nonlocal n_evals
        if bht not in cache:
            candidate = apply_module_design(model, tag, DesignVector(*bht))
            mass = module_mass(candidate, tag)
            freq = module_frequency(candidate, tag, settings)
            cache[bht] = (freq, mass)
            n_evals += 1
        return cache[bht]

    def feasible(mass: float) -> bool:
        return mass_budget is None or mass <= mass_budget

    # start from the nearest grid point to the module's current dominant section
    current_secs = [model.sections[model.members[mid].section] for mid in mids]
    b0 = min(widths, key=lambda v: abs(v - current_secs[0].outer_width))
    h0 = min(heights, key=lambda v: abs(v - current_secs[0].outer_height))
    t0 = min(thicknesses, key=lambda v: abs(v - current_secs[0].wall_thickness))
    point = [b0, h0, t0]

    axes = (tuple(widths), tuple(heights), tuple(thicknesses))
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        moved = False
        for axis, values in enumerate(axes):
            best: Optional[tuple[tuple, float]] = None  # (key, value)
            for v in values:
                trial = tuple(point[:axis] + [v] + point[axis + 1:])
                freq, mass = measure(trial)  # type: ignore[arg-type]
                if not feasible(mass):
                    continue
                key = _candidate_key(freq, mass, trial)  # type: ignore[arg-type]
                if best is None or key < best[0]:
                    best = (key, v)
            if best is None:
                continue  # slice entirely over budget; try the other axes
            if best[1] != point[axis]:
                point[axis] = best[1]
                moved = True
        if not moved:
            break

    bht = tuple(point)
    freq, mass = measure(bht)  # type: ignore[arg-type]
    if not feasible(mass):
        # the descent never escaped an over-budget neighbourhood (possible
        # when the start section is heavy); fall back to the full grid
        fallback: Optional[tuple[tuple, tuple]] = None
        for b in widths:
            for h in heights:
                for t in thicknesses:
                    freq_c, mass_c = measure((b, h, t))
                    if not feasible(mass_c):
                        continue
                    key = _candidate_key(freq_c, mass_c, (b, h, t))
                    if fallback is None or key < fallback[0]:
                        fallback = (key, (b, h, t))
        if fallback is None:
            raise AnalysisError(
                f"module '{tag}': no grid candidate fits the mass budget "
                f"({mass_budget:.1f} kg)")
        bht = fallback[1]
        freq, mass = measure(bht)  # type: ignore[arg-type]
        point = list(bht)
    start_freq, start_mass = measure((b0, h0, t0))
    return OptimizeResult(
        tag=tag,
        design=DesignVector(*bht),
        frequency_hz=freq,
        module_mass_kg=mass,
        n_evaluations=n_evals,
        n_sweeps=sweeps,
        improved=_candidate_key(freq, mass, bht)
        < _candidate_key(start_freq, start_mass, (b0, h0, t0)),
    )


def brute_force_module(model: FrameModel, tag: str,
                       mass_budget: Optional[float] = None,
                       widths: Sequence[float] = GRID_WIDTHS,
                       heights: Sequence[float] = GRID_HEIGHTS,
                       thicknesses: Sequence[float] = GRID_THICKNESSES,
                       settings: AnalysisSettings = OPTIMIZER_SETTINGS) -> OptimizeResult:
    """Exhaustive grid reference for the coordinate-descent optimizer."""
    best_key = None
    best: Optional[tuple[float, float, tuple[float, float, float]]] = None
    n_evals = 0
    for b in widths:
        for h in heights:
            for t in thicknesses:
                candidate = apply_module_design(model, tag, DesignVector(b, h, t))
                mass = module_mass(candidate, tag)
                n_evals += 1
                if mass_budget is not None and mass > mass_budget:
                    continue
                freq = module_frequency(candidate, tag, settings)
                key = _candidate_key(freq, mass, (b, h, t))
                if best_key is None or key < best_key:
                    best_key, best = key, (freq, mass, (b, h, t))
    if best is None:
        raise AnalysisError(f"module '{tag}': no grid candidate fits the mass budget")
    freq, mass, bht = best
    return OptimizeResult(tag=tag, design=DesignVector(*bht), frequency_hz=freq,
                          module_mass_kg=mass, n_evaluations=n_evals,
                          n_sweeps=0, improved=True)


# --- the iterative design loop --------------------------------------------


@dataclass(frozen=True)
class IterationRecord:
    index: int
    action: str  # "gate", "optimize:all", "optimize:<module>"
    failing_rows: tuple[str, ...]
    designs: Mapping[str, DesignVector] = field(default_factory=dict)


@dataclass(frozen=True)
class DesignLoopResult:
    model: FrameModel
    report: GateReport
    evaluation: Evaluation
    iterations: tuple[IterationRecord, ...]
    tries_used: int

    @property
    def passed(self) -> bool:
        return self.report.passed


_SCENARIO_MODULE = {"frontal": "Front", "rear": "Rear", "lateral": "Deck",
                    "roof": "Roof"}


def _scenario_module(model: FrameModel, scenario: str) -> str:
    sc = model.scenarios.get(scenario)
    if sc is not None and sc.member_group in model.member_groups:
        mids = model.member_groups[sc.member_group]
        if mids:
            return model.members[mids[0]].module_tag
    return _SCENARIO_MODULE.get(scenario, "Deck")


def _weakest_module(model: FrameModel, report: GateReport) -> str:
    """Module to strengthen next. Crash failures point at the module feeding
    the failing scenario; stiffness/frequency failures point at the module
    with the lowest standalone frequency."""
    for row in report.failing:
        if ":" in row.name:
            return _scenario_module(model, row.name.split(":", 1)[0])
    freqs = {tag: module_frequency(model, tag) for tag in MODULE_TAGS
             if module_members(model, tag)}
    return min(freqs, key=lambda tag: (freqs[tag], tag))


def design_loop(model: FrameModel,
                settings: Optional[AnalysisSettings] = None,
                max_tries: int = 6,
                optimizer_settings: AnalysisSettings = OPTIMIZER_SETTINGS) -> DesignLoopResult:
    """Gate the frame; while it fails, re-section modules and re-gate.

    The first failing gate re-sections every module (cheapest way to move all
    four metrics at once); later failures target one module chosen from the
    failing rows. Budgets hold each module to its initial share of the frame
    mass limit. Crash scenarios only run once the static rows pass, so early
    iterations stay cheap.
    """
    settings = settings or AnalysisSettings()
    shares = module_masses(model)
    total0 = sum(shares.values())
    budgets = {tag: model.targets.biw_mass_max_kg * (mass / total0)
               for tag, mass in shares.items() if mass > 0}

    iterations: list[IterationRecord] = []
    tries = 0
    current = model
    first_fix = True
    last_action_design: Optional[tuple[str, tuple]] = None

    while True:
        report, ev = evaluate_design(current, settings, include_crash=False)
        if report.passed:
            report, ev = evaluate_design(current, settings, include_crash=True)
        iterations.append(IterationRecord(
            index=len(iterations), action="gate",
            failing_rows=tuple(r.name for r in report.failing)))
        if report.passed or tries >= max_tries:
            return DesignLoopResult(model=current, report=report, evaluation=ev,
                                    iterations=tuple(iterations), tries_used=tries)

        if first_fix:
            tags = [t for t in MODULE_TAGS if module_members(current, t)]
            action = "optimize:all"
            first_fix = False
        else:
            tags = [_weakest_module(current, report)]
            action = f"optimize:{tags[0]}"

        designs: dict[str, DesignVector] = {}
        for tag in tags:
            result = optimize_module(current, tag, mass_budget=budgets.get(tag),
                                     settings=optimizer_settings)
            current = apply_module_design(current, tag, result.design)
            designs[tag] = result.design
        tries += 1
        signature = (action, tuple(sorted((t, d.as_tuple()) for t, d in designs.items())))
        iterations.append(IterationRecord(
            index=len(iterations), action=action,
            failing_rows=tuple(r.name for r in report.failing),
            designs=designs))
        if signature == last_action_design:
            # the optimizer has nothing new to offer; a further try cannot change
            # the outcome, so stop with the honest failing report
            report, ev = evaluate_design(current, settings, include_crash=True)
            return DesignLoopResult(model=current, report=report, evaluation=ev,
                                    iterations=tuple(iterations), tries_used=tries)
        last_action_design = signature
