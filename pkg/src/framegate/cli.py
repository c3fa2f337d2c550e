"""Command-line interface.

Exit codes: 0 on success, 1 when an analysis fails (or the gate fails under
--strict), 2 on input errors (bad files, unknown names).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from typing import Optional

from .assembly import AnalysisSettings
from .crash import run_scenario
from .demo import build_demo_model
from .design import design_loop, evaluate_design, optimize_module
from .modal import modal_analysis
from .model import FrameModel, validate
from .modelio import ModelFileError, parse_model, serialize_model
from .report import (
    RunReport,
    emit_report,
    format_gate_table,
    model_digest,
    write_gate_csv,
)
from .static import AnalysisError, bending_stiffness_test, solve_static, \
    torsional_stiffness_test


def _load_model(arg: Optional[str]) -> FrameModel:
    if arg is None or arg == "demo":
        return build_demo_model()
    return parse_model(arg)


def _settings(args) -> AnalysisSettings:
    kwargs = {}
    if getattr(args, "element_length", None):
        kwargs["element_length"] = args.element_length
    return AnalysisSettings(**kwargs)


def _finish(args, model: FrameModel, command: str, results: dict,
            timings: Optional[dict] = None) -> None:
    if getattr(args, "out", None):
        report = RunReport(
            command=command, model_name=model.name, digest=model_digest(model),
            results=results,
            timings=timings if getattr(args, "timings", False) else None)
        emit_report(report, args.out)
        print(f"report written to {args.out}")


def _cmd_validate(args) -> int:
    model = _load_model(args.model)
    rep = validate(model)
    for w in rep.warnings:
        print(f"warning: {w}")
    for e in rep.errors:
        print(f"error: {e}")
    results = {
        "ok": rep.ok,
        "errors": list(rep.errors),
        "warnings": list(rep.warnings),
        "structural_mass_kg": rep.structural_mass_kg,
        "module_masses_kg": dict(rep.module_masses_kg),
    }
    _finish(args, model, "validate", results)
    if rep.ok:
        print(f"model '{model.name}' OK: {len(model.nodes)} nodes, "
              f"{len(model.members)} members, {rep.structural_mass_kg:.1f} kg")
        return 0
    return 1


def _cmd_static(args) -> int:
    model = _load_model(args.model)
    t0 = time.perf_counter()
    res = solve_static(model, args.loadcase, args.constraints, _settings(args))
    elapsed = time.perf_counter() - t0
    tr = res.translations
    worst = abs(tr).max(axis=0)
    print(f"loadcase '{args.loadcase}': max |ux,uy,uz| = "
          f"{worst[0] * 1e3:.4g}, {worst[1] * 1e3:.4g}, {worst[2] * 1e3:.4g} mm")
    results = {
        "loadcase": args.loadcase,
        "constraints": args.constraints,
        "max_abs_translation_m": [float(v) for v in worst],
        # equilibrium check: total reaction per global direction
        "reaction_sum_n": [
            float(res.reactions[res.fixed_dofs % 6 == d].sum()) for d in range(3)
        ],
    }
    _finish(args, model, "static", results, {"solve_s": elapsed})
    return 0


def _cmd_modal(args) -> int:
    model = _load_model(args.model)
    t0 = time.perf_counter()
    modes = modal_analysis(model, _settings(args), n_modes=args.n_modes,
                           constraints=args.constraints)
    elapsed = time.perf_counter() - t0
    for i, f in enumerate(modes.frequencies_hz):
        kind = "rigid" if f < modes.rigid_threshold_hz else "flex "
        print(f"mode {i + 1:2d}: {f:10.4f} Hz  [{kind}]")
    print(f"first flexible: {modes.first_flexible_hz:.4f} Hz "
          f"({modes.n_rigid} rigid modes)")
    results = {
        "frequencies_hz": [float(f) for f in modes.frequencies_hz],
        "n_rigid": modes.n_rigid,
        "first_flexible_hz": modes.first_flexible_hz,
    }
    _finish(args, model, "modal", results, {"solve_s": elapsed})
    return 0


def _cmd_torsion(args) -> int:
    model = _load_model(args.model)
    res = torsional_stiffness_test(model, _settings(args), force=args.force)
    print(f"torsional stiffness: {res.value:.4f} kN*m/deg "
          f"(torque {res.load:.1f} N*m, mean twist {res.deflection:.5f} deg)")
    results = {"stiffness_knm_deg": res.value, "torque_nm": res.load,
               "mean_twist_deg": res.deflection,
               "alternates": dict(res.alternates)}
    _finish(args, model, "torsion", results)
    return 0


def _cmd_bending(args) -> int:
    model = _load_model(args.model)
    res = bending_stiffness_test(model, _settings(args), total_load=args.load)
    print(f"bending stiffness: {res.value:.4f} kN/mm "
          f"(load {res.load:.0f} N, max deflection {res.deflection * 1e3:.4f} mm "
          f"at {tuple(round(c, 4) for c in res.location)})")
    results = {"stiffness_kn_mm": res.value, "load_n": res.load,
               "max_deflection_m": res.deflection,
               "location_m": list(res.location)}
    _finish(args, model, "bending", results)
    return 0


def _cmd_crash(args) -> int:
    model = _load_model(args.model)
    scenario = model.scenarios.get(args.scenario)
    if scenario is None:
        raise ModelFileError(f"unknown scenario '{args.scenario}'")
    if args.n_cells:
        scenario = dataclasses.replace(scenario, n_cells=args.n_cells,
                                       cell_grading=None)
    t0 = time.perf_counter()
    metrics, _hist = run_scenario(model, scenario, dt=args.dt)
    elapsed = time.perf_counter() - t0
    print(f"scenario '{metrics.scenario}': intrusion {metrics.max_intrusion_mm:.1f} mm, "
          f"peak decel {metrics.peak_decel_g:.2f} g, "
          f"intrusion velocity {metrics.max_intrusion_velocity:.2f} m/s, "
          f"end {metrics.end_time * 1e3:.1f} ms")
    print("energy: " + ", ".join(f"{k}={v:.4g}" for k, v in metrics.energy.items()))
    results = {
        "scenario": metrics.scenario,
        "max_intrusion_mm": metrics.max_intrusion_mm,
        "peak_decel_g": metrics.peak_decel_g,
        "max_intrusion_velocity_ms": metrics.max_intrusion_velocity,
        "end_time_s": metrics.end_time,
        "energy": dict(metrics.energy),
    }
    if metrics.plate_velocity_mm_min is not None:
        results["plate_velocity_mm_min"] = metrics.plate_velocity_mm_min
    _finish(args, model, "crash", results, {"solve_s": elapsed})
    return 0


def _cmd_optimize(args) -> int:
    model = _load_model(args.model)
    res = optimize_module(model, args.module, mass_budget=args.budget)
    d = res.design
    print(f"module '{res.tag}': best section "
          f"{d.width * 1e3:.0f}x{d.height * 1e3:.0f}x{d.thickness * 1e3:.1f} mm, "
          f"{res.frequency_hz:.2f} Hz at {res.module_mass_kg:.1f} kg "
          f"({res.n_evaluations} candidates, {res.n_sweeps} sweeps)")
    results = {
        "module": res.tag,
        "design_m": list(d.as_tuple()),
        "frequency_hz": res.frequency_hz,
        "module_mass_kg": res.module_mass_kg,
        "n_evaluations": res.n_evaluations,
    }
    _finish(args, model, "optimize", results)
    return 0


def _cmd_gate(args) -> int:
    model = _load_model(args.model)
    t0 = time.perf_counter()
    if args.max_tries > 0:
        loop = design_loop(model, _settings(args), max_tries=args.max_tries)
        report, model_out = loop.report, loop.model
        print(f"design loop: {loop.tries_used} optimization tries")
    else:
        report, _ev = evaluate_design(model, _settings(args))
        model_out = model
    elapsed = time.perf_counter() - t0
    print(format_gate_table(report))
    if args.csv:
        write_gate_csv(report, args.csv)
        print(f"gate table written to {args.csv}")
    results = {"gate": report.to_dict()}
    _finish(args, model_out, "gate", results, {"total_s": elapsed})
    if not report.passed and args.strict:
        return 1
    return 0


def _cmd_demo(args) -> int:
    model = build_demo_model()
    rep = validate(model)
    if not rep.ok:
        for e in rep.errors:
            print(f"error: {e}", file=sys.stderr)
        return 1
    out = args.out or "demo_frame.json"
    serialize_model(model, out)
    print(f"demo model '{model.name}' written to {out} "
          f"({len(model.nodes)} nodes, {len(model.members)} members, "
          f"{rep.structural_mass_kg:.1f} kg)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framegate",
        description="Space-frame body simulation and design gating.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", help="model JSON path (default: built-in demo)")
        p.add_argument("--out", help="write a JSON run report here")
        p.add_argument("--timings", action="store_true",
                       help="include wall-clock timings in the report "
                            "(breaks byte-for-byte reproducibility)")
        p.add_argument("--seedless", action="store_true",
                       help="accepted for compatibility; runs are always deterministic")
        p.add_argument("--element-length", type=float, default=None,
                       help="target beam element length in m (default 0.015)")

    p = sub.add_parser("validate", help="check a model file")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("static", help="run a named static loadcase")
    common(p)
    p.add_argument("--loadcase", required=True)
    p.add_argument("--constraints", default="springhouses")
    p.set_defaults(func=_cmd_static)

    p = sub.add_parser("modal", help="natural frequencies and mode shapes")
    common(p)
    p.add_argument("--n-modes", type=int, default=12)
    p.add_argument("--constraints", default=None)
    p.set_defaults(func=_cmd_modal)

    p = sub.add_parser("torsion", help="torsional stiffness rig")
    common(p)
    p.add_argument("--force", type=float, default=1000.0)
    p.set_defaults(func=_cmd_torsion)

    p = sub.add_parser("bending", help="bending stiffness rig")
    common(p)
    p.add_argument("--load", type=float, default=5036.0)
    p.set_defaults(func=_cmd_bending)

    p = sub.add_parser("crash", help="run one crash scenario")
    common(p)
    p.add_argument("--scenario", required=True,
                   choices=["frontal", "rear", "lateral", "roof"])
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--n-cells", type=int, default=None,
                   help="override the chain cell count (drops any grading)")
    p.set_defaults(func=_cmd_crash)

    p = sub.add_parser("optimize", help="size one module on the section grid")
    common(p)
    p.add_argument("--module", required=True,
                   choices=["Deck", "Front", "Rear", "Roof"])
    p.add_argument("--budget", type=float, default=None,
                   help="module mass budget in kg")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("gate", help="evaluate the design gate")
    common(p)
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero when the gate fails")
    p.add_argument("--max-tries", type=int, default=0,
                   help="run the sizing loop with this try budget (0: evaluate only)")
    p.add_argument("--csv", help="write the gate table as CSV here")
    p.set_defaults(func=_cmd_gate)

    p = sub.add_parser("demo", help="write the built-in demo model to a file")
    p.add_argument("--out", help="output path (default demo_frame.json)")
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelFileError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (AnalysisError, ValueError, KeyError) as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
