"""Model file I/O.

Frame models are stored as JSON with an explicit `units` block. Every
dimensioned field is converted to SI on parse; `serialize_model` always emits
SI unit tags, so parse(serialize(m)) reproduces the in-memory model exactly.
Target limits are the exception: they are quoted (and stored) in the units the
gate reports, e.g. kN/mm, and are never converted.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from .material import JCParams
from .model import (
    ConstraintSpec,
    FrameModel,
    LoadSpec,
    MaterialSpec,
    MemberSpec,
    NodeGroup,
    NodeSpec,
    ScenarioConfig,
    TargetSet,
    default_scenarios,
)
from .sections import RectHollowSection
from .units import DEFAULT_UNITS, SI_UNITS, UnknownUnitError, factor


class ModelFileError(Exception):
    """Raised on malformed model files; the message carries the field path."""


# scenario fields that carry units, mapped to their unit family
_SCENARIO_FIELD_FAMILIES = {
    "speed": "speed",
    "duration": "time",
    "output_interval": "time",
    "barrier_length": "length",
    "barrier_mass": "mass",
    "load": "force",
    "barrier_plateau": "force",
}


def _req(data: Mapping[str, Any], key: str, path: str) -> Any:
    if key not in data:
        raise ModelFileError(f"{path}: missing required field '{key}'")
    return data[key]


def _num(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelFileError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _vec3(value: Any, path: str) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ModelFileError(f"{path}: expected a 3-vector")
    return tuple(_num(v, f"{path}[{i}]") for i, v in enumerate(value))  # type: ignore[return-value]


def _unit_factors(units_block: Mapping[str, str]) -> dict[str, float]:
    tags = dict(DEFAULT_UNITS)
    tags.update(units_block)
    factors = {}
    for family, tag in tags.items():
        try:
            factors[family] = factor(family, tag)
        except UnknownUnitError as exc:
            raise ModelFileError(f"units.{family}: {exc}") from exc
    return factors


def _parse_material(name: str, data: Mapping[str, Any], f: Mapping[str, float]) -> MaterialSpec:
    path = f"materials.{name}"
    jc = None
    if "jc" in data and data["jc"] is not None:
        jd = data["jc"]
        jc = JCParams(
            a=_num(_req(jd, "a", f"{path}.jc"), f"{path}.jc.a") * f["stress"],
            b=_num(_req(jd, "b", f"{path}.jc"), f"{path}.jc.b") * f["stress"],
            c=_num(_req(jd, "c", f"{path}.jc"), f"{path}.jc.c"),
            n=_num(_req(jd, "n", f"{path}.jc"), f"{path}.jc.n"),
            m=_num(_req(jd, "m", f"{path}.jc"), f"{path}.jc.m"),
            ref_strain_rate=_num(jd.get("ref_strain_rate", 1.0), f"{path}.jc.ref_strain_rate"),
        )
    try:
        return MaterialSpec(
            name=name,
            youngs_modulus=_num(_req(data, "youngs_modulus", path), f"{path}.youngs_modulus")
            * f["stress"],
            poisson_ratio=_num(_req(data, "poisson_ratio", path), f"{path}.poisson_ratio"),
            density=_num(_req(data, "density", path), f"{path}.density") * f["density"],
            jc=jc,
        )
    except ValueError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc


def _parse_scenario(name: str, data: Mapping[str, Any], f: Mapping[str, float]) -> ScenarioConfig:
    path = f"scenarios.{name}"
    base = default_scenarios().get(name, ScenarioConfig(name=name))
    fields = {fld.name for fld in dataclasses.fields(ScenarioConfig)}
    overrides: dict[str, Any] = {}
    for key, raw in data.items():
        if key not in fields or key == "name":
            raise ModelFileError(f"{path}: unknown field '{key}'")
        if key == "barrier_stiffness" and raw is not None:
            overrides[key] = _num(raw, f"{path}.{key}") * f["force"] / f["length"]
        elif key in _SCENARIO_FIELD_FAMILIES and raw is not None:
            overrides[key] = _num(raw, f"{path}.{key}") * f[_SCENARIO_FIELD_FAMILIES[key]]
        elif key in ("cell_grading", "mass_fractions") and raw is not None:
            overrides[key] = tuple(_num(v, f"{path}.{key}[{i}]") for i, v in enumerate(raw))
        else:
            overrides[key] = raw
    try:
        return dataclasses.replace(base, **overrides)
    except ValueError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc


def _parse_targets(data: Mapping[str, Any]) -> TargetSet:
    defaults = TargetSet()
    crash = {k: dict(v) for k, v in defaults.crash.items()}
    for sc_name, block in data.get("crash", {}).items():
        crash.setdefault(sc_name, {}).update(
            {k: _num(v, f"targets.crash.{sc_name}.{k}") for k, v in block.items()}
        )
    kwargs = {}
    for fld in ("natural_frequency_min_hz", "bending_stiffness_min_kn_mm",
                "torsional_stiffness_min_knm_deg", "biw_mass_max_kg", "total_mass_max_kg"):
        if fld in data:
            kwargs[fld] = _num(data[fld], f"targets.{fld}")
    try:
        return TargetSet(crash=crash, **kwargs)
    except ValueError as exc:
        raise ModelFileError(f"targets: {exc}") from exc


def model_from_dict(data: Mapping[str, Any]) -> FrameModel:
    if not isinstance(data, Mapping):
        raise ModelFileError("top level: expected a JSON object")
    f = _unit_factors(data.get("units", {}))

    meta = _req(data, "meta", "top level")
    name = str(_req(meta, "name", "meta"))
    wheelbase = _num(_req(meta, "wheelbase", "meta"), "meta.wheelbase") * f["length"]
    track = _num(_req(meta, "track_width", "meta"), "meta.track_width") * f["length"]
    vehicle_mass = _num(meta.get("vehicle_mass", 1000.0), "meta.vehicle_mass") * f["mass"]

    materials = {
        mname: _parse_material(mname, mdata, f)
        for mname, mdata in _req(data, "materials", "top level").items()
    }

    sections = {}
    for sname, sdata in _req(data, "sections", "top level").items():
        path = f"sections.{sname}"
        try:
            sections[sname] = RectHollowSection(
                outer_width=_num(_req(sdata, "outer_width", path), f"{path}.outer_width")
                * f["length"],
                outer_height=_num(_req(sdata, "outer_height", path), f"{path}.outer_height")
                * f["length"],
                wall_thickness=_num(_req(sdata, "wall_thickness", path), f"{path}.wall_thickness")
                * f["length"],
            )
        except ValueError as exc:
            raise ModelFileError(f"{path}: {exc}") from exc

    nodes: dict[int, NodeSpec] = {}
    for i, ndata in enumerate(_req(data, "nodes", "top level")):
        path = f"nodes[{i}]"
        nid = int(_num(_req(ndata, "id", path), f"{path}.id"))
        if nid in nodes:
            raise ModelFileError(f"{path}: duplicate node id {nid}")
        pos = _vec3(_req(ndata, "position", path), f"{path}.position")
        try:
            nodes[nid] = NodeSpec(
                id=nid,
                position=tuple(c * f["length"] for c in pos),  # type: ignore[arg-type]
                lumped_mass=_num(ndata.get("lumped_mass", 0.0), f"{path}.lumped_mass")
                * f["mass"],
                mass_is_structural=bool(ndata.get("structural", False)),
            )
        except ValueError as exc:
            raise ModelFileError(f"{path}: {exc}") from exc

    members: dict[int, MemberSpec] = {}
    for i, mdata in enumerate(_req(data, "members", "top level")):
        path = f"members[{i}]"
        mid = int(_num(_req(mdata, "id", path), f"{path}.id"))
        if mid in members:
            raise ModelFileError(f"{path}: duplicate member id {mid}")
        ends = _req(mdata, "nodes", path)
        if not isinstance(ends, (list, tuple)) or len(ends) != 2:
            raise ModelFileError(f"{path}.nodes: expected [node_i, node_j]")
        try:
            members[mid] = MemberSpec(
                id=mid,
                node_i=int(_num(ends[0], f"{path}.nodes[0]")),
                node_j=int(_num(ends[1], f"{path}.nodes[1]")),
                section=str(_req(mdata, "section", path)),
                material=str(_req(mdata, "material", path)),
                module_tag=str(_req(mdata, "module", path)),
                orientation=_vec3(mdata.get("orientation", (0.0, 0.0, 1.0)),
                                  f"{path}.orientation"),
            )
        except ValueError as exc:
            raise ModelFileError(f"{path}: {exc}") from exc

    groups = data.get("groups", {})
    node_groups: dict[str, NodeGroup] = {}
    for gname, gdata in groups.get("nodes", {}).items():
        path = f"groups.nodes.{gname}"
        if isinstance(gdata, Mapping):
            ids = tuple(int(_num(v, f"{path}.nodes[{i}]"))
                        for i, v in enumerate(_req(gdata, "nodes", path)))
            fracs = gdata.get("fractions")
            if fracs is not None:
                fracs = tuple(_num(v, f"{path}.fractions[{i}]") for i, v in enumerate(fracs))
        else:
            ids = tuple(int(_num(v, f"{path}[{i}]")) for i, v in enumerate(gdata))
            fracs = None
        try:
            node_groups[gname] = NodeGroup(nodes=ids, fractions=fracs)
        except ValueError as exc:
            raise ModelFileError(f"{path}: {exc}") from exc
    member_groups = {
        gname: tuple(int(_num(v, f"groups.members.{gname}[{i}]")) for i, v in enumerate(gdata))
        for gname, gdata in groups.get("members", {}).items()
    }

    constraint_sets: dict[str, tuple[ConstraintSpec, ...]] = {}
    for cname, cdata in data.get("constraint_sets", {}).items():
        specs = []
        for i, c in enumerate(cdata):
            path = f"constraint_sets.{cname}[{i}]"
            try:
                specs.append(ConstraintSpec(
                    node=int(_num(_req(c, "node", path), f"{path}.node")),
                    dofs=tuple(_req(c, "dofs", path)),
                ))
            except ValueError as exc:
                raise ModelFileError(f"{path}: {exc}") from exc
        constraint_sets[cname] = tuple(specs)

    loadcases: dict[str, tuple[LoadSpec, ...]] = {}
    for lname, ldata in data.get("loadcases", {}).items():
        specs = []
        for i, ld in enumerate(ldata):
            path = f"loadcases.{lname}[{i}]"
            force = _vec3(ld.get("force", (0, 0, 0)), f"{path}.force")
            moment = _vec3(ld.get("moment", (0, 0, 0)), f"{path}.moment")
            specs.append(LoadSpec(
                node=int(_num(_req(ld, "node", path), f"{path}.node")),
                force=tuple(c * f["force"] for c in force),  # type: ignore[arg-type]
                moment=tuple(c * f["moment"] for c in moment),  # type: ignore[arg-type]
            ))
        loadcases[lname] = tuple(specs)

    targets = _parse_targets(data.get("targets", {}))
    scenarios = dict(default_scenarios())
    for sc_name, sc_data in data.get("scenarios", {}).items():
        scenarios[sc_name] = _parse_scenario(sc_name, sc_data, f)

    return FrameModel(
        name=name,
        wheelbase=wheelbase,
        track_width=track,
        nodes=nodes,
        members=members,
        materials=materials,
        sections=sections,
        node_groups=node_groups,
        member_groups=member_groups,
        constraint_sets=constraint_sets,
        loadcases=loadcases,
        targets=targets,
        scenarios=scenarios,
        vehicle_mass=vehicle_mass,
    )


def parse_model(path: Union[str, Path]) -> FrameModel:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ModelFileError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(data)


def model_to_dict(model: FrameModel) -> dict[str, Any]:
    """SI-tagged plain-dict form; parsing it back reproduces the model."""
    data: dict[str, Any] = {
        "meta": {
            "name": model.name,
            "wheelbase": model.wheelbase,
            "track_width": model.track_width,
            "vehicle_mass": model.vehicle_mass,
        },
        "units": dict(SI_UNITS),
        "materials": {},
        "sections": {},
        "nodes": [],
        "members": [],
    }
    for mname in sorted(model.materials):
        mat = model.materials[mname]
        entry: dict[str, Any] = {
            "youngs_modulus": mat.youngs_modulus,
            "poisson_ratio": mat.poisson_ratio,
            "density": mat.density,
        }
        if mat.jc is not None:
            entry["jc"] = {
                "a": mat.jc.a, "b": mat.jc.b, "c": mat.jc.c,
                "n": mat.jc.n, "m": mat.jc.m,
                "ref_strain_rate": mat.jc.ref_strain_rate,
            }
        data["materials"][mname] = entry
    for sname in sorted(model.sections):
        sec = model.sections[sname]
        data["sections"][sname] = {
            "outer_width": sec.outer_width,
            "outer_height": sec.outer_height,
            "wall_thickness": sec.wall_thickness,
        }
    for nid in sorted(model.nodes):
        n = model.nodes[nid]
        entry = {"id": n.id, "position": list(n.position)}
        if n.lumped_mass:
            entry["lumped_mass"] = n.lumped_mass
        if n.mass_is_structural:
            entry["structural"] = True
        data["nodes"].append(entry)
    for mid in sorted(model.members):
        m = model.members[mid]
        data["members"].append({
            "id": m.id,
            "nodes": [m.node_i, m.node_j],
            "section": m.section,
            "material": m.material,
            "module": m.module_tag,
            "orientation": list(m.orientation),
        })
    groups: dict[str, Any] = {"nodes": {}, "members": {}}
    for gname in sorted(model.node_groups):
        g = model.node_groups[gname]
        if g.fractions is None:
            groups["nodes"][gname] = list(g.nodes)
        else:
            groups["nodes"][gname] = {"nodes": list(g.nodes), "fractions": list(g.fractions)}
    for gname in sorted(model.member_groups):
        groups["members"][gname] = list(model.member_groups[gname])
    data["groups"] = groups
    data["constraint_sets"] = {
        cname: [{"node": c.node, "dofs": list(c.dofs)} for c in cset]
        for cname, cset in sorted(model.constraint_sets.items())
    }
    data["loadcases"] = {
        lname: [{"node": ld.node, "force": list(ld.force), "moment": list(ld.moment)}
                for ld in loads]
        for lname, loads in sorted(model.loadcases.items())
    }
    t = model.targets
    data["targets"] = {
        "natural_frequency_min_hz": t.natural_frequency_min_hz,
        "bending_stiffness_min_kn_mm": t.bending_stiffness_min_kn_mm,
        "torsional_stiffness_min_knm_deg": t.torsional_stiffness_min_knm_deg,
        "biw_mass_max_kg": t.biw_mass_max_kg,
        "total_mass_max_kg": t.total_mass_max_kg,
        "crash": {k: dict(v) for k, v in sorted(t.crash.items())},
    }
    data["scenarios"] = {}
    for sc_name in sorted(model.scenarios):
        sc = model.scenarios[sc_name]
        entry = dataclasses.asdict(sc)
        del entry["name"]
        for key in ("cell_grading", "mass_fractions"):
            if entry[key] is not None:
                entry[key] = list(entry[key])
        data["scenarios"][sc_name] = entry
    return data


def serialize_model(model: FrameModel, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")
