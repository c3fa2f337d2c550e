"""Frame data model: nodes, members, materials, groups, targets, scenarios.

A FrameModel is the single source of truth for every analysis. It is treated
as immutable once validated; all quantities are internal SI (m, kg, s, N, Pa).
Gate targets are the one exception: they live in the presentation units their
limits are quoted in (Hz, kN/mm, kN*m/deg, kg, mm, g, m/s, mm/min).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .material import JCParams
from .sections import RectHollowSection, compute_properties

DOF_NAMES = ("Ux", "Uy", "Uz", "Rx", "Ry", "Rz")
MODULE_TAGS = ("Deck", "Front", "Rear", "Roof")
SCENARIO_NAMES = ("frontal", "rear", "lateral", "roof")

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class NodeSpec:
    id: int
    position: Vec3  # m
    lumped_mass: float = 0.0  # kg
    mass_is_structural: bool = False  # counts toward BIW mass when True

    def __post_init__(self):
        if self.lumped_mass < 0:
            raise ValueError(f"node {self.id}: lumped mass must be >= 0")
        if not all(math.isfinite(c) for c in self.position):
            raise ValueError(f"node {self.id}: coordinates must be finite")


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    youngs_modulus: float  # Pa
    poisson_ratio: float
    density: float  # kg/m^3
    jc: Optional[JCParams] = None

    def __post_init__(self):
        if self.youngs_modulus <= 0:
            raise ValueError(f"material '{self.name}': E must be positive")
        if not (0 < self.poisson_ratio < 0.5):
            raise ValueError(f"material '{self.name}': Poisson ratio must be in (0, 0.5)")
        if self.density <= 0:
            raise ValueError(f"material '{self.name}': density must be positive")

    @property
    def shear_modulus(self) -> float:
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))


@dataclass(frozen=True)
class MemberSpec:
    id: int
    node_i: int
    node_j: int
    section: str  # name ref into FrameModel.sections
    material: str  # name ref into FrameModel.materials
    module_tag: str  # one of MODULE_TAGS
    orientation: Vec3 = (0.0, 0.0, 1.0)  # reference for the local y (height) axis

    def __post_init__(self):
        if self.node_i == self.node_j:
            raise ValueError(f"member {self.id}: end nodes must differ")
        if self.module_tag not in MODULE_TAGS:
            raise ValueError(
                f"member {self.id}: module tag '{self.module_tag}' not in {MODULE_TAGS}"
            )


@dataclass(frozen=True)
class ConstraintSpec:
    node: int
    dofs: tuple[str, ...]  # subset of DOF_NAMES

    def __post_init__(self):
        if not self.dofs:
            raise ValueError(f"constraint at node {self.node}: empty DOF set")
        bad = [d for d in self.dofs if d not in DOF_NAMES]
        if bad:
            raise ValueError(f"constraint at node {self.node}: unknown DOFs {bad}")


@dataclass(frozen=True)
class LoadSpec:
    node: int
    force: Vec3 = (0.0, 0.0, 0.0)  # N
    moment: Vec3 = (0.0, 0.0, 0.0)  # N*m

    def __post_init__(self):
        vals = (*self.force, *self.moment)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"load at node {self.node}: values must be finite")


@dataclass(frozen=True)
class NodeGroup:
    nodes: tuple[int, ...]
    fractions: Optional[tuple[float, ...]] = None  # per-node load shares, sum 1

    def __post_init__(self):
        if self.fractions is not None:
            if len(self.fractions) != len(self.nodes):
                raise ValueError("group fractions length must match node count")
            if abs(sum(self.fractions) - 1.0) > 1e-9:
                raise ValueError("group fractions must sum to 1")


@dataclass(frozen=True)
class ScenarioConfig:
    """Crash scenario configuration (crush-chain reduction knobs included)."""

    name: str
    kind: str = "dynamic"  # "dynamic" | "quasi_static"
    speed: float = 0.0  # m/s closing speed (dynamic scenarios)
    angle_deg: float = 0.0  # impact angle; crush driven by the cos component
    duration: float = 0.09  # s
    member_group: str = ""
    n_cells: int = 4
    n_strands: int = 2  # parallel load paths collapsed into one strand
    barrier: str = "rigid"  # "rigid" | "deformable"
    barrier_stiffness: Optional[float] = None  # N/m; default: cell stiffness
    barrier_plateau: Optional[float] = None  # N; default: 0.3 x chain plateau
    barrier_length: float = 0.5  # m of crushable barrier depth
    barrier_mass: float = 0.0  # kg lumped at the barrier face
    efficiency: float = 0.25  # mean-crush-force efficiency
    effective_strain: float = 0.3
    densification_fraction: float = 0.7
    cell_grading: Optional[tuple[float, ...]] = None  # per-cell plateau factors
    mass_fractions: Optional[tuple[float, ...]] = None  # per-mass vehicle shares
    intrusion_reference_mass: Optional[int] = None  # None -> last cell boundary
    contact_stiffness_factor: float = 10.0  # rigid-wall contact vs cell stiffness
    output_interval: float = 5e-4  # s between recorded history rows
    # quasi-static (roof) parameters
    load: float = 14700.0  # N plate resultant
    plate_angle_x_deg: float = 5.0
    plate_angle_z_deg: float = 25.0
    plate_velocity_mm_min: float = 1.5  # configuration record, not a rate
    n_load_steps: int = 50

    def __post_init__(self):
        if self.kind not in ("dynamic", "quasi_static"):
            raise ValueError(f"scenario '{self.name}': unknown kind '{self.kind}'")
        if self.n_cells < 1:
            raise ValueError(f"scenario '{self.name}': n_cells must be >= 1")
        if self.n_strands < 1:
            raise ValueError(f"scenario '{self.name}': n_strands must be >= 1")
        if self.barrier not in ("rigid", "deformable"):
            raise ValueError(f"scenario '{self.name}': unknown barrier '{self.barrier}'")
        if self.cell_grading is not None and len(self.cell_grading) != self.n_cells:
            raise ValueError(f"scenario '{self.name}': cell_grading length != n_cells")
        if self.mass_fractions is not None:
            if len(self.mass_fractions) != self.n_cells + 1:
                raise ValueError(
                    f"scenario '{self.name}': mass_fractions needs n_cells+1 entries"
                )
            if abs(sum(self.mass_fractions) - 1.0) > 1e-9:
                raise ValueError(f"scenario '{self.name}': mass_fractions must sum to 1")


def default_scenarios() -> dict[str, ScenarioConfig]:
    """Regulatory test configurations: US-NCAP frontal, FMVSS-301 rear,
    FMVSS-214 lateral, FMVSS-216 roof."""
    kmh = 1.0 / 3.6
    return {
        "frontal": ScenarioConfig(
            name="frontal", speed=55.0 * kmh, member_group="front_rails"
        ),
        "rear": ScenarioConfig(name="rear", speed=50.0 * kmh, member_group="rear_rails"),
        "lateral": ScenarioConfig(
            name="lateral",
            speed=50.0 * kmh,
            angle_deg=27.0,
            member_group="side_structure",
            barrier="deformable",
            intrusion_reference_mass=0,
        ),
        "roof": ScenarioConfig(
            name="roof", kind="quasi_static", member_group="roof_pillars", n_strands=6
        ),
    }


@dataclass(frozen=True)
class TargetSet:
    """Design targets in their quoted units (the gate's native units)."""

    natural_frequency_min_hz: float = 38.0
    bending_stiffness_min_kn_mm: float = 10.0
    torsional_stiffness_min_knm_deg: float = 12.0
    biw_mass_max_kg: float = 250.0
    total_mass_max_kg: float = 1000.0
    crash: Mapping[str, Mapping[str, float]] = field(
        default_factory=lambda: {
            "frontal": {"max_intrusion_mm": 110.0, "max_deceleration_g": 30.0},
            "rear": {"max_intrusion_mm": 145.0, "max_deceleration_g": 16.0},
            "lateral": {"max_intrusion_mm": 285.0, "max_intrusion_velocity_ms": 9.0},
            "roof": {"max_intrusion_mm": 127.0, "max_plate_velocity_mm_min": 5.0},
        }
    )

    def __post_init__(self):
        limits = [
            self.natural_frequency_min_hz,
            self.bending_stiffness_min_kn_mm,
            self.torsional_stiffness_min_knm_deg,
            self.biw_mass_max_kg,
            self.total_mass_max_kg,
        ]
        limits += [v for block in self.crash.values() for v in block.values()]
        if any(v <= 0 for v in limits):
            raise ValueError("all target limits must be positive")


@dataclass(frozen=True)
class FrameModel:
    name: str
    wheelbase: float  # m
    track_width: float  # m, the lever B in the torsion formula
    nodes: Mapping[int, NodeSpec]
    members: Mapping[int, MemberSpec]
    materials: Mapping[str, MaterialSpec]
    sections: Mapping[str, RectHollowSection]
    node_groups: Mapping[str, NodeGroup] = field(default_factory=dict)
    member_groups: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    constraint_sets: Mapping[str, tuple[ConstraintSpec, ...]] = field(default_factory=dict)
    loadcases: Mapping[str, tuple[LoadSpec, ...]] = field(default_factory=dict)
    targets: TargetSet = field(default_factory=TargetSet)
    scenarios: Mapping[str, ScenarioConfig] = field(default_factory=default_scenarios)
    vehicle_mass: float = 1000.0  # kg, total car mass carried in crash tests

    # --- geometry helpers -------------------------------------------------

    def member_length(self, member_id: int) -> float:
        m = self.members[member_id]
        pi = self.nodes[m.node_i].position
        pj = self.nodes[m.node_j].position
        return math.dist(pi, pj)

    def member_mass(self, member_id: int) -> float:
        m = self.members[member_id]
        area = compute_properties(self.sections[m.section]).area
        rho = self.materials[m.material].density
        return rho * area * self.member_length(member_id)

    def with_sections(self, new_sections: Mapping[str, RectHollowSection]) -> "FrameModel":
        """Functional update used by the design loop."""
        merged = dict(self.sections)
        merged.update(new_sections)
        return replace(self, sections=merged)

    def with_member_sections(self, assignment: Mapping[int, str]) -> "FrameModel":
        members = dict(self.members)
        for mid, sec_name in assignment.items():
            members[mid] = replace(members[mid], section=sec_name)
        return replace(self, members=members)


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[str, ...]
    warnings: tuple[str, ...]
    structural_mass_kg: float
    module_masses_kg: Mapping[str, float]

    @property
    def ok(self) -> bool:
        return not self.errors


def structural_mass(model: FrameModel) -> float:
    """Frame mass: sum of rho*A*L over members plus structural lumped masses."""
    mass = sum(model.member_mass(mid) for mid in model.members)
    mass += sum(n.lumped_mass for n in model.nodes.values() if n.mass_is_structural)
    return mass


def total_lumped_mass(model: FrameModel) -> float:
    return sum(n.lumped_mass for n in model.nodes.values())


def module_masses(model: FrameModel) -> dict[str, float]:
    """Per-module member mass plus structural lumped mass at nodes used only
    by that module."""
    masses = {tag: 0.0 for tag in MODULE_TAGS}
    node_tags: dict[int, set[str]] = {}
    for mid, m in model.members.items():
        masses[m.module_tag] += model.member_mass(mid)
        for nid in (m.node_i, m.node_j):
            node_tags.setdefault(nid, set()).add(m.module_tag)
    for nid, node in model.nodes.items():
        if node.mass_is_structural and node.lumped_mass > 0:
            tags = node_tags.get(nid, set())
            if len(tags) == 1:
                masses[next(iter(tags))] += node.lumped_mass
    return masses


def _connected_components(model: FrameModel) -> int:
    parent = {nid: nid for nid in model.nodes}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for m in model.members.values():
        if m.node_i in parent and m.node_j in parent:
            ra, rb = find(m.node_i), find(m.node_j)
            if ra != rb:
                parent[ra] = rb
    return len({find(n) for n in parent})


def validate(model: FrameModel) -> ValidationReport:
    """Cross-reference and connectivity checks; an error-free model is
    analysis-ready."""
    errors: list[str] = []
    warnings: list[str] = []

    if model.wheelbase <= 0:
        errors.append("meta: wheelbase must be positive")
    if model.track_width <= 0:
        errors.append("meta: track width must be positive")
    if model.vehicle_mass <= 0:
        errors.append("meta: vehicle mass must be positive")

    for mid, m in model.members.items():
        for nid in (m.node_i, m.node_j):
            if nid not in model.nodes:
                errors.append(f"member {mid}: node {nid} does not exist")
        if m.section not in model.sections:
            errors.append(f"member {mid}: section '{m.section}' does not exist")
        if m.material not in model.materials:
            errors.append(f"member {mid}: material '{m.material}' does not exist")
        if m.node_i in model.nodes and m.node_j in model.nodes:
            length = model.member_length(mid)
            if length <= 0:
                errors.append(f"member {mid}: zero length")
            else:
                pi = model.nodes[m.node_i].position
                pj = model.nodes[m.node_j].position
                axis = tuple((b - a) / length for a, b in zip(pi, pj))
                o = m.orientation
                onorm = math.sqrt(sum(c * c for c in o))
                if onorm == 0:
                    errors.append(f"member {mid}: zero orientation vector")
                else:
                    cross = (
                        axis[1] * o[2] - axis[2] * o[1],
                        axis[2] * o[0] - axis[0] * o[2],
                        axis[0] * o[1] - axis[1] * o[0],
                    )
                    if math.sqrt(sum(c * c for c in cross)) / onorm < 1e-8:
                        errors.append(
                            f"member {mid}: orientation parallel to member axis"
                        )

    for name, group in model.node_groups.items():
        for nid in group.nodes:
            if nid not in model.nodes:
                errors.append(f"node group '{name}': node {nid} does not exist")
    for name, mids in model.member_groups.items():
        for mid in mids:
            if mid not in model.members:
                errors.append(f"member group '{name}': member {mid} does not exist")
    for name, cset in model.constraint_sets.items():
        for c in cset:
            if c.node not in model.nodes:
                errors.append(f"constraint set '{name}': node {c.node} does not exist")
    for name, loads in model.loadcases.items():
        for load in loads:
            if load.node not in model.nodes:
                errors.append(f"loadcase '{name}': node {load.node} does not exist")
    for sc in model.scenarios.values():
        if sc.member_group and sc.member_group not in model.member_groups:
            warnings.append(
                f"scenario '{sc.name}': member group '{sc.member_group}' not defined"
            )

    if model.nodes and not errors:
        n_comp = _connected_components(model)
        if n_comp != 1:
            errors.append(f"frame not connected ({n_comp} components)")

    mass = structural_mass(model) if not errors else 0.0
    per_module = module_masses(model) if not errors else {}
    return ValidationReport(
        errors=tuple(errors),
        warnings=tuple(warnings),
        structural_mass_kg=mass,
        module_masses_kg=per_module,
    )
