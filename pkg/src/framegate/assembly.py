"""Meshing and global system assembly.

Members are subdivided into beam elements no longer than a target length.
Mesh node ordering is deterministic: model nodes in id order, then internal
subdivision nodes in member-id order, so assembled matrices (and everything
downstream) are reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .beam import element_matrices
from .model import ConstraintSpec, DOF_NAMES, FrameModel, LoadSpec
from .sections import compute_properties

DOF_INDEX = {name: i for i, name in enumerate(DOF_NAMES)}


@dataclass(frozen=True)
class AnalysisSettings:
    element_length: float = 0.015  # m, target subdivision length
    lumped_mass: bool = False

    def __post_init__(self):
        if self.element_length <= 0:
            raise ValueError("element length must be positive")


@dataclass(frozen=True)
class Mesh:
    coords: np.ndarray  # (n_nodes, 3)
    model_node_index: dict[int, int]  # model node id -> mesh row
    element_nodes: np.ndarray  # (n_elements, 2) mesh rows
    element_member: np.ndarray  # (n_elements,) owning member id
    member_element_rows: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.coords.shape[0]

    @property
    def n_dofs(self) -> int:
        return 6 * self.n_nodes

    def dof(self, model_node: int, dof_name: str) -> int:
        return 6 * self.model_node_index[model_node] + DOF_INDEX[dof_name]


def build_mesh(model: FrameModel, settings: AnalysisSettings) -> Mesh:
    node_ids = sorted(model.nodes)
    index = {nid: i for i, nid in enumerate(node_ids)}
    coords = [np.asarray(model.nodes[nid].position, dtype=float) for nid in node_ids]

    elem_nodes: list[tuple[int, int]] = []
    elem_member: list[int] = []
    member_rows: dict[int, np.ndarray] = {}
    for mid in sorted(model.members):
        m = model.members[mid]
        p_i = np.asarray(model.nodes[m.node_i].position, dtype=float)
        p_j = np.asarray(model.nodes[m.node_j].position, dtype=float)
        length = float(np.linalg.norm(p_j - p_i))
        n_seg = max(1, math.ceil(length / settings.element_length))
        chain = [index[m.node_i]]
        for s in range(1, n_seg):
            coords.append(p_i + (p_j - p_i) * (s / n_seg))
            chain.append(len(coords) - 1)
        chain.append(index[m.node_j])
        first = len(elem_nodes)
        for a, b in zip(chain[:-1], chain[1:]):
            elem_nodes.append((a, b))
            elem_member.append(mid)
        member_rows[mid] = np.arange(first, len(elem_nodes))

    return Mesh(
        coords=np.vstack(coords),
        model_node_index=index,
        element_nodes=np.asarray(elem_nodes, dtype=int),
        element_member=np.asarray(elem_member, dtype=int),
        member_element_rows=member_rows,
    )


@dataclass(frozen=True)
class GlobalSystem:
    mesh: Mesh
    k: sp.csr_matrix
    m: sp.csr_matrix


def assemble(model: FrameModel, settings: Optional[AnalysisSettings] = None,
             mesh: Optional[Mesh] = None) -> GlobalSystem:
    """Assemble global stiffness and mass; nodal lumped masses land on the
    translational diagonal of M."""
    settings = settings or AnalysisSettings()
    mesh = mesh or build_mesh(model, settings)
    n = mesh.n_dofs

    props_cache = {name: compute_properties(sec) for name, sec in model.sections.items()}

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    k_vals: list[np.ndarray] = []
    m_vals: list[np.ndarray] = []
    for e_idx in range(mesh.element_nodes.shape[0]):
        a, b = mesh.element_nodes[e_idx]
        member = model.members[int(mesh.element_member[e_idx])]
        mat = model.materials[member.material]
        k_e, m_e = element_matrices(
            mesh.coords[a], mesh.coords[b],
            np.asarray(member.orientation, dtype=float),
            mat.youngs_modulus, mat.shear_modulus, mat.density,
            props_cache[member.section],
            lumped=settings.lumped_mass,
        )
        dofs = np.concatenate((np.arange(6 * a, 6 * a + 6), np.arange(6 * b, 6 * b + 6)))
        grid_r, grid_c = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(grid_r.ravel())
        cols.append(grid_c.ravel())
        k_vals.append(k_e.ravel())
        m_vals.append(m_e.ravel())

    r = np.concatenate(rows)
    c = np.concatenate(cols)
    k = sp.coo_matrix((np.concatenate(k_vals), (r, c)), shape=(n, n)).tocsr()
    m = sp.coo_matrix((np.concatenate(m_vals), (r, c)), shape=(n, n)).tocoo()

    extra_r, extra_v = [], []
    for nid in sorted(model.nodes):
        node = model.nodes[nid]
        if node.lumped_mass > 0.0:
            base = 6 * mesh.model_node_index[nid]
            for d in range(3):
                extra_r.append(base + d)
                extra_v.append(node.lumped_mass)
    if extra_r:
        idx = np.asarray(extra_r, dtype=int)
        m = m.tocsr() + sp.coo_matrix(
            (np.asarray(extra_v), (idx, idx)), shape=(n, n)).tocsr()
    else:
        m = m.tocsr()
    return GlobalSystem(mesh=mesh, k=k, m=m)


def loads_vector(mesh: Mesh, loads: Iterable[LoadSpec]) -> np.ndarray:
    f = np.zeros(mesh.n_dofs)
    for load in loads:
        base = 6 * mesh.model_node_index[load.node]
        f[base:base + 3] += load.force
        f[base + 3:base + 6] += load.moment
    return f


def constraint_dofs(mesh: Mesh, constraints: Iterable[ConstraintSpec]) -> np.ndarray:
    fixed = {mesh.dof(c.node, name) for c in constraints for name in c.dofs}
    return np.asarray(sorted(fixed), dtype=int)


@dataclass(frozen=True)
class ReducedSystem:
    """Row/column-eliminated system; keeps the constrained-to-free coupling
    block for reaction recovery."""
    free: np.ndarray
    fixed: np.ndarray
    k_ff: sp.csr_matrix
    m_ff: Optional[sp.csr_matrix]
    k_cf: sp.csr_matrix

    def expand(self, u_free: np.ndarray) -> np.ndarray:
        full = np.zeros(len(self.free) + len(self.fixed))
        full[self.free] = u_free
        return full

    def reactions(self, u_free: np.ndarray, f_full: np.ndarray) -> np.ndarray:
        """Reaction forces at the fixed DOFs (global-frame)."""
        return np.asarray(self.k_cf @ u_free).ravel() - f_full[self.fixed]


def reduce_system(k: sp.csr_matrix, fixed: np.ndarray,
                  m: Optional[sp.csr_matrix] = None) -> ReducedSystem:
    n = k.shape[0]
    mask = np.ones(n, dtype=bool)
    mask[fixed] = False
    free = np.flatnonzero(mask)
    k_csc = k.tocsc()
    k_ff = k_csc[:, free][free, :].tocsr()
    k_cf = k_csc[:, free][fixed, :].tocsr()
    m_ff = None
    if m is not None:
        m_ff = m.tocsc()[:, free][free, :].tocsr()
    return ReducedSystem(free=free, fixed=fixed, k_ff=k_ff, m_ff=m_ff, k_cf=k_cf)
