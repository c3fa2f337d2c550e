"""Modal analysis: free-free (or constrained) natural frequencies and shapes.

Free-free runs keep the singular stiffness matrix and pull the lowest modes
through shift-invert Lanczos at sigma = -1 (K + M is positive definite, so the
factorization is safe). A frame floating in space must show exactly six
rigid-body modes below the rigid threshold; the first flexible frequency is
the gate metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import (
    AnalysisSettings,
    GlobalSystem,
    Mesh,
    assemble,
    constraint_dofs,
    reduce_system,
)
from .model import ConstraintSpec, FrameModel
from .static import AnalysisError

RIGID_THRESHOLD_HZ = 0.5
_DENSE_CUTOFF = 600  # below this many free DOFs a dense eigensolve is cheaper

# Lanczos start vector: fixed so repeated runs are bit-identical
_SEED = 1234


@dataclass(frozen=True)
class ModeSet:
    frequencies_hz: np.ndarray  # ascending
    shapes: np.ndarray  # (n_dofs, k), mass-normalized, zeros at fixed DOFs
    mesh: Mesh
    rigid_threshold_hz: float = RIGID_THRESHOLD_HZ
    k_reduced: Optional[sp.csr_matrix] = field(default=None, repr=False)
    m_reduced: Optional[sp.csr_matrix] = field(default=None, repr=False)
    free_dofs: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n_rigid(self) -> int:
        return int(np.sum(self.frequencies_hz < self.rigid_threshold_hz))

    @property
    def first_flexible_hz(self) -> float:
        flex = self.frequencies_hz[self.frequencies_hz >= self.rigid_threshold_hz]
        if flex.size == 0:
            raise AnalysisError("no flexible mode found; request more modes")
        return float(flex[0])

    def residual(self, i: int) -> float:
        """Relative eigenpair residual ||K phi - w^2 M phi|| / ||K phi||."""
        if self.k_reduced is None or self.m_reduced is None or self.free_dofs is None:
            raise AnalysisError("mode set was built without matrices retained")
        phi = self.shapes[self.free_dofs, i]
        w2 = (2.0 * np.pi * self.frequencies_hz[i]) ** 2
        k_phi = self.k_reduced @ phi
        r = k_phi - w2 * (self.m_reduced @ phi)
        denom = np.linalg.norm(k_phi)
        if denom == 0.0:
            return float(np.linalg.norm(r))
        return float(np.linalg.norm(r) / denom)


def classify_mode(frequency_hz: float,
                  threshold_hz: float = RIGID_THRESHOLD_HZ) -> str:
    return "rigid" if frequency_hz < threshold_hz else "flexible"


def first_flexible_frequency(modes: ModeSet) -> float:
    return modes.first_flexible_hz


def modal_analysis(model: FrameModel,
                   settings: Optional[AnalysisSettings] = None,
                   n_modes: int = 12,
                   constraints: Union[None, str, Sequence[ConstraintSpec]] = None,
                   system: Optional[GlobalSystem] = None) -> ModeSet:
    """Lowest `n_modes` modes; free-free when `constraints` is None."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    settings = settings or AnalysisSettings()
    system = system or assemble(model, settings)
    mesh = system.mesh
    n = mesh.n_dofs

    if constraints is None:
        fixed = np.empty(0, dtype=int)
        free = np.arange(n)
        k_ff, m_ff = system.k, system.m
    else:
        if isinstance(constraints, str):
            if constraints not in model.constraint_sets:
                raise ValueError(f"unknown constraint set '{constraints}'")
            constraints = model.constraint_sets[constraints]
        fixed = constraint_dofs(mesh, constraints)
        red = reduce_system(system.k, fixed, m=system.m)
        free = red.free
        k_ff, m_ff = red.k_ff, red.m_ff

    n_free = free.size
    if n_free == 0:
        raise AnalysisError("all DOFs constrained; nothing to analyze")
    k_req = min(n_modes, n_free)

    if n_free < _DENSE_CUTOFF or k_req >= n_free - 1:
        vals, vecs = sla.eigh(k_ff.toarray(), m_ff.toarray())
        vals, vecs = vals[:k_req], vecs[:, :k_req]
    else:
        v0 = np.random.default_rng(_SEED).standard_normal(n_free)
        try:
            vals, vecs = spla.eigsh(k_ff, k=k_req, M=m_ff, sigma=-1.0,
                                    which="LM", v0=v0)
        except (spla.ArpackNoConvergence, RuntimeError) as exc:
            raise AnalysisError(f"eigensolver failed to converge: {exc}") from exc

    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    freqs = np.sqrt(np.clip(vals, 0.0, None)) / (2.0 * np.pi)

    # enforce exact mass-normalization and a deterministic sign convention
    for i in range(vecs.shape[1]):
        phi = vecs[:, i]
        scale = float(phi @ (m_ff @ phi))
        if scale > 0:
            phi /= np.sqrt(scale)
        j = int(np.argmax(np.abs(phi)))
        if phi[j] < 0:
            phi *= -1.0
        vecs[:, i] = phi

    shapes = np.zeros((n, vecs.shape[1]))
    shapes[free, :] = vecs
    return ModeSet(
        frequencies_hz=freqs,
        shapes=shapes,
        mesh=mesh,
        k_reduced=k_ff.tocsr() if sp.issparse(k_ff) else sp.csr_matrix(k_ff),
        m_reduced=m_ff.tocsr() if sp.issparse(m_ff) else sp.csr_matrix(m_ff),
        free_dofs=free,
    )
