"""Shear-flexible 3D beam element: 12x12 stiffness and mass matrices.

Local axes: x along the member, y along the section height (from the member's
orientation vector), z completing the right-handed triad. DOF order per node
is (ux, uy, uz, rx, ry, rz); element DOFs stack node i then node j.
"""

from __future__ import annotations

import numpy as np

from .sections import SectionProperties

_PARALLEL_TOL = 1e-8


def shear_parameter(e: float, g: float, inertia: float, shear_area: float,
                    length: float) -> float:
    """Phi = 12EI / (G*As*L^2); zero shear area recovers the rigid-shear limit."""
    if shear_area <= 0.0:
        return 0.0
    return 12.0 * e * inertia / (g * shear_area * length**2)


def _bending_block(ei: float, length: float, phi: float, sign: float) -> np.ndarray:
    """4x4 bending stiffness for DOFs (v_i, theta_i, v_j, theta_j).

    sign=+1 for the x-y plane (rotation rz), -1 for the x-z plane (ry),
    where the rotation sense flips the odd-row/column terms.
    """
    ll = length
    c = ei / (ll**3 * (1.0 + phi))
    s = sign
    return c * np.array([
        [12.0, s * 6.0 * ll, -12.0, s * 6.0 * ll],
        [s * 6.0 * ll, (4.0 + phi) * ll**2, -s * 6.0 * ll, (2.0 - phi) * ll**2],
        [-12.0, -s * 6.0 * ll, 12.0, -s * 6.0 * ll],
        [s * 6.0 * ll, (2.0 - phi) * ll**2, -s * 6.0 * ll, (4.0 + phi) * ll**2],
    ])


_BEND_DOFS_XY = (1, 5, 7, 11)  # uy/rz pairs
_BEND_DOFS_XZ = (2, 4, 8, 10)  # uz/ry pairs


def timoshenko_stiffness(e: float, g: float, length: float,
                         props: SectionProperties) -> np.ndarray:
    k = np.zeros((12, 12))
    ax = e * props.area / length
    k[np.ix_((0, 6), (0, 6))] += ax * np.array([[1.0, -1.0], [-1.0, 1.0]])
    to = g * props.torsion_j / length
    k[np.ix_((3, 9), (3, 9))] += to * np.array([[1.0, -1.0], [-1.0, 1.0]])

    phi_y = shear_parameter(e, g, props.i_z, props.shear_area_y, length)
    k[np.ix_(_BEND_DOFS_XY, _BEND_DOFS_XY)] += _bending_block(
        e * props.i_z, length, phi_y, +1.0)
    phi_z = shear_parameter(e, g, props.i_y, props.shear_area_z, length)
    k[np.ix_(_BEND_DOFS_XZ, _BEND_DOFS_XZ)] += _bending_block(
        e * props.i_y, length, phi_z, -1.0)
    return k


def _trans_mass_block(rho_a_l: float, length: float, sign: float) -> np.ndarray:
    ll = length
    s = sign
    return rho_a_l / 420.0 * np.array([
        [156.0, s * 22.0 * ll, 54.0, -s * 13.0 * ll],
        [s * 22.0 * ll, 4.0 * ll**2, s * 13.0 * ll, -3.0 * ll**2],
        [54.0, s * 13.0 * ll, 156.0, -s * 22.0 * ll],
        [-s * 13.0 * ll, -3.0 * ll**2, -s * 22.0 * ll, 4.0 * ll**2],
    ])


def _rotary_mass_block(rho_i: float, length: float, sign: float) -> np.ndarray:
    ll = length
    s = sign
    return rho_i / (30.0 * ll) * np.array([
        [36.0, s * 3.0 * ll, -36.0, s * 3.0 * ll],
        [s * 3.0 * ll, 4.0 * ll**2, -s * 3.0 * ll, -(ll**2)],
        [-36.0, -s * 3.0 * ll, 36.0, -s * 3.0 * ll],
        [s * 3.0 * ll, -(ll**2), -s * 3.0 * ll, 4.0 * ll**2],
    ])


def consistent_mass(rho: float, length: float, props: SectionProperties) -> np.ndarray:
    m = np.zeros((12, 12))
    rho_a_l = rho * props.area * length
    pair = np.array([[2.0, 1.0], [1.0, 2.0]])
    m[np.ix_((0, 6), (0, 6))] += rho_a_l / 6.0 * pair
    polar = props.i_y + props.i_z
    m[np.ix_((3, 9), (3, 9))] += rho * polar * length / 6.0 * pair

    m[np.ix_(_BEND_DOFS_XY, _BEND_DOFS_XY)] += _trans_mass_block(rho_a_l, length, +1.0)
    m[np.ix_(_BEND_DOFS_XY, _BEND_DOFS_XY)] += _rotary_mass_block(
        rho * props.i_z, length, +1.0)
    m[np.ix_(_BEND_DOFS_XZ, _BEND_DOFS_XZ)] += _trans_mass_block(rho_a_l, length, -1.0)
    m[np.ix_(_BEND_DOFS_XZ, _BEND_DOFS_XZ)] += _rotary_mass_block(
        rho * props.i_y, length, -1.0)
    return m


def lumped_mass(rho: float, length: float, props: SectionProperties) -> np.ndarray:
    """Diagonal mass by row-sum scaling of the consistent matrix: each diagonal
    group is scaled so the element's translational mass (and torsional inertia)
    is conserved exactly."""
    consistent = consistent_mass(rho, length, props)
    diag = np.diag(consistent).copy()
    out = np.zeros(12)
    rho_a_l = rho * props.area * length
    polar_inertia = rho * (props.i_y + props.i_z) * length
    # (translational dofs, coupled rotational dofs, conserved total)
    groups = [
        ((0, 6), (), rho_a_l),
        ((1, 7), (5, 11), rho_a_l),
        ((2, 8), (4, 10), rho_a_l),
        ((3, 9), (), polar_inertia),
    ]
    for trans, rots, total in groups:
        scale = total / sum(diag[i] for i in trans)
        for i in (*trans, *rots):
            out[i] = diag[i] * scale
    return np.diag(out)


def rotation_matrix(p_i: np.ndarray, p_j: np.ndarray,
                    orientation: np.ndarray) -> np.ndarray:
    """Rows are the local unit axes expressed in global coordinates."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    axis = p_j - p_i
    length = np.linalg.norm(axis)
    if length <= 0.0:
        raise ValueError("beam has zero length")
    x_hat = axis / length
    o = np.asarray(orientation, dtype=float)
    o_norm = np.linalg.norm(o)
    if o_norm <= 0.0:
        raise ValueError("orientation vector must be nonzero")
    y_raw = o - (o @ x_hat) * x_hat
    y_len = np.linalg.norm(y_raw)
    if y_len / o_norm < _PARALLEL_TOL:
        raise ValueError("orientation vector is parallel to the beam axis")
    y_hat = y_raw / y_len
    z_hat = np.cross(x_hat, y_hat)
    return np.vstack((x_hat, y_hat, z_hat))


def transformation(rotation: np.ndarray) -> np.ndarray:
    t = np.zeros((12, 12))
    for blk in range(4):
        t[3 * blk:3 * blk + 3, 3 * blk:3 * blk + 3] = rotation
    return t


def element_matrices(p_i: np.ndarray, p_j: np.ndarray, orientation: np.ndarray,
                     e: float, g: float, rho: float, props: SectionProperties,
                     lumped: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Global-frame (K, M) for one element."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    length = float(np.linalg.norm(p_j - p_i))
    k_local = timoshenko_stiffness(e, g, length, props)
    m_local = (lumped_mass if lumped else consistent_mass)(rho, length, props)
    t = transformation(rotation_matrix(p_i, p_j, orientation))
    return t.T @ k_local @ t, t.T @ m_local @ t
