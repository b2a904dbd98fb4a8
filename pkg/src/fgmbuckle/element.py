"""Enriched shear-flexible 4-node plate element.

Five fields per node (u0, v0, w0, bx, by). Bending and membrane strains use
the bilinear shape functions; the rotation part of the transverse shear
strain uses field-redistributed substitute shape functions so the element
stays locking-free in the thin limit without special integration. Nodes cut
or surrounded by a crack carry extra jump (Heaviside) and near-tip
degrees of freedom multiplying the same shape functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CrackSpec, QuadraturePlan, heaviside, tip_polar
from .materials import ConstitutiveSet

N_STANDARD = 20       # 4 nodes x 5 fields
H_DOFS = 5            # jump amplitude per field
TIP_DOFS = 23         # 5 near-tip functions x (u,v,w) + 4 x (bx,by)

_U, _V, _W, _BX, _BY = range(5)


def shape_q4(xi: float, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear shape functions and their parent-coordinate gradients."""
    n = 0.25 * np.array([(1 - xi) * (1 - eta), (1 + xi) * (1 - eta),
                         (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)])
    dn = 0.25 * np.array([[-(1 - eta), -(1 - xi)],
                          [(1 - eta), -(1 + xi)],
                          [(1 + eta), (1 + xi)],
                          [-(1 + eta), (1 - xi)]])
    return n, dn


def substitute_shear_shapes(xi: float, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Substitute (field-redistributed) shapes for bx and by in the shear strain.

    Valid for elements whose edges align with the coordinate axes, which the
    structured mesh guarantees.
    """
    nt1 = 0.25 * np.array([1 - eta, 1 - eta, 1 + eta, 1 + eta])
    nt2 = 0.25 * np.array([1 - xi, 1 + xi, 1 + xi, 1 - xi])
    return nt1, nt2


def substitute_shear_gradients(xi: float, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Parent gradients of the substitute shapes."""
    dnt1 = 0.25 * np.array([[0.0, -1.0], [0.0, -1.0], [0.0, 1.0], [0.0, 1.0]])
    dnt2 = 0.25 * np.array([[-1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
    return dnt1, dnt2


def tip_functions_G(r: float, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Near-tip basis for the displacements and its local Cartesian gradients.

    Five functions {sqrt(r) sin(t/2), cbrt(r) sin(t/2), cbrt(r) cos(t/2),
    cbrt(r) sin(3t/2), cbrt(r) cos(3t/2)} in tip polar coordinates; the
    gradient is taken in the tip-aligned frame (x1 along the crack
    extension).
    """
    if r <= 0.0:
        raise ValueError("near-tip functions are singular at r = 0")
    sq = math.sqrt(r)
    cb = r ** (1.0 / 3.0)
    s2, c2 = math.sin(theta / 2), math.cos(theta / 2)
    s32, c32 = math.sin(3 * theta / 2), math.cos(3 * theta / 2)
    vals = np.array([sq * s2, cb * s2, cb * c2, cb * s32, cb * c32])
    # (dval/dr, dval/dtheta) per function
    dr = np.array([0.5 * s2 / sq, (cb / (3 * r)) * s2, (cb / (3 * r)) * c2,
                   (cb / (3 * r)) * s32, (cb / (3 * r)) * c32])
    dt = np.array([0.5 * sq * c2, 0.5 * cb * c2, -0.5 * cb * s2,
                   1.5 * cb * c32, -1.5 * cb * s32])
    return vals, _to_cartesian(r, theta, dr, dt)


def tip_functions_F(r: float, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Near-tip basis for the rotations and its local Cartesian gradients.

    sqrt(r) * {sin(t/2), cos(t/2), sin(t/2) sin(t), cos(t/2) sin(t)}.
    """
    if r <= 0.0:
        raise ValueError("near-tip functions are singular at r = 0")
    sq = math.sqrt(r)
    s2, c2 = math.sin(theta / 2), math.cos(theta / 2)
    s, c = math.sin(theta), math.cos(theta)
    vals = sq * np.array([s2, c2, s2 * s, c2 * s])
    dr = (0.5 / sq) * np.array([s2, c2, s2 * s, c2 * s])
    dt = sq * np.array([0.5 * c2, -0.5 * s2,
                        0.5 * c2 * s + s2 * c, -0.5 * s2 * s + c2 * c])
    return vals, _to_cartesian(r, theta, dr, dt)


def _to_cartesian(r: float, theta: float, dr: np.ndarray, dt: np.ndarray) -> np.ndarray:
    ct, st = math.cos(theta), math.sin(theta)
    gx1 = dr * ct - dt * st / r
    gx2 = dr * st + dt * ct / r
    return np.column_stack([gx1, gx2])


@dataclass(frozen=True)
class ElementContext:
    """Geometry plus the enriched degrees of freedom one element carries.

    h_entries: (local_node, crack_id) pairs, in local DOF order.
    tip_entries: (local_node, crack_id, tip_id) triples, in local DOF order.
    """

    coords: np.ndarray  # (4, 2) corner coordinates, counter-clockwise
    cracks: tuple[CrackSpec, ...] = ()
    h_entries: tuple[tuple[int, int], ...] = ()
    tip_entries: tuple[tuple[int, int, int], ...] = ()

    @property
    def n_dofs(self) -> int:
        return (N_STANDARD + H_DOFS * len(self.h_entries)
                + TIP_DOFS * len(self.tip_entries))


@dataclass(frozen=True)
class FieldOperators:
    """Per-point interpolation rows: Cartesian gradients of all five fields
    and substitute-interpolated rotation values for the shear strain."""

    grad_x: np.ndarray  # (5, ndof)
    grad_y: np.ndarray  # (5, ndof)
    shear_val: np.ndarray  # (2, ndof) rotations via substitute shapes


def field_operators(ctx: ElementContext, xi: float, eta: float) -> FieldOperators:
    """Assemble the interpolation rows at one parent point."""
    n, dn = shape_q4(xi, eta)
    nt1, nt2 = substitute_shear_shapes(xi, eta)
    dnt1, dnt2 = substitute_shear_gradients(xi, eta)

    jac = dn.T @ ctx.coords  # (2, 2)
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    if det <= 0.0 or not np.isfinite(det):
        raise ValueError("singular or inverted element Jacobian")
    jinv = np.array([[jac[1, 1], -jac[0, 1]], [-jac[1, 0], jac[0, 0]]]) / det

    dn_xy = dn @ jinv.T       # (4, 2) Cartesian gradients of N
    dnt1_xy = dnt1 @ jinv.T
    dnt2_xy = dnt2 @ jinv.T
    phys = n @ ctx.coords

    ndof = ctx.n_dofs
    gx = np.zeros((5, ndof))
    gy = np.zeros((5, ndof))
    sv = np.zeros((2, ndof))

    for j in range(4):
        c = 5 * j
        for f, col in ((_U, c), (_V, c + 1), (_W, c + 2)):
            gx[f, col] = dn_xy[j, 0]
            gy[f, col] = dn_xy[j, 1]
        gx[_BX, c + 3] = dn_xy[j, 0]
        gy[_BX, c + 3] = dn_xy[j, 1]
        gx[_BY, c + 4] = dn_xy[j, 0]
        gy[_BY, c + 4] = dn_xy[j, 1]
        sv[0, c + 3] = nt1[j]
        sv[1, c + 4] = nt2[j]

    col = N_STANDARD
    for j, crack_id in ctx.h_entries:
        h = heaviside(phys, ctx.cracks[crack_id])
        for f, off in ((_U, 0), (_V, 1), (_W, 2)):
            gx[f, col + off] = dn_xy[j, 0] * h
            gy[f, col + off] = dn_xy[j, 1] * h
        gx[_BX, col + 3] = dnt1_xy[j, 0] * h
        gy[_BX, col + 3] = dnt1_xy[j, 1] * h
        gx[_BY, col + 4] = dnt2_xy[j, 0] * h
        gy[_BY, col + 4] = dnt2_xy[j, 1] * h
        sv[0, col + 3] = nt1[j] * h
        sv[1, col + 4] = nt2[j] * h
        col += H_DOFS

    for j, crack_id, tip_id in ctx.tip_entries:
        crack = ctx.cracks[crack_id]
        r, theta = tip_polar(phys, crack, tip_id)
        e1, e2 = crack.tip_frame(tip_id)
        g_vals, g_loc = tip_functions_G(r, theta)
        f_vals, f_loc = tip_functions_F(r, theta)
        g_glob = np.column_stack([g_loc @ np.array([e1[0], e2[0]]),
                                  g_loc @ np.array([e1[1], e2[1]])])
        f_glob = np.column_stack([f_loc @ np.array([e1[0], e2[0]]),
                                  f_loc @ np.array([e1[1], e2[1]])])
        for f, off in ((_U, 0), (_V, 5), (_W, 10)):
            sl = slice(col + off, col + off + 5)
            gx[f, sl] = dn_xy[j, 0] * g_vals + n[j] * g_glob[:, 0]
            gy[f, sl] = dn_xy[j, 1] * g_vals + n[j] * g_glob[:, 1]
        sl = slice(col + 15, col + 19)
        gx[_BX, sl] = dnt1_xy[j, 0] * f_vals + nt1[j] * f_glob[:, 0]
        gy[_BX, sl] = dnt1_xy[j, 1] * f_vals + nt1[j] * f_glob[:, 1]
        sv[0, sl] = nt1[j] * f_vals
        sl = slice(col + 19, col + 23)
        gx[_BY, sl] = dnt2_xy[j, 0] * f_vals + nt2[j] * f_glob[:, 0]
        gy[_BY, sl] = dnt2_xy[j, 1] * f_vals + nt2[j] * f_glob[:, 1]
        sv[1, sl] = nt2[j] * f_vals
        col += TIP_DOFS

    return FieldOperators(grad_x=gx, grad_y=gy, shear_val=sv)


def strain_operators(ctx: ElementContext, xi: float,
                     eta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Membrane, bending and shear strain-displacement matrices at a point.

    The shear operator combines w0 gradients from the bilinear shapes with
    rotation values from the substitute shapes (field-consistent form).
    """
    ops = field_operators(ctx, xi, eta)
    gx, gy, sv = ops.grad_x, ops.grad_y, ops.shear_val
    b_p = np.vstack([gx[_U], gy[_V], gy[_U] + gx[_V]])
    b_b = np.vstack([gx[_BX], gy[_BY], gy[_BX] + gx[_BY]])
    b_s = np.vstack([sv[0] + gx[_W], sv[1] + gy[_W]])
    return b_p, b_b, b_s


def _jacobian_det(ctx: ElementContext, xi: float, eta: float) -> float:
    _, dn = shape_q4(xi, eta)
    jac = dn.T @ ctx.coords
    return jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]


def element_matrices(ctx: ElementContext, constitutive: ConstitutiveSet,
                     plan: QuadraturePlan, thickness: float,
                     resultant_patterns: tuple[np.ndarray, ...] = (),
                     ) -> tuple[np.ndarray, list[np.ndarray]]:
    """Linear stiffness and one geometric stiffness per resultant pattern.

    A pattern is a uniform in-plane resultant triple (N_xx, N_yy, N_xy);
    the geometric stiffness is the quadratic form of the second-order work
    of that prestress, including the rotation-gradient terms scaled by
    h^2/12.
    """
    ndof = ctx.n_dofs
    ke = np.zeros((ndof, ndof))
    kg = [np.zeros((ndof, ndof)) for _ in resultant_patterns]
    mats = [np.array([[p[0], p[2]], [p[2], p[1]]], dtype=float)
            for p in resultant_patterns]
    a_m = constitutive.extensional
    b_m = constitutive.coupling
    d_m = constitutive.bending
    e_m = constitutive.shear
    rot_factor = thickness * thickness / 12.0

    for (xi, eta), w in zip(plan.points, plan.weights):
        ops = field_operators(ctx, xi, eta)
        gx, gy, sv = ops.grad_x, ops.grad_y, ops.shear_val
        b_p = np.vstack([gx[_U], gy[_V], gy[_U] + gx[_V]])
        b_b = np.vstack([gx[_BX], gy[_BY], gy[_BX] + gx[_BY]])
        b_s = np.vstack([sv[0] + gx[_W], sv[1] + gy[_W]])
        dv = w * _jacobian_det(ctx, xi, eta)
        pb = b_p.T @ b_m
        ke += dv * (b_p.T @ a_m @ b_p + pb @ b_b + (pb @ b_b).T
                    + b_b.T @ d_m @ b_b + b_s.T @ e_m @ b_s)
        if mats:
            b_w = np.vstack([gx[_W], gy[_W]])
            b_tx = np.vstack([gx[_BX], gy[_BX]])
            b_ty = np.vstack([gx[_BY], gy[_BY]])
            for n0, out in zip(mats, kg):
                out += dv * (b_w.T @ n0 @ b_w
                             + rot_factor * (b_tx.T @ n0 @ b_tx
                                             + b_ty.T @ n0 @ b_ty))

    _check_symmetry(ke)
    ke = 0.5 * (ke + ke.T)
    for i, m in enumerate(kg):
        _check_symmetry(m)
        kg[i] = 0.5 * (m + m.T)
    return ke, kg


def element_stiffness(ctx: ElementContext, constitutive: ConstitutiveSet,
                      plan: QuadraturePlan) -> np.ndarray:
    """Linear element stiffness over the plan's integration points."""
    ke, _ = element_matrices(ctx, constitutive, plan, thickness=1.0)
    return ke


def element_geometric_stiffness(ctx: ElementContext, resultants: np.ndarray,
                                plan: QuadraturePlan, thickness: float) -> np.ndarray:
    """Geometric stiffness for a uniform resultant triple (N_xx, N_yy, N_xy)."""
    dummy = ConstitutiveSet(extensional=np.zeros((3, 3)), coupling=np.zeros((3, 3)),
                            bending=np.zeros((3, 3)), shear=np.zeros((2, 2)))
    _, kg = element_matrices(ctx, dummy, plan, thickness,
                             (np.asarray(resultants, dtype=float),))
    return kg[0]


def _check_symmetry(m: np.ndarray) -> None:
    scale = np.abs(m).max()
    if scale == 0.0:
        return
    asym = np.abs(m - m.T).max()
    if asym > 1e-10 * scale:
        raise RuntimeError(f"element matrix asymmetric: {asym / scale:.3e} relative")
