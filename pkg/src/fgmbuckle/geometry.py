"""Structured mesh, mesh-independent defects, and per-element quadrature.

Cracks are straight interior segments; cutouts are circles or ellipses
described by signed level-set functions. Neither conforms to the mesh:
elements are classified by how a defect touches them, nodes collect
enrichment flags, and cut elements receive triangulated subcell quadrature
aligned with the discontinuity.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

log = logging.getLogger(__name__)

# element classes
STANDARD = "standard"
SPLIT = "split"
TIP = "tip"
TIP_BLEND = "tip-blending"
SPLIT_BLEND = "split-blending"
SPLIT_TIP_BLEND = "split-tip-blending"
CUT_BY_CUTOUT = "cut-by-cutout"
VOID = "void"

# relative area below which a subcell triangle is discarded
DEGENERATE_AREA_FRACTION = 1e-14


@dataclass(frozen=True)
class PlateGeometry:
    """Rectangular plate occupying [0, a] x [0, b] with thickness h."""

    a: float
    b: float
    h: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0 or self.h <= 0:
            raise ValueError("plate dimensions must be positive")


@dataclass(frozen=True)
class StructuredMesh:
    """Uniform rectangular grid; nodes row-major, elements counter-clockwise."""

    geometry: PlateGeometry
    nx: int
    ny: int
    coords: np.ndarray        # (n_nodes, 2)
    connectivity: np.ndarray  # (n_elements, 4) int

    @property
    def n_nodes(self) -> int:
        return (self.nx + 1) * (self.ny + 1)

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny

    @property
    def dx(self) -> float:
        return self.geometry.a / self.nx

    @property
    def dy(self) -> float:
        return self.geometry.b / self.ny

    def node_id(self, i: int, j: int) -> int:
        return j * (self.nx + 1) + i

    def element_id(self, i: int, j: int) -> int:
        return j * self.nx + i

    def element_box(self, e: int) -> tuple[float, float, float, float]:
        """(x0, y0, x1, y1) of element e."""
        i, j = e % self.nx, e // self.nx
        return i * self.dx, j * self.dy, (i + 1) * self.dx, (j + 1) * self.dy

    def element_nodes(self, e: int) -> np.ndarray:
        return self.connectivity[e]

    def to_parent(self, e: int, points: np.ndarray) -> np.ndarray:
        """Map physical points (m, 2) into the element's parent square."""
        x0, y0, x1, y1 = self.element_box(e)
        out = np.empty_like(points, dtype=float)
        out[..., 0] = (2.0 * points[..., 0] - (x0 + x1)) / (x1 - x0)
        out[..., 1] = (2.0 * points[..., 1] - (y0 + y1)) / (y1 - y0)
        return out


def generate_mesh(geometry: PlateGeometry, nx: int, ny: int) -> StructuredMesh:
    """Uniform nx-by-ny quadrilateral grid over the plate."""
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be at least 1")
    xs = np.linspace(0.0, geometry.a, nx + 1)
    ys = np.linspace(0.0, geometry.b, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    coords = np.column_stack([X.ravel(), Y.ravel()])
    conn = np.empty((nx * ny, 4), dtype=int)
    for j in range(ny):
        for i in range(nx):
            n0 = j * (nx + 1) + i
            conn[j * nx + i] = (n0, n0 + 1, n0 + nx + 2, n0 + nx + 1)
    return StructuredMesh(geometry=geometry, nx=nx, ny=ny, coords=coords,
                          connectivity=conn)


# ---------------------------------------------------------------------------
# defects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrackSpec:
    """Straight interior crack: center, length and angle from the +x axis."""

    center: tuple[float, float]
    length: float
    angle: float  # radians

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("crack length must be positive")

    @property
    def tangent(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])

    @property
    def normal(self) -> np.ndarray:
        """Tangent rotated by +90 degrees; the positive Heaviside side."""
        return np.array([-math.sin(self.angle), math.cos(self.angle)])

    def tip(self, tip_id: int) -> np.ndarray:
        sign = -1.0 if tip_id == 0 else 1.0
        return np.asarray(self.center) + sign * 0.5 * self.length * self.tangent

    def tip_frame(self, tip_id: int) -> tuple[np.ndarray, np.ndarray]:
        """Local (e1, e2): e1 points along the crack extension beyond the tip."""
        if tip_id == 0:
            return -self.tangent, -self.normal
        return self.tangent, self.normal


@dataclass(frozen=True)
class CircleCutout:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("cutout radius must be positive")

    def level_set(self, x, y):
        return np.hypot(x - self.center[0], y - self.center[1]) - self.radius

    def boundary_points(self, n: int = 64) -> np.ndarray:
        t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        return np.column_stack([self.center[0] + self.radius * np.cos(t),
                                self.center[1] + self.radius * np.sin(t)])


@dataclass(frozen=True)
class EllipseCutout:
    """Elliptical cutout with semi-axes (d, e) rotated by `angle` from +x."""

    center: tuple[float, float]
    d: float
    e: float
    angle: float = 0.0

    def __post_init__(self):
        if self.d <= 0 or self.e <= 0:
            raise ValueError("ellipse semi-axes must be positive")

    def coefficients(self) -> tuple[float, float, float]:
        c, s = math.cos(self.angle), math.sin(self.angle)
        a1 = (c / self.d) ** 2
        a2 = 2.0 * c * s * (1.0 / self.d ** 2 - 1.0 / self.e ** 2)
        a3 = (s / self.d) ** 2 + (c / self.e) ** 2
        return a1, a2, a3

    def level_set(self, x, y):
        a1, a2, a3 = self.coefficients()
        ddx = np.asarray(x) - self.center[0]
        ddy = np.asarray(y) - self.center[1]
        rad = a1 * ddx ** 2 - a2 * ddx * ddy + a3 * ddy ** 2
        if np.any(rad < 0):
            raise ArithmeticError("elliptical level set produced a negative radicand")
        return np.sqrt(rad) - 1.0

    def boundary_points(self, n: int = 64) -> np.ndarray:
        t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        c, s = math.cos(self.angle), math.sin(self.angle)
        px = self.d * np.cos(t)
        py = self.e * np.sin(t)
        return np.column_stack([self.center[0] + c * px - s * py,
                                self.center[1] + s * px + c * py])


Cutout = CircleCutout | EllipseCutout


def level_set_circle(point, spec: CircleCutout) -> float:
    """Signed distance to the circle: negative inside the cutout."""
    point = np.asarray(point, dtype=float)
    return float(spec.level_set(point[0], point[1]))


def level_set_ellipse(point, spec: EllipseCutout) -> float:
    """Elliptical level set: -1 at the center, 0 on the boundary."""
    point = np.asarray(point, dtype=float)
    return float(spec.level_set(point[0], point[1]))


@dataclass(frozen=True)
class DefectSet:
    cracks: tuple[CrackSpec, ...] = ()
    cutouts: tuple[Cutout, ...] = ()


def crack_local_coords(point, crack: CrackSpec) -> tuple[float, float]:
    """(signed normal distance, tangential coordinate) in the crack frame.

    The normal distance is positive on the side reached by rotating the
    crack tangent by +90 degrees; the tangential coordinate is measured from
    the crack center.
    """
    v = np.asarray(point, dtype=float) - np.asarray(crack.center)
    return float(v @ crack.normal), float(v @ crack.tangent)


def heaviside(point, crack: CrackSpec) -> float:
    """Sign of the normal distance; exactly-on-the-line resolves to +1."""
    sn, _ = crack_local_coords(point, crack)
    return 1.0 if sn >= 0.0 else -1.0


def tip_polar(point, crack: CrackSpec, tip_id: int) -> tuple[float, float]:
    """Polar coordinates (r, theta) about a crack tip.

    theta = 0 along the crack extension beyond the tip and +/-pi on the
    crack faces; theta in (-pi, pi].
    """
    if tip_id not in (0, 1):
        raise ValueError("tip_id must be 0 or 1")
    v = np.asarray(point, dtype=float) - crack.tip(tip_id)
    e1, e2 = crack.tip_frame(tip_id)
    x1, x2 = float(v @ e1), float(v @ e2)
    r = math.hypot(x1, x2)
    if r == 0.0:
        raise ValueError("evaluation point coincides with the crack tip")
    return r, math.atan2(x2, x1)


# ---------------------------------------------------------------------------
# defect validation
# ---------------------------------------------------------------------------

def _segments_intersect(p0, p1, q0, q1) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q0, q1, p0)
    d2 = orient(q0, q1, p1)
    d3 = orient(p0, p1, q0)
    d4 = orient(p0, p1, q1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True

    def on_segment(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    for d, a, b, c in ((d1, q0, q1, p0), (d2, q0, q1, p1),
                       (d3, p0, p1, q0), (d4, p0, p1, q1)):
        if d == 0 and on_segment(a, b, c):
            return True
    return False


def validate_defects(geometry: PlateGeometry, defects: DefectSet) -> list[str]:
    """All geometric placement errors, not just the first."""
    errors: list[str] = []
    a, b = geometry.a, geometry.b

    for ic, crack in enumerate(defects.cracks):
        for t in (0, 1):
            x, y = crack.tip(t)
            if not (0.0 < x < a and 0.0 < y < b):
                errors.append(f"crack {ic}: endpoint {t} at ({x:.6g}, {y:.6g}) "
                              "is not strictly inside the plate")

    for io, cut in enumerate(defects.cutouts):
        pts = cut.boundary_points()
        if not (np.all(pts[:, 0] > 0) and np.all(pts[:, 0] < a)
                and np.all(pts[:, 1] > 0) and np.all(pts[:, 1] < b)):
            errors.append(f"cutout {io}: boundary is not strictly inside the plate")

    for i in range(len(defects.cracks)):
        for j in range(i + 1, len(defects.cracks)):
            ci, cj = defects.cracks[i], defects.cracks[j]
            if _segments_intersect(ci.tip(0), ci.tip(1), cj.tip(0), cj.tip(1)):
                errors.append(f"cracks {i} and {j} intersect")

    for ic, crack in enumerate(defects.cracks):
        ts = np.linspace(0.0, 1.0, 65)
        p0, p1 = crack.tip(0), crack.tip(1)
        pts = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
        for io, cut in enumerate(defects.cutouts):
            if np.any(cut.level_set(pts[:, 0], pts[:, 1]) <= 0):
                errors.append(f"crack {ic} intersects cutout {io}")

    for i in range(len(defects.cutouts)):
        for j in range(len(defects.cutouts)):
            if i == j:
                continue
            pi = defects.cutouts[i].boundary_points()
            cj = defects.cutouts[j]
            inside = cj.level_set(pi[:, 0], pi[:, 1]) < 0
            center_inside = cj.level_set(*defects.cutouts[i].center) < 0
            if np.any(inside) or center_inside:
                if i < j:
                    errors.append(f"cutouts {i} and {j} overlap")
                break
    return errors


# ---------------------------------------------------------------------------
# quadrature rules (frozen constants)
# ---------------------------------------------------------------------------

def _tensor_gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    pts = np.array([[xi, eta] for eta in x for xi in x])
    wts = np.array([wi * wj for wj in w for wi in w])
    return pts, wts

GAUSS_2X2 = _tensor_gauss(2)
GAUSS_4X4 = _tensor_gauss(4)

# reference-triangle rules on (0,0)-(1,0)-(0,1); weights sum to the reference
# area 1/2; all weights positive, all points interior.
TRI3 = (np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]]),
        np.full(3, 1 / 6))  # degree 2

# conical product of 2-point Gauss-Jacobi and Gauss-Legendre rules; degree 3
TRI4 = (np.array([[0.15505102572168217, 0.17855872826361643],
                  [0.15505102572168217, 0.6663902460147014],
                  [0.6449489742783179, 0.07503111022260811],
                  [0.6449489742783179, 0.280019915499074]]),
        np.array([0.15902069087198858, 0.15902069087198858,
                  0.09097930912801142, 0.09097930912801142]))

# fully symmetric 13-point rule of degree 6 with strictly positive weights
# (centroid + two 3-orbits + one 6-orbit), derived by solving the symmetric
# moment equations; the classical 13-point rule carries a negative centroid
# weight and is not used here.
def _tri13() -> tuple[np.ndarray, np.ndarray]:
    w0 = 0.0331142714342166
    w1, al = 0.02466158939632771827116078, 0.06180285695550061793919696
    w2, be = 0.04459420562772063226663561, 0.2410923194535251367624199
    w3 = 0.04318639058227305806443514
    ga, de = 0.3088805827561486004502258, 0.6354223222865990365200224
    pts = [(1 / 3, 1 / 3, w0)]
    for al_, w_ in ((al, w1), (be, w2)):
        pts += [(al_, al_, w_), (1 - 2 * al_, al_, w_), (al_, 1 - 2 * al_, w_)]
    lam = (ga, de, 1.0 - ga - de)
    for a_, b_ in ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)):
        pts.append((lam[a_], lam[b_], w3))
    arr = np.array(pts)
    return arr[:, :2].copy(), arr[:, 2].copy()

TRI13 = _tri13()

POINTS_PER_TRIANGLE = {SPLIT: 3, TIP: 13, SPLIT_TIP_BLEND: 4, CUT_BY_CUTOUT: 3}
_TRI_RULES = {3: TRI3, 4: TRI4, 13: TRI13}


# ---------------------------------------------------------------------------
# polygon utilities (parent coordinates, convex polygons)
# ---------------------------------------------------------------------------

def polygon_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def polygon_centroid(poly: np.ndarray) -> np.ndarray:
    a = polygon_area(poly)
    if abs(a) < 1e-300:
        return poly.mean(axis=0)
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    cx = np.sum((x + xn) * cross) / (6.0 * a)
    cy = np.sum((y + yn) * cross) / (6.0 * a)
    return np.array([cx, cy])


def _clip_half_plane(poly: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Keep the part of `poly` where the linearly interpolated `values` >= 0."""
    out = []
    m = len(poly)
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        vp, vq = values[i], values[(i + 1) % m]
        if vp >= 0.0:
            out.append(p)
        if (vp > 0.0) != (vq > 0.0) and vp != vq:
            t = vp / (vp - vq)
            if 0.0 < t < 1.0:
                out.append(p + t * (q - p))
    if len(out) < 3:
        return np.empty((0, 2))
    return _dedupe(np.array(out))


def _dedupe(poly: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    keep = []
    for p in poly:
        if not keep or np.linalg.norm(p - keep[-1]) > tol:
            keep.append(p)
    if len(keep) > 1 and np.linalg.norm(keep[0] - keep[-1]) <= tol:
        keep.pop()
    return np.array(keep) if len(keep) >= 3 else np.empty((0, 2))


def split_polygon_by_line(poly: np.ndarray, p0: np.ndarray,
                          direction: np.ndarray) -> list[np.ndarray]:
    """Both pieces of a convex polygon cut by an infinite line."""
    d = direction / np.linalg.norm(direction)
    s = (poly[:, 0] - p0[0]) * (-d[1]) + (poly[:, 1] - p0[1]) * d[0]
    pieces = []
    for sign in (1.0, -1.0):
        piece = _clip_half_plane(poly, sign * s)
        if len(piece) >= 3 and abs(polygon_area(piece)) > 1e-14:
            pieces.append(piece)
    return pieces if pieces else [poly]


def insert_vertex(poly: np.ndarray, point: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Insert `point` into the polygon edge it lies on (no-op otherwise)."""
    m = len(poly)
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        edge = q - p
        L2 = edge @ edge
        if L2 == 0.0:
            continue
        t = ((point - p) @ edge) / L2
        if tol < t < 1.0 - tol:
            off = point - (p + t * edge)
            if off @ off < (tol * math.sqrt(L2)) ** 2:
                return np.insert(poly, i + 1, point, axis=0)
    return poly


def fan_triangulate(poly: np.ndarray) -> list[np.ndarray]:
    """Triangulate a convex polygon by fanning from its area centroid."""
    c = polygon_centroid(poly)
    m = len(poly)
    return [np.array([c, poly[i], poly[(i + 1) % m]]) for i in range(m)]


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

# a Heaviside enrichment is dropped when the smaller side of the node's cut
# support falls below this fraction of the support area: the enriched
# function would be (numerically) dependent on the standard one and the
# stiffness would lose definiteness
MIN_SUPPORT_AREA_FRACTION = 1e-4


@dataclass(frozen=True)
class Chord:
    """Trace of a crack's line across one element, in parent coordinates."""

    p0: np.ndarray
    p1: np.ndarray
    crack: int = 0
    interior_points: tuple[np.ndarray, ...] = ()


@dataclass(frozen=True)
class CutGeometry:
    """Everything build_quadrature needs for one cut element."""

    chords: tuple[Chord, ...] = ()
    retained_polygon: np.ndarray | None = None


@dataclass(frozen=True)
class EnrichmentMap:
    """Per-node enrichment flags and per-element classification."""

    element_class: tuple[str, ...]
    cut_geometry: dict[int, CutGeometry]
    node_heaviside: dict[int, tuple[int, ...]]
    node_tip: dict[int, tuple[tuple[int, int], ...]]
    void_nodes: frozenset[int]
    cracks: tuple[CrackSpec, ...]
    cutouts: tuple[Cutout, ...]

    def class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.element_class:
            counts[c] = counts.get(c, 0) + 1
        return counts


def _clip_line_to_square(p: np.ndarray, d: np.ndarray) -> tuple[float, float] | None:
    """Parameter interval of the line p + t*d inside [-1,1]^2 (Liang-Barsky)."""
    t0, t1 = -math.inf, math.inf
    for k in range(2):
        if abs(d[k]) < 1e-300:
            if not -1.0 <= p[k] <= 1.0:
                return None
            continue
        ta = (-1.0 - p[k]) / d[k]
        tb = (1.0 - p[k]) / d[k]
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
    if t0 >= t1:
        return None
    return t0, t1


def _is_degenerate(mesh: StructuredMesh, cracks, cutouts) -> tuple[bool, list[bool]]:
    """Detect defects whose geometry touches nodes or grid lines exactly."""
    eps = 1e-12 * min(mesh.dx, mesh.dy)
    flags = []
    coords = mesh.coords
    for crack in cracks:
        bad = False
        t = crack.tangent
        n = crack.normal
        rel = coords - np.asarray(crack.center)
        sn = rel @ n
        st = rel @ t
        pad = 2.0 * max(mesh.dx, mesh.dy)
        near = (np.abs(sn) < eps) & (np.abs(st) <= 0.5 * crack.length + pad)
        if np.any(near):
            bad = True
        for tid in (0, 1):
            x, y = crack.tip(tid)
            if (abs(x / mesh.dx - round(x / mesh.dx)) * mesh.dx < eps
                    or abs(y / mesh.dy - round(y / mesh.dy)) * mesh.dy < eps):
                bad = True
        flags.append(bad)
    for cut in cutouts:
        phi = cut.level_set(coords[:, 0], coords[:, 1])
        flags.append(bool(np.any(np.abs(phi) < eps)))
    return any(flags), flags


def _perturb(defect, delta: float):
    shift = np.array([0.8, 0.6]) * delta
    new_center = (defect.center[0] + shift[0], defect.center[1] + shift[1])
    return replace(defect, center=new_center)


def classify(mesh: StructuredMesh, defects: DefectSet) -> EnrichmentMap:
    """Classify every element and assign nodal enrichment.

    Defects that graze a node or run exactly along a grid line are shifted
    by 1e-10 of the element size in a fixed direction before classification,
    so the result is deterministic.
    """
    errors = validate_defects(mesh.geometry, defects)
    if errors:
        raise ValueError("invalid defect set: " + "; ".join(errors))

    cracks = list(defects.cracks)
    cutouts = list(defects.cutouts)
    delta = 1e-10 * min(mesh.dx, mesh.dy)
    for _ in range(5):
        bad, flags = _is_degenerate(mesh, cracks, cutouts)
        if not bad:
            break
        nc = len(cracks)
        cracks = [_perturb(c, delta) if flags[i] else c for i, c in enumerate(cracks)]
        cutouts = [_perturb(c, delta) if flags[nc + i] else c
                   for i, c in enumerate(cutouts)]
        delta *= 2.0
    else:
        raise RuntimeError("could not resolve degenerate defect placement")

    ne = mesh.n_elements
    elem_class = [STANDARD] * ne
    chords: dict[int, list[Chord]] = {}
    retained: dict[int, np.ndarray] = {}
    node_h: dict[int, set[int]] = {}
    node_t: dict[int, set[tuple[int, int]]] = {}

    # cutouts: nodal level sets decide void / cut elements
    corner_phi: dict[int, list[np.ndarray]] = {}
    for cut in cutouts:
        phi = cut.level_set(mesh.coords[:, 0], mesh.coords[:, 1])
        for e in range(ne):
            nodes = mesh.connectivity[e]
            vals = phi[nodes]
            if np.all(vals < 0):
                elem_class[e] = VOID
            elif np.any(vals < 0):
                corner_phi.setdefault(e, []).append(vals)

    for e, philist in corner_phi.items():
        if elem_class[e] == VOID:
            continue
        poly = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
        for vals in philist:
            poly = _clip_by_bilinear(poly, vals)
            if len(poly) < 3:
                break
        if len(poly) < 3 or abs(polygon_area(poly)) < DEGENERATE_AREA_FRACTION * 4.0:
            elem_class[e] = VOID
        else:
            elem_class[e] = CUT_BY_CUTOUT
            retained[e] = poly

    # cracks: split / tip elements and nodal flags
    for ic, crack in enumerate(cracks):
        p0, p1 = crack.tip(0), crack.tip(1)
        lo = np.minimum(p0, p1)
        hi = np.maximum(p0, p1)
        i0 = max(int(lo[0] / mesh.dx) - 1, 0)
        i1 = min(int(hi[0] / mesh.dx) + 1, mesh.nx - 1)
        j0 = max(int(lo[1] / mesh.dy) - 1, 0)
        j1 = min(int(hi[1] / mesh.dy) + 1, mesh.ny - 1)
        seg_dir = p1 - p0
        for j in range(j0, j1 + 1):
            for i in range(i0, i1 + 1):
                e = mesh.element_id(i, j)
                pp0 = mesh.to_parent(e, p0[None, :])[0]
                pp1 = mesh.to_parent(e, p1[None, :])[0]
                dpar = pp1 - pp0
                span = _clip_line_to_square(pp0, dpar)
                if span is None:
                    continue
                t0, t1 = span
                # does the actual segment overlap this element?
                s0, s1 = max(t0, 0.0), min(t1, 1.0)
                if s1 - s0 <= 1e-12:
                    continue
                tips_inside = tuple(
                    tid for tid in (0, 1)
                    if np.all(np.abs(mesh.to_parent(e, crack.tip(tid)[None, :])[0]) < 1.0))
                if elem_class[e] == VOID:
                    continue
                interior = tuple(mesh.to_parent(e, crack.tip(tid)[None, :])[0]
                                 for tid in tips_inside)
                chords.setdefault(e, []).append(
                    Chord(p0=pp0 + t0 * dpar, p1=pp0 + t1 * dpar, crack=ic,
                          interior_points=interior))
                if tips_inside:
                    if elem_class[e] not in (TIP,):
                        elem_class[e] = TIP
                    for node in mesh.connectivity[e]:
                        for tid in tips_inside:
                            node_t.setdefault(int(node), set()).add((ic, tid))
                else:
                    if elem_class[e] not in (TIP,):
                        elem_class[e] = SPLIT
                    for node in mesh.connectivity[e]:
                        node_h.setdefault(int(node), set()).add(ic)

    # tip enrichment overrides Heaviside for the same crack
    for node, tips in node_t.items():
        tip_cracks = {ic for ic, _ in tips}
        if node in node_h:
            node_h[node] -= tip_cracks
            if not node_h[node]:
                del node_h[node]

    # nodes with fully void support are needed before the area filter
    adjacency: dict[int, list[int]] = {}
    for e in range(ne):
        for n in mesh.connectivity[e]:
            adjacency.setdefault(int(n), []).append(e)

    _filter_heaviside_by_support(mesh, cracks, elem_class, chords, retained,
                                 node_h, adjacency)

    # blending classes for uncut elements touching enriched nodes
    for e in range(ne):
        if elem_class[e] != STANDARD:
            continue
        nodes = mesh.connectivity[e]
        has_h = any(int(n) in node_h for n in nodes)
        has_t = any(int(n) in node_t for n in nodes)
        if has_h and has_t:
            elem_class[e] = SPLIT_TIP_BLEND
        elif has_t:
            elem_class[e] = TIP_BLEND
        elif has_h:
            elem_class[e] = SPLIT_BLEND

    # nodes with fully void support carry no active DOFs
    void_nodes = frozenset(n for n, elems in adjacency.items()
                           if all(elem_class[e] == VOID for e in elems))

    cut_geometry = {}
    for e in set(chords) | set(retained):
        cut_geometry[e] = CutGeometry(
            chords=tuple(chords.get(e, ())),
            retained_polygon=retained.get(e))

    return EnrichmentMap(
        element_class=tuple(elem_class),
        cut_geometry=cut_geometry,
        node_heaviside={n: tuple(sorted(s)) for n, s in sorted(node_h.items())},
        node_tip={n: tuple(sorted(s)) for n, s in sorted(node_t.items())},
        void_nodes=void_nodes,
        cracks=tuple(cracks),
        cutouts=tuple(cutouts),
    )


def _filter_heaviside_by_support(mesh: StructuredMesh, cracks,
                                 elem_class: list[str],
                                 chords: dict[int, list[Chord]],
                                 retained: dict[int, np.ndarray],
                                 node_h: dict[int, set[int]],
                                 adjacency: dict[int, list[int]]) -> None:
    """Drop jump enrichment where one side of the cut support (nearly)
    vanishes; the enriched function would duplicate the standard one."""

    def to_physical(e: int, pt: np.ndarray) -> np.ndarray:
        x0, y0, x1, y1 = mesh.element_box(e)
        return np.array([0.5 * (x0 + x1) + 0.5 * pt[0] * (x1 - x0),
                         0.5 * (y0 + y1) + 0.5 * pt[1] * (y1 - y0)])

    for node in list(node_h):
        for ic in list(node_h[node]):
            crack = cracks[ic]
            area_pos = area_neg = 0.0
            for e in adjacency[node]:
                if elem_class[e] == VOID:
                    continue
                base = retained.get(e)
                polys = [base if base is not None else _FULL_SQUARE]
                chord = next((c for c in chords.get(e, ()) if c.crack == ic), None)
                if chord is not None:
                    pieces = []
                    for poly in polys:
                        pieces.extend(split_polygon_by_line(
                            poly, chord.p0, chord.p1 - chord.p0))
                    polys = pieces
                for poly in polys:
                    area = abs(polygon_area(poly))
                    center = to_physical(e, polygon_centroid(poly))
                    if heaviside(center, crack) > 0:
                        area_pos += area
                    else:
                        area_neg += area
            total = area_pos + area_neg
            if total == 0.0 or min(area_pos, area_neg) / total < MIN_SUPPORT_AREA_FRACTION:
                node_h[node].discard(ic)
                if not node_h[node]:
                    del node_h[node]


def _clip_by_bilinear(poly: np.ndarray, corner_vals: np.ndarray) -> np.ndarray:
    """Keep the material side of a level set given at the element corners.

    The level set is interpolated bilinearly at polygon vertices and
    linearly along polygon edges, which reproduces edge-wise linear
    interpolation of the zero curve.
    """
    def phi(pt):
        xi, eta = pt
        n = 0.25 * np.array([(1 - xi) * (1 - eta), (1 + xi) * (1 - eta),
                             (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)])
        return float(n @ corner_vals)

    values = np.array([phi(p) for p in poly])
    return _clip_half_plane(poly, values)


# ---------------------------------------------------------------------------
# quadrature plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraturePlan:
    """Parent-coordinate integration points for one element.

    Weights are in parent measure: a plain plan's weights sum to 4 and a
    subcell plan's weighted sum reproduces the retained parent area.
    """

    points: np.ndarray   # (m, 2)
    weights: np.ndarray  # (m,)
    provenance: str      # "plain" | "subcells"
    n_triangles: int = 0


def _plain_plan(rule) -> QuadraturePlan:
    pts, wts = rule
    return QuadraturePlan(points=pts.copy(), weights=wts.copy(), provenance="plain")


def _subcell_plan(polygons: list[np.ndarray], points_per_triangle: int) -> QuadraturePlan:
    rule_pts, rule_wts = _TRI_RULES[points_per_triangle]
    pts, wts = [], []
    n_tri = 0
    for poly in polygons:
        for tri in fan_triangulate(poly):
            area = polygon_area(tri)
            if abs(area) < DEGENERATE_AREA_FRACTION * 4.0:
                log.warning("dropping degenerate subcell triangle (area %.3e)", area)
                continue
            n_tri += 1
            a, b, c = tri
            mapped = a[None, :] + np.outer(rule_pts[:, 0], b - a) + np.outer(rule_pts[:, 1], c - a)
            pts.append(mapped)
            wts.append(rule_wts * (abs(area) / 0.5))
    if not pts:
        return QuadraturePlan(points=np.empty((0, 2)), weights=np.empty(0),
                              provenance="subcells", n_triangles=0)
    return QuadraturePlan(points=np.vstack(pts), weights=np.concatenate(wts),
                          provenance="subcells", n_triangles=n_tri)


_FULL_SQUARE = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def build_quadrature(element_class: str,
                     cut: CutGeometry | None = None) -> QuadraturePlan:
    """Integration plan for one element according to its classification."""
    if element_class == VOID:
        return QuadraturePlan(points=np.empty((0, 2)), weights=np.empty(0),
                              provenance="subcells", n_triangles=0)
    if element_class in (STANDARD, SPLIT_BLEND):
        return _plain_plan(GAUSS_2X2)
    if element_class == TIP_BLEND:
        return _plain_plan(GAUSS_4X4)
    if element_class == SPLIT_TIP_BLEND:
        return _subcell_plan([_FULL_SQUARE], POINTS_PER_TRIANGLE[SPLIT_TIP_BLEND])
    if element_class not in (SPLIT, TIP, CUT_BY_CUTOUT):
        raise ValueError(f"unknown element class {element_class!r}")

    if cut is None:
        raise ValueError(f"{element_class} element requires cut geometry")
    polys = [cut.retained_polygon if cut.retained_polygon is not None else _FULL_SQUARE]
    for chord in cut.chords:
        direction = chord.p1 - chord.p0
        new_polys: list[np.ndarray] = []
        for poly in polys:
            new_polys.extend(split_polygon_by_line(poly, chord.p0, direction))
        for k, poly in enumerate(new_polys):
            for p in chord.interior_points:
                poly = insert_vertex(poly, np.asarray(p))
            new_polys[k] = poly
        polys = new_polys
    return _subcell_plan(polys, POINTS_PER_TRIANGLE[element_class])


def build_all_quadrature(mesh: StructuredMesh,
                         enrichment: EnrichmentMap) -> list[QuadraturePlan]:
    """Quadrature plans for every element, in element order."""
    return [build_quadrature(enrichment.element_class[e],
                             enrichment.cut_geometry.get(e))
            for e in range(mesh.n_elements)]
