"""Global DOF numbering, matrix assembly and essential boundary conditions.

Standard DOFs are numbered first (node-major, five per node, skipping nodes
whose support lies entirely inside a cutout), then jump-enrichment blocks,
then near-tip blocks. Constraints are applied by row/column elimination so
the buckling eigenvalues stay unpolluted.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import element as el
from .geometry import STANDARD, VOID, EnrichmentMap, PlateGeometry, QuadraturePlan, StructuredMesh
from .materials import ConstitutiveSet

# component offsets inside a tip block: five near-tip functions for each of
# u, v, w then four for each rotation
_TIP_COMPONENT_SLICES = {0: (0, 5), 1: (5, 10), 2: (10, 15), 3: (15, 19), 4: (19, 23)}


@dataclass(frozen=True)
class DofMap:
    """Dense, gap-free global numbering of standard and enriched DOFs."""

    n_dofs: int
    standard: np.ndarray  # (n_nodes, 5) int, -1 where inactive
    heaviside: dict[tuple[int, int], int]       # (node, crack) -> block base
    tip: dict[tuple[int, int, int], int]        # (node, crack, tip) -> block base


def number_dofs(mesh: StructuredMesh, enrichment: EnrichmentMap) -> DofMap:
    """Assign global indices: standard first, then Heaviside, then tip blocks."""
    standard = np.full((mesh.n_nodes, 5), -1, dtype=int)
    idx = 0
    for node in range(mesh.n_nodes):
        if node in enrichment.void_nodes:
            continue
        standard[node] = np.arange(idx, idx + 5)
        idx += 5
    hmap: dict[tuple[int, int], int] = {}
    for node in sorted(enrichment.node_heaviside):
        for crack in enrichment.node_heaviside[node]:
            hmap[(node, crack)] = idx
            idx += el.H_DOFS
    tmap: dict[tuple[int, int, int], int] = {}
    for node in sorted(enrichment.node_tip):
        for crack, tip in enrichment.node_tip[node]:
            tmap[(node, crack, tip)] = idx
            idx += el.TIP_DOFS
    return DofMap(n_dofs=idx, standard=standard, heaviside=hmap, tip=tmap)


def element_dofs(mesh: StructuredMesh, enrichment: EnrichmentMap,
                 dof_map: DofMap, e: int) -> tuple[np.ndarray, el.ElementContext]:
    """Global DOF indices and enrichment context of one element.

    The index order matches the element's local ordering: 20 standard DOFs,
    then Heaviside blocks by (local node, crack), then tip blocks by
    (local node, crack, tip).
    """
    nodes = mesh.connectivity[e]
    gdofs = [dof_map.standard[n] for n in nodes]
    h_entries = []
    tip_entries = []
    for j, node in enumerate(nodes):
        for crack in enrichment.node_heaviside.get(int(node), ()):
            h_entries.append((j, crack))
            base = dof_map.heaviside[(int(node), crack)]
            gdofs.append(np.arange(base, base + el.H_DOFS))
    for j, node in enumerate(nodes):
        for crack, tip in enrichment.node_tip.get(int(node), ()):
            tip_entries.append((j, crack, tip))
            base = dof_map.tip[(int(node), crack, tip)]
            gdofs.append(np.arange(base, base + el.TIP_DOFS))
    ctx = el.ElementContext(coords=mesh.coords[nodes].astype(float),
                            cracks=enrichment.cracks,
                            h_entries=tuple(h_entries),
                            tip_entries=tuple(tip_entries))
    return np.concatenate(gdofs), ctx


def assemble_system(mesh: StructuredMesh, enrichment: EnrichmentMap,
                    plans: list[QuadraturePlan], constitutive: ConstitutiveSet,
                    thickness: float,
                    resultant_patterns: tuple[np.ndarray, ...] = (),
                    ) -> tuple[sp.csr_matrix, list[sp.csr_matrix], DofMap]:
    """Assemble the global stiffness and one geometric stiffness per pattern.

    Elements are visited in ascending order and scattered with a fixed
    summation tree, so results are reproducible run to run. Identical
    unenriched elements share a single computed matrix.
    """
    dof_map = number_dofs(mesh, enrichment)
    rows, cols = [], []
    kvals = [[] for _ in range(1 + len(resultant_patterns))]
    standard_cache = None

    for e in range(mesh.n_elements):
        if enrichment.element_class[e] == VOID:
            continue
        gdofs, ctx = element_dofs(mesh, enrichment, dof_map, e)
        if gdofs.min() < 0:
            raise RuntimeError(f"element {e} references an inactive DOF")
        plain_standard = (enrichment.element_class[e] == STANDARD
                          and not ctx.h_entries and not ctx.tip_entries)
        if plain_standard and standard_cache is not None:
            ke, kgs = standard_cache
        else:
            ke, kgs = el.element_matrices(ctx, constitutive, plans[e], thickness,
                                          resultant_patterns)
            if plain_standard:
                standard_cache = (ke, kgs)
        ii, jj = np.meshgrid(gdofs, gdofs, indexing="ij")
        rows.append(ii.ravel())
        cols.append(jj.ravel())
        kvals[0].append(ke.ravel())
        for k, kg in enumerate(kgs):
            kvals[k + 1].append(kg.ravel())

    n = dof_map.n_dofs
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    mats = []
    for vals in kvals:
        m = sp.coo_matrix((np.concatenate(vals), (rows, cols)), shape=(n, n)).tocsr()
        m.sum_duplicates()
        mats.append(m)
    return mats[0], mats[1:], dof_map


_SSSS_X = (0, 2, 4)  # u0, w0, by on x = 0, a
_SSSS_Y = (1, 2, 3)  # v0, w0, bx on y = 0, b
_ALL = (0, 1, 2, 3, 4)


def constrained_indices(mesh: StructuredMesh, enrichment: EnrichmentMap,
                        dof_map: DofMap, condition: str) -> np.ndarray:
    """Global indices eliminated by the boundary condition.

    Enriched DOFs of a constrained node are constrained for the same field
    components as the standard ones.
    """
    if condition not in ("SSSS", "CCCC"):
        raise ValueError(f"boundary condition must be SSSS or CCCC, got {condition!r}")
    geo: PlateGeometry = mesh.geometry
    tol = 1e-9 * min(geo.a, geo.b)
    fixed: set[int] = set()
    for node in range(mesh.n_nodes):
        if dof_map.standard[node, 0] < 0:
            continue
        x, y = mesh.coords[node]
        on_x = x < tol or abs(x - geo.a) < tol
        on_y = y < tol or abs(y - geo.b) < tol
        if not (on_x or on_y):
            continue
        if condition == "CCCC":
            comps = set(_ALL)
        else:
            comps = set()
            if on_x:
                comps.update(_SSSS_X)
            if on_y:
                comps.update(_SSSS_Y)
        for c in comps:
            fixed.add(int(dof_map.standard[node, c]))
        for (n_, crack), base in dof_map.heaviside.items():
            if n_ == node:
                for c in comps:
                    fixed.add(base + c)
        for (n_, crack, tip), base in dof_map.tip.items():
            if n_ == node:
                for c in comps:
                    lo, hi = _TIP_COMPONENT_SLICES[c]
                    fixed.update(range(base + lo, base + hi))
    return np.array(sorted(fixed), dtype=int)


def free_indices(n_dofs: int, constrained: np.ndarray) -> np.ndarray:
    return np.setdiff1d(np.arange(n_dofs), constrained)


def reduce_matrix(m: sp.csr_matrix, free: np.ndarray) -> sp.csr_matrix:
    """Row/column elimination of constrained DOFs."""
    return m[free][:, free].tocsr()
