"""Result emission: CSV records, legacy-ASCII VTK mode shapes, debug dumps."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .analysis import AnalysisResult, SweepFailure
from .geometry import EnrichmentMap, StructuredMesh

_CLASS_ORDER = ("standard", "split", "tip", "tip-blending", "split-blending",
                "split-tip-blending", "cut-by-cutout", "void")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _config_scalars(echo: dict) -> dict[str, object]:
    """Flatten the scalar configuration entries for one CSV row."""
    out: dict[str, object] = {}
    plate = echo["plate"]
    out.update({"a": plate["a"], "b": plate["b"], "h": plate["h"]})
    mat = echo["material"]
    out["gradient_index"] = mat["gradient_index"]
    out["shear_correction"] = mat["shear_correction"]
    out["E_ceramic"] = mat["ceramic"]["youngs_modulus"]
    out["E_metal"] = mat["metal"]["youngs_modulus"]
    out["nx"] = echo["mesh"]["nx"]
    out["ny"] = echo["mesh"]["ny"]
    out["boundary"] = echo["boundary"]
    out["load_kind"] = echo["load"]["kind"]
    out["profile"] = echo["load"]["profile"]
    out["n_cracks"] = sum(1 for d in echo["defects"] if d["type"] == "crack")
    out["n_cutouts"] = sum(1 for d in echo["defects"] if d["type"] != "crack")
    return out


def results_to_csv(records: list[AnalysisResult | SweepFailure], path: str | Path) -> None:
    """One row per analysis; failed sweep points get a status column entry."""
    if not records:
        raise ValueError("no results to write")
    results = [r for r in records if isinstance(r, AnalysisResult)]
    sweep_names = sorted({name for r in records for name in r.sweep_point})

    header = ["status", *sweep_names, "a", "b", "h", "gradient_index",
              "shear_correction", "E_ceramic", "E_metal", "nx", "ny", "boundary",
              "load_kind", "profile", "n_cracks", "n_cutouts",
              "n_dofs", "raw", "normalized", "residual", "message"]
    lines = [",".join(header)]
    for rec in records:
        row: dict[str, object] = {name: rec.sweep_point.get(name, "") for name in sweep_names}
        if isinstance(rec, AnalysisResult):
            row["status"] = "ok"
            row.update(_config_scalars(rec.config_echo))
            row.update({"n_dofs": rec.n_dofs, "raw": rec.raw,
                        "normalized": rec.normalized, "residual": rec.residual,
                        "message": ""})
        else:
            row["status"] = "failed"
            row["message"] = rec.message.replace(",", ";").replace("\n", " ")
        lines.append(",".join(_fmt(row.get(col, "")) for col in header))
    Path(path).write_text("\n".join(lines) + "\n")


def write_vtk_mode(path: str | Path, mesh: StructuredMesh, w0: np.ndarray,
                   title: str = "buckling mode") -> None:
    """Legacy-ASCII VTK unstructured grid with the nodal deflection field."""
    lines = ["# vtk DataFile Version 2.0", title, "ASCII",
             "DATASET UNSTRUCTURED_GRID",
             f"POINTS {mesh.n_nodes} double"]
    for x, y in mesh.coords:
        lines.append(f"{x:.9g} {y:.9g} 0")
    lines.append(f"CELLS {mesh.n_elements} {5 * mesh.n_elements}")
    for conn in mesh.connectivity:
        lines.append("4 " + " ".join(str(int(n)) for n in conn))
    lines.append(f"CELL_TYPES {mesh.n_elements}")
    lines.extend(["9"] * mesh.n_elements)
    lines.append(f"POINT_DATA {mesh.n_nodes}")
    lines.append("SCALARS w0 double 1")
    lines.append("LOOKUP_TABLE default")
    for v in w0:
        lines.append(f"{v:.9g}")
    Path(path).write_text("\n".join(lines) + "\n")


def dump_mesh_csv(path: str | Path, mesh: StructuredMesh,
                  enrichment: EnrichmentMap) -> None:
    """Per-element classification for inspection."""
    lines = ["element,i,j,class"]
    for e in range(mesh.n_elements):
        i, j = e % mesh.nx, e // mesh.nx
        lines.append(f"{e},{i},{j},{enrichment.element_class[e]}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_matrix(path: str | Path, matrix) -> None:
    """Dense row-major text dump for debugging."""
    import scipy.sparse as sp

    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    np.savetxt(path, dense, fmt="%.17g")
