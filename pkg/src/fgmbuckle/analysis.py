"""Complete load cases: mechanical uniaxial/biaxial and thermal buckling,
plus parametric sweeps.

Mechanical cases apply a unit uniform compressive reference resultant; the
critical factor multiplies it. Thermal cases hold the metal surface a fixed
rise above reference and treat the ceramic-over-metal surface difference as
the eigenvariable; the resultants of the fixed part stay on the stiffness
side of the pencil unless strict_reference is set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import assembly, eigensolve, materials
from .config import RunConfig, config_to_dict, sweep_points, apply_sweep_point
from .geometry import DefectSet, classify, build_all_quadrature, generate_mesh
from .materials import FgmDefinition, TemperatureProfile

UNIAXIAL_PATTERN = np.array([-1.0, 0.0, 0.0])
BIAXIAL_PATTERN = np.array([-1.0, -1.0, 0.0])


@dataclass(frozen=True)
class AnalysisResult:
    """One solved case: raw critical factor plus its normalized value."""

    kind: str
    raw: float
    normalized: float
    residual: float
    n_dofs: int
    n_nodes: int
    n_elements: int
    class_counts: dict[str, int]
    config_echo: dict[str, Any]
    sweep_point: dict[str, float] = field(default_factory=dict)
    mode_w0: np.ndarray | None = None

    @property
    def label(self) -> str:
        return {"uniaxial": "lambda_uni", "biaxial": "lambda_bi",
                "thermal": "delta_t_cr"}[self.kind]


@dataclass(frozen=True)
class SweepFailure:
    sweep_point: dict[str, float]
    message: str


@dataclass(frozen=True)
class Model:
    """Assembled, constrained operators for one configuration."""

    mesh: Any
    enrichment: Any
    fgm: FgmDefinition
    dof_map: assembly.DofMap
    free: np.ndarray
    k_free: Any
    kg_free: list[Any]  # one per resultant pattern requested


def build_model(config: RunConfig,
                resultant_patterns: tuple[np.ndarray, ...]) -> Model:
    """Mesh, classify, integrate and assemble one configuration."""
    mesh = generate_mesh(config.plate, config.mesh.nx, config.mesh.ny)
    enrichment = classify(mesh, config.defects)
    plans = build_all_quadrature(mesh, enrichment)
    fgm = FgmDefinition(ceramic=config.material.ceramic,
                        metal=config.material.metal,
                        gradient_index=config.material.gradient_index,
                        thickness=config.plate.h)
    u = math.sqrt(config.material.shear_correction)
    constitutive = materials.integrate_constitutive(fgm, shear_correction=(u, u))
    k, kgs, dof_map = assembly.assemble_system(
        mesh, enrichment, plans, constitutive, config.plate.h, resultant_patterns)
    constrained = assembly.constrained_indices(mesh, enrichment, dof_map,
                                               config.boundary)
    free = assembly.free_indices(dof_map.n_dofs, constrained)
    k_free = assembly.reduce_matrix(k, free)
    kg_free = [assembly.reduce_matrix(kg, free) for kg in kgs]
    return Model(mesh=mesh, enrichment=enrichment, fgm=fgm, dof_map=dof_map,
                 free=free, k_free=k_free, kg_free=kg_free)


def ceramic_flexural_rigidity(config: RunConfig) -> float:
    e_c = config.material.ceramic.youngs_modulus
    nu_c = config.material.ceramic.poisson_ratio
    return e_c * config.plate.h ** 3 / (12.0 * (1.0 - nu_c ** 2))


def _expand_mode_w0(model: Model, mode: np.ndarray) -> np.ndarray:
    full = np.zeros(model.dof_map.n_dofs)
    full[model.free] = mode
    w_idx = model.dof_map.standard[:, 2]
    w0 = np.where(w_idx >= 0, full[np.clip(w_idx, 0, None)], 0.0)
    return w0


def _result(config: RunConfig, model: Model, kind: str, raw: float,
            normalized: float, sol: eigensolve.BucklingSolution,
            keep_mode: bool) -> AnalysisResult:
    return AnalysisResult(
        kind=kind, raw=raw, normalized=normalized, residual=sol.residual,
        n_dofs=len(model.free), n_nodes=model.mesh.n_nodes,
        n_elements=model.mesh.n_elements,
        class_counts=model.enrichment.class_counts(),
        config_echo=config_to_dict(config),
        mode_w0=_expand_mode_w0(model, sol.mode) if keep_mode else None)


def run_mechanical(config: RunConfig, keep_mode: bool = False,
                   method: str = "auto") -> AnalysisResult:
    """Critical multiplier of the unit compressive reference resultants,
    normalized to lambda = N_cr b^2 / (pi^2 D_c)."""
    kind = config.load.kind
    pattern = UNIAXIAL_PATTERN if kind == "uniaxial" else BIAXIAL_PATTERN
    model = build_model(config, (pattern,))
    sol = eigensolve.smallest_positive_factor(model.k_free, model.kg_free[0],
                                              method=method)
    d_c = ceramic_flexural_rigidity(config)
    normalized = sol.factor * config.plate.b ** 2 / (math.pi ** 2 * d_c)
    return _result(config, model, kind, sol.factor, normalized, sol, keep_mode)


def run_thermal(config: RunConfig, keep_mode: bool = False,
                method: str = "auto") -> AnalysisResult:
    """Critical ceramic-over-metal surface temperature difference (degC).

    The in-plane resultants are split into a constant part from the fixed
    metal-surface rise and a part proportional to the surface difference via
    the through-thickness profile shape; the constant part loads the
    stiffness side of the eigenproblem.
    """
    load = config.load
    model = build_model(config, (BIAXIAL_PATTERN,))
    kg_unit = model.kg_free[0]

    rise = load.metal_surface_rise - load.reference_temp
    const_part = materials.resultants_for_delta_t(model.fgm, lambda z: rise)
    s_const = const_part.membrane[0]

    def eta_rise(z: float) -> float:
        zeta = (2.0 * z + model.fgm.thickness) / (2.0 * model.fgm.thickness)
        return materials.temperature_shape(zeta, model.fgm, load.profile)

    eta_part = materials.resultants_for_delta_t(model.fgm, eta_rise)
    s_eta = eta_part.membrane[0]
    if s_eta <= 0:
        raise eigensolve.NoBucklingError("temperature profile produces no "
                                         "compressive resultant")

    k_left = model.k_free if load.strict_reference else model.k_free + s_const * kg_unit
    sol = eigensolve.smallest_positive_factor(k_left, s_eta * kg_unit,
                                              method=method)
    return _result(config, model, "thermal", sol.factor, sol.factor, sol, keep_mode)


def run(config: RunConfig, keep_mode: bool = False,
        method: str = "auto") -> AnalysisResult:
    """Dispatch a single analysis according to the configured load case."""
    if config.load.kind in ("uniaxial", "biaxial"):
        return run_mechanical(config, keep_mode=keep_mode, method=method)
    return run_thermal(config, keep_mode=keep_mode, method=method)


def sweep(config: RunConfig, keep_mode: bool = False,
          method: str = "auto") -> list[AnalysisResult | SweepFailure]:
    """Run every grid point; a failing point is recorded, not fatal."""
    if config.sweep is None:
        raise ValueError("configuration has no sweep block")
    records: list[AnalysisResult | SweepFailure] = []
    for point in sweep_points(config.sweep):
        try:
            patched = apply_sweep_point(config, point)
            result = run(patched, keep_mode=keep_mode, method=method)
            records.append(replace(result, sweep_point=dict(point)))
        except Exception as exc:  # noqa: BLE001 - per-point isolation is the contract
            records.append(SweepFailure(sweep_point=dict(point), message=str(exc)))
    return records
