"""Buckling of functionally graded Mindlin plates with mesh-independent
cracks and cutouts."""

from .analysis import AnalysisResult, run, run_mechanical, run_thermal, sweep
from .config import RunConfig, parse_config, validate_config
from .eigensolve import BucklingSolution, NoBucklingError, smallest_positive_factor
from .geometry import (CircleCutout, CrackSpec, DefectSet, EllipseCutout,
                       PlateGeometry, classify, generate_mesh)
from .materials import (ALUMINUM, ZIRCONIA, FgmDefinition, PhaseProperties,
                        TemperatureProfile, integrate_constitutive,
                        thermal_resultants)

__version__ = "0.1.0"

__all__ = [
    "ALUMINUM", "ZIRCONIA", "AnalysisResult", "BucklingSolution",
    "CircleCutout", "CrackSpec", "DefectSet", "EllipseCutout",
    "FgmDefinition", "NoBucklingError", "PhaseProperties", "PlateGeometry",
    "RunConfig", "TemperatureProfile", "classify", "generate_mesh",
    "integrate_constitutive", "parse_config", "run", "run_mechanical",
    "run_thermal", "smallest_positive_factor", "sweep", "thermal_resultants",
    "validate_config",
]
