"""Through-thickness material laws for two-phase ceramic/metal graded plates.

The plate is ceramic at the top surface (z = +h/2) and metal at the bottom
(z = -h/2), mixed by a power-law volume fraction. Pointwise effective
properties come from the Mori-Tanaka scheme; the steady-state temperature
profile from a six-term series solution of the 1D heat equation; and the
plate constitutive matrices from Gauss-Legendre integration through the
thickness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT_5_6 = math.sqrt(5.0 / 6.0)
DEFAULT_THICKNESS_POINTS = 20


@dataclass(frozen=True)
class PhaseProperties:
    """Isotropic properties of one constituent phase (SI units)."""

    youngs_modulus: float      # Pa
    poisson_ratio: float
    thermal_expansion: float   # 1/degC
    conductivity: float        # W/(m K)
    density: float             # kg/m^3

    def __post_init__(self):
        if self.youngs_modulus <= 0:
            raise ValueError("youngs_modulus must be positive")
        if not 0 < self.poisson_ratio < 0.5:
            raise ValueError("poisson_ratio must lie in (0, 0.5)")
        if self.thermal_expansion <= 0:
            raise ValueError("thermal_expansion must be positive")
        if self.conductivity <= 0:
            raise ValueError("conductivity must be positive")
        if self.density <= 0:
            raise ValueError("density must be positive")

    @property
    def bulk_modulus(self) -> float:
        return self.youngs_modulus / (3.0 * (1.0 - 2.0 * self.poisson_ratio))

    @property
    def shear_modulus(self) -> float:
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))


# Built-in aluminum / zirconia pair (densities are standard handbook values;
# density is carried for completeness only, the buckling analysis never uses it)
ALUMINUM = PhaseProperties(youngs_modulus=70e9, poisson_ratio=0.3,
                           thermal_expansion=23e-6, conductivity=204.0,
                           density=2707.0)
ZIRCONIA = PhaseProperties(youngs_modulus=151e9, poisson_ratio=0.3,
                           thermal_expansion=10e-6, conductivity=2.09,
                           density=3000.0)

BUILTIN_PAIRS = {
    "Al/ZrO2": (ZIRCONIA, ALUMINUM),
}


def material_pair(name: str) -> tuple[PhaseProperties, PhaseProperties]:
    """Return (ceramic, metal) for a named built-in pair."""
    try:
        return BUILTIN_PAIRS[name]
    except KeyError:
        raise ValueError(f"unknown material pair {name!r}; "
                         f"available: {sorted(BUILTIN_PAIRS)}") from None


@dataclass(frozen=True)
class FgmDefinition:
    """Graded plate section: ceramic on top, metal on bottom.

    gradient_index is the exponent of the power-law ceramic volume fraction;
    0 gives a homogeneous ceramic plate.
    """

    ceramic: PhaseProperties
    metal: PhaseProperties
    gradient_index: float
    thickness: float

    def __post_init__(self):
        if self.gradient_index < 0:
            raise ValueError("gradient_index must be >= 0")
        if self.thickness <= 0:
            raise ValueError("thickness must be positive")


@dataclass(frozen=True)
class EffectivePointProperties:
    """Effective isotropic properties at one through-thickness position."""

    bulk_modulus: float
    shear_modulus: float
    youngs_modulus: float
    poisson_ratio: float
    expansion: float
    conductivity: float
    density: float


def _check_z(z: float, fgm: FgmDefinition) -> None:
    half = 0.5 * fgm.thickness
    if z < -half or z > half:
        raise ValueError(f"z = {z} outside the section [-h/2, h/2] "
                         f"with h = {fgm.thickness}")


def volume_fraction(z: float, fgm: FgmDefinition) -> float:
    """Ceramic volume fraction ((2z + h)/(2h))^n at height z."""
    _check_z(z, fgm)
    h = fgm.thickness
    zeta = (2.0 * z + h) / (2.0 * h)
    if fgm.gradient_index == 0.0:
        return 1.0
    return zeta ** fgm.gradient_index


def mori_tanaka_moduli(vc: float, ceramic: PhaseProperties,
                       metal: PhaseProperties) -> tuple[float, float]:
    """Effective bulk and shear moduli of the mixture at ceramic fraction vc.

    Uses the Mori-Tanaka estimate with the metal as the matrix phase.
    """
    if not 0.0 <= vc <= 1.0:
        raise ValueError(f"volume fraction {vc} outside [0, 1]")
    kc, gc = ceramic.bulk_modulus, ceramic.shear_modulus
    km, gm = metal.bulk_modulus, metal.shear_modulus
    f1 = gm * (9.0 * km + 8.0 * gm) / (6.0 * (km + 2.0 * gm))
    k = km + (kc - km) * vc / (1.0 + (1.0 - vc) * 3.0 * (kc - km) / (3.0 * km + 4.0 * gm))
    g = gm + (gc - gm) * vc / (1.0 + (1.0 - vc) * (gc - gm) / (gm + f1))
    return k, g


def effective_elastic(k: float, g: float) -> tuple[float, float]:
    """Young's modulus and Poisson's ratio from bulk and shear moduli."""
    if k <= 0 or g <= 0:
        raise ValueError("bulk and shear moduli must be positive")
    e = 9.0 * k * g / (3.0 * k + g)
    nu = (3.0 * k - 2.0 * g) / (2.0 * (3.0 * k + g))
    return e, nu


def effective_thermal(vc: float, ceramic: PhaseProperties,
                      metal: PhaseProperties, k_eff: float) -> tuple[float, float]:
    """Effective conductivity and expansion coefficient at ceramic fraction vc.

    The conductivity follows its own Mori-Tanaka-type ratio equation; the
    expansion coefficient interpolates in the bulk compliance 1/K.
    """
    if not 0.0 <= vc <= 1.0:
        raise ValueError(f"volume fraction {vc} outside [0, 1]")
    kap_c, kap_m = ceramic.conductivity, metal.conductivity
    vm = 1.0 - vc
    kappa = kap_m + (kap_c - kap_m) * vc / (1.0 + vm * (kap_c - kap_m) / (3.0 * kap_m))
    km, kc = metal.bulk_modulus, ceramic.bulk_modulus
    alpha = metal.thermal_expansion + (
        (ceramic.thermal_expansion - metal.thermal_expansion)
        * (1.0 / k_eff - 1.0 / km) / (1.0 / kc - 1.0 / km))
    return kappa, alpha


def point_properties(z: float, fgm: FgmDefinition) -> EffectivePointProperties:
    """All effective properties at height z in one call."""
    vc = volume_fraction(z, fgm)
    k, g = mori_tanaka_moduli(vc, fgm.ceramic, fgm.metal)
    e, nu = effective_elastic(k, g)
    kappa, alpha = effective_thermal(vc, fgm.ceramic, fgm.metal, k)
    rho = fgm.ceramic.density * vc + fgm.metal.density * (1.0 - vc)
    return EffectivePointProperties(bulk_modulus=k, shear_modulus=g,
                                    youngs_modulus=e, poisson_ratio=nu,
                                    expansion=alpha, conductivity=kappa,
                                    density=rho)


@dataclass(frozen=True)
class TemperatureProfile:
    """Surface temperatures and through-thickness distribution kind.

    metal_surface_temp applies at z = -h/2, ceramic_surface_temp at z = +h/2.
    'nonlinear' evaluates the series solution of the steady heat equation;
    'linear' truncates it to the linear ramp.
    """

    metal_surface_temp: float
    ceramic_surface_temp: float
    reference_temp: float = 0.0
    kind: str = "nonlinear"

    def __post_init__(self):
        if self.kind not in ("linear", "nonlinear"):
            raise ValueError(f"profile kind must be 'linear' or 'nonlinear', got {self.kind!r}")


def temperature_shape(zeta: float, fgm: FgmDefinition, kind: str) -> float:
    """Normalized profile eta(zeta): 0 at the metal face, 1 at the ceramic face.

    zeta = (2z + h)/(2h). The nonlinear shape is the six-term series solution
    of d/dz(kappa(z) dT/dz) = 0 with power-law conductivity; it collapses to
    the linear ramp when both phases conduct equally or when n = 0.
    """
    if kind == "linear":
        return zeta
    n = fgm.gradient_index
    kcm = fgm.ceramic.conductivity - fgm.metal.conductivity
    ratio = kcm / fgm.metal.conductivity
    num = 0.0
    den = 0.0
    for k in range(6):
        coeff = (-ratio) ** k / (k * n + 1.0)
        num += coeff * zeta ** (k * n + 1.0)
        den += coeff
    return num / den


def temperature_at(z: float, profile: TemperatureProfile, fgm: FgmDefinition) -> float:
    """Temperature at height z for the given profile."""
    _check_z(z, fgm)
    h = fgm.thickness
    zeta = (2.0 * z + h) / (2.0 * h)
    eta = temperature_shape(zeta, fgm, profile.kind)
    return profile.metal_surface_temp + (
        profile.ceramic_surface_temp - profile.metal_surface_temp) * eta


def thickness_points(fgm: FgmDefinition,
                     n_points: int = DEFAULT_THICKNESS_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre abscissae and weights on [-h/2, h/2]."""
    xi, w = np.polynomial.legendre.leggauss(n_points)
    half = 0.5 * fgm.thickness
    return xi * half, w * half


def _plane_stress_matrix(e: float, nu: float) -> np.ndarray:
    c = e / (1.0 - nu * nu)
    return c * np.array([[1.0, nu, 0.0],
                         [nu, 1.0, 0.0],
                         [0.0, 0.0, 0.5 * (1.0 - nu)]])


@dataclass(frozen=True)
class ConstitutiveSet:
    """Thickness-integrated section stiffness: membrane A, coupling B,
    bending D_b (all 3x3) and transverse shear E_s (2x2)."""

    extensional: np.ndarray
    coupling: np.ndarray
    bending: np.ndarray
    shear: np.ndarray


def integrate_constitutive(fgm: FgmDefinition,
                           shear_correction: tuple[float, float] = (SQRT_5_6, SQRT_5_6),
                           n_points: int = DEFAULT_THICKNESS_POINTS) -> ConstitutiveSet:
    """Integrate the {1, z, z^2} moments of the plane-stress stiffness.

    The Mori-Tanaka z-dependence is not polynomial, so a fixed 20-point
    Gauss-Legendre rule is used; doubling the rule moves no entry by more
    than ~1e-10 relative for the power-law exponents of interest.
    """
    zs, ws = thickness_points(fgm, n_points)
    a = np.zeros((3, 3))
    b = np.zeros((3, 3))
    d = np.zeros((3, 3))
    e44 = 0.0
    for z, w in zip(zs, ws):
        props = point_properties(z, fgm)
        q = _plane_stress_matrix(props.youngs_modulus, props.poisson_ratio)
        a += w * q
        b += (w * z) * q
        d += (w * z * z) * q
        e44 += w * props.youngs_modulus / (2.0 * (1.0 + props.poisson_ratio))
    u1, u2 = shear_correction
    shear = np.diag([u1 * u1 * e44, u2 * u2 * e44])
    return ConstitutiveSet(extensional=a, coupling=b, bending=d, shear=shear)


@dataclass(frozen=True)
class ThermalResultants:
    """Membrane force and moment resultants of a through-thickness
    temperature rise; the shear-coupling component is identically zero for
    the isotropic law used."""

    membrane: np.ndarray  # (N_xx, N_yy, N_xy)
    moment: np.ndarray    # (M_xx, M_yy, M_xy)


def resultants_for_delta_t(fgm: FgmDefinition, delta_t,
                           n_points: int = DEFAULT_THICKNESS_POINTS) -> ThermalResultants:
    """Thermal resultants for an arbitrary temperature rise delta_t(z)."""
    zs, ws = thickness_points(fgm, n_points)
    n = np.zeros(3)
    m = np.zeros(3)
    unit = np.array([1.0, 1.0, 0.0])
    for z, w in zip(zs, ws):
        props = point_properties(z, fgm)
        q = _plane_stress_matrix(props.youngs_modulus, props.poisson_ratio)
        vec = (q @ unit) * (props.expansion * delta_t(z))
        n += w * vec
        m += (w * z) * vec
    return ThermalResultants(membrane=n, moment=m)


def thermal_resultants(fgm: FgmDefinition, profile: TemperatureProfile,
                       n_points: int = DEFAULT_THICKNESS_POINTS) -> ThermalResultants:
    """Thermal resultants of the full profile relative to its reference."""
    def delta_t(z: float) -> float:
        return temperature_at(z, profile, fgm) - profile.reference_temp

    return resultants_for_delta_t(fgm, delta_t, n_points)
