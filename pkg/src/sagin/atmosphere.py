"""Altitude-resolved atmospheric state and layering.

Everything here is a pure function of an immutable :class:`AtmosphereProfile`,
so profiles can be shared between threads freely. Altitudes are in km,
temperatures in K, pressures in Pa, water vapour in g/m^3 and electron
densities in m^-3. Scalar and ``numpy`` array altitudes are both accepted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .constants import (
    BOLTZMANN,
    GAS_CONSTANT,
    MOLAR_MASS_DRY_AIR,
    MOLAR_MASS_WATER,
    AVOGADRO,
    STANDARD_GRAVITY,
)
from .errors import ConfigError, DomainError

DEFAULT_RAIN_TOP_KM = 1.6
DEFAULT_FOG_TOP_KM = 0.3
DEFAULT_CLOUD_BASE_KM = 1.0
DEFAULT_CLOUD_TOP_KM = 3.0

_HYDROSTATIC = STANDARD_GRAVITY * MOLAR_MASS_DRY_AIR / GAS_CONSTANT  # K/m


class Layer(str, enum.Enum):
    TROPOSPHERE = "Troposphere"
    STRATOSPHERE = "Stratosphere"
    GAP = "Gap"
    IONOSPHERE = "Ionosphere"
    SPACE = "Space"


@dataclass(frozen=True)
class LayerBounds:
    troposphere_top: float = 12.0
    stratosphere_top: float = 50.0
    ionosphere_bottom: float = 60.0
    ionosphere_top: float = 1000.0

    def __post_init__(self):
        if not (
            0.0 < self.troposphere_top < self.stratosphere_top
            <= self.ionosphere_bottom < self.ionosphere_top
        ):
            raise ConfigError(
                "layer bounds must satisfy 0 < troposphere_top < stratosphere_top"
                " <= ionosphere_bottom < ionosphere_top"
            )

    def segments(self) -> list[tuple[Layer, float, float]]:
        """(layer, bottom, top) for every bounded layer, bottom-up."""
        return [
            (Layer.TROPOSPHERE, 0.0, self.troposphere_top),
            (Layer.STRATOSPHERE, self.troposphere_top, self.stratosphere_top),
            (Layer.GAP, self.stratosphere_top, self.ionosphere_bottom),
            (Layer.IONOSPHERE, self.ionosphere_bottom, self.ionosphere_top),
            (Layer.SPACE, self.ionosphere_top, math.inf),
        ]


@dataclass(frozen=True)
class ChapmanParams:
    """Single Chapman layer: peak density (m^-3), peak altitude and scale height (km)."""

    peak_electron_density: float = 1.0e12
    peak_altitude: float = 300.0
    scale_height: float = 75.0

    def __post_init__(self):
        if self.peak_electron_density < 0:
            raise ConfigError("peak_electron_density must be >= 0")
        if self.scale_height <= 0:
            raise ConfigError("Chapman scale_height must be > 0")


def _standard_temperature_table(surface_temperature: float) -> tuple[tuple[float, float], ...]:
    # 6.5 K/km lapse to 11 km, isothermal above.
    return ((0.0, surface_temperature), (11.0, surface_temperature - 6.5 * 11.0))


@dataclass(frozen=True)
class AtmosphereProfile:
    surface_temperature: float = 288.15
    surface_pressure: float = 101_325.0
    surface_water_vapor_density: float = 7.5
    water_vapor_scale_height: float = 2.1
    temperature_table: tuple[tuple[float, float], ...] = ()
    electron_profile: ChapmanParams = field(default_factory=ChapmanParams)
    layer_bounds: LayerBounds = field(default_factory=LayerBounds)
    #: electron-neutral collision frequency in the ionosphere, s^-1
    electron_collision_frequency: float = 1.0e4

    def __post_init__(self):
        if self.surface_temperature <= 0 or self.surface_pressure <= 0:
            raise ConfigError("surface temperature and pressure must be > 0")
        if self.surface_water_vapor_density <= 0:
            raise ConfigError("surface_water_vapor_density must be > 0")
        if self.water_vapor_scale_height <= 0:
            raise ConfigError("water_vapor_scale_height must be > 0")
        if self.electron_collision_frequency < 0:
            raise ConfigError("electron_collision_frequency must be >= 0")
        table = self.temperature_table or _standard_temperature_table(self.surface_temperature)
        table = tuple((float(h), float(t)) for h, t in table)
        if table[0][0] != 0.0 or not math.isclose(table[0][1], self.surface_temperature):
            raise ConfigError("temperature_table must start at (0 km, surface_temperature)")
        alts = [h for h, _ in table]
        if any(b <= a for a, b in zip(alts, alts[1:])):
            raise ConfigError("temperature_table altitudes must be strictly increasing")
        if any(t <= 0 for _, t in table):
            raise ConfigError("temperatures must be > 0")
        object.__setattr__(self, "temperature_table", table)
        peak = self.electron_profile.peak_altitude
        lb = self.layer_bounds
        if not lb.ionosphere_bottom <= peak <= lb.ionosphere_top:
            raise ConfigError("Chapman peak_altitude must lie inside the ionosphere")

    @cached_property
    def _pressure_nodes(self) -> np.ndarray:
        # pressure at each temperature-table node, integrated hydrostatically
        table = self.temperature_table
        p = [self.surface_pressure]
        for (h0, t0), (h1, t1) in zip(table, table[1:]):
            p.append(_layer_pressure(p[-1], h0, t0, t1, h1, h1))
        return np.array(p)


def _layer_pressure(p0, h0, t0, t1, h1, h):
    """Hydrostatic pressure at ``h`` inside a linear-temperature segment."""
    dh = (h - h0) * 1e3
    if t1 == t0:
        return p0 * np.exp(-_HYDROSTATIC * dh / t0)
    lapse = (t1 - t0) / ((h1 - h0) * 1e3)
    t = t0 + lapse * dh
    return p0 * (t / t0) ** (-_HYDROSTATIC / lapse)


def _check_altitude(h):
    h = np.asarray(h, dtype=float)
    if np.any(h < 0) or np.any(np.isnan(h)):
        raise DomainError("altitude must be >= 0 km")
    return h


def _scalar_or_array(result, h):
    return float(result) if np.ndim(h) == 0 else result


def water_vapor_density(profile: AtmosphereProfile, h):
    """Water-vapour density in g/m^3 at altitude ``h`` km."""
    arr = _check_altitude(h)
    out = profile.surface_water_vapor_density * np.exp(-arr / profile.water_vapor_scale_height)
    return _scalar_or_array(out, h)


def temperature(profile: AtmosphereProfile, h):
    """Temperature in K from the piecewise-linear table, isothermal above its top."""
    arr = _check_altitude(h)
    alts, temps = zip(*profile.temperature_table)
    out = np.interp(arr, alts, temps)
    return _scalar_or_array(out, h)


def pressure(profile: AtmosphereProfile, h):
    """Total pressure in Pa from the hydrostatic equation over the temperature table."""
    arr = _check_altitude(h)
    table = profile.temperature_table
    nodes = profile._pressure_nodes
    out = np.empty_like(arr)
    idx = np.searchsorted([a for a, _ in table], arr, side="right") - 1
    for i, (h0, t0) in enumerate(table):
        sel = idx == i
        if not np.any(sel):
            continue
        if i + 1 < len(table):
            h1, t1 = table[i + 1]
        else:
            h1, t1 = h0 + 1.0, t0
        out[sel] = _layer_pressure(nodes[i], h0, t0, t1, h1, arr[sel])
    return _scalar_or_array(out, h)


def water_vapor_number_density(rho_wv):
    """Molecules per m^3 for a water-vapour density in g/m^3."""
    return np.asarray(rho_wv) * AVOGADRO / MOLAR_MASS_WATER


def water_vapor_pressure(rho_wv, t):
    """Partial pressure of water vapour in Pa (ideal gas)."""
    return water_vapor_number_density(rho_wv) * BOLTZMANN * np.asarray(t)


def electron_density(profile: AtmosphereProfile, h):
    """Chapman-layer electron density in m^-3; zero outside the ionosphere."""
    arr = _check_altitude(h)
    cp = profile.electron_profile
    lb = profile.layer_bounds
    z = (arr - cp.peak_altitude) / cp.scale_height
    with np.errstate(over="ignore"):
        chapman = cp.peak_electron_density * np.exp(0.5 * (1.0 - z - np.exp(-z)))
    inside = (arr >= lb.ionosphere_bottom) & (arr <= lb.ionosphere_top)
    out = np.where(inside, chapman, 0.0)
    return _scalar_or_array(out, h)


def layer_of(profile: AtmosphereProfile, h: float) -> Layer:
    """Layer containing ``h``; an altitude on a boundary belongs to the lower layer."""
    if h < 0 or math.isnan(h):
        raise DomainError("altitude must be >= 0 km")
    for layer, _, top in profile.layer_bounds.segments():
        if h <= top:
            return layer
    return Layer.SPACE  # pragma: no cover - last segment is unbounded


def layer_overlaps(profile: AtmosphereProfile, h0: float, h1: float) -> list[tuple[Layer, float, float]]:
    """Split ``[h0, h1]`` at layer boundaries into (layer, bottom, top) pieces."""
    pieces = []
    for layer, bottom, top in profile.layer_bounds.segments():
        lo, hi = max(h0, bottom), min(h1, top)
        if hi > lo:
            pieces.append((layer, lo, hi))
    return pieces


class WeatherKind(str, enum.Enum):
    CLEAR = "Clear"
    RAIN = "Rain"
    FOG = "Fog"
    CLOUD = "Cloud"


@dataclass(frozen=True)
class WeatherCondition:
    """One weather state. Extents are altitudes in km; rates in mm/h; contents in g/m^3."""

    kind: WeatherKind = WeatherKind.CLEAR
    rain_rate: float = 0.0
    rain_top: float = DEFAULT_RAIN_TOP_KM
    fog_liquid_water: float = 0.0
    fog_top: float = DEFAULT_FOG_TOP_KM
    cloud_liquid_water: float = 0.0
    cloud_base: float = DEFAULT_CLOUD_BASE_KM
    cloud_top: float = DEFAULT_CLOUD_TOP_KM

    def __post_init__(self):
        object.__setattr__(self, "kind", WeatherKind(self.kind))
        if min(self.rain_rate, self.fog_liquid_water, self.cloud_liquid_water) < 0:
            raise ConfigError("rain rate and liquid water contents must be >= 0")
        if self.rain_top <= 0 or self.fog_top <= 0:
            raise ConfigError("rain_top and fog_top must be > 0")
        if not 0 <= self.cloud_base < self.cloud_top:
            raise ConfigError("cloud extent must satisfy 0 <= cloud_base < cloud_top")

    @classmethod
    def clear(cls) -> "WeatherCondition":
        return cls(WeatherKind.CLEAR)

    @classmethod
    def rain(cls, rate: float, top: float = DEFAULT_RAIN_TOP_KM) -> "WeatherCondition":
        return cls(WeatherKind.RAIN, rain_rate=rate, rain_top=top)

    @classmethod
    def fog(cls, liquid_water: float, top: float = DEFAULT_FOG_TOP_KM) -> "WeatherCondition":
        return cls(WeatherKind.FOG, fog_liquid_water=liquid_water, fog_top=top)

    @classmethod
    def cloud(
        cls,
        liquid_water: float,
        base: float = DEFAULT_CLOUD_BASE_KM,
        top: float = DEFAULT_CLOUD_TOP_KM,
    ) -> "WeatherCondition":
        return cls(WeatherKind.CLOUD, cloud_liquid_water=liquid_water, cloud_base=base, cloud_top=top)

    @property
    def label(self) -> str:
        return self.kind.value.lower()

    def extent(self) -> tuple[float, float] | None:
        """Vertical extent (bottom, top) in km of the active hydrometeor, if any."""
        if self.kind is WeatherKind.RAIN:
            return (0.0, self.rain_top)
        if self.kind is WeatherKind.FOG:
            return (0.0, self.fog_top)
        if self.kind is WeatherKind.CLOUD:
            return (self.cloud_base, self.cloud_top)
        return None

    def validate(self, profile: AtmosphereProfile) -> None:
        ext = self.extent()
        if ext is not None and ext[1] > profile.layer_bounds.troposphere_top:
            raise ConfigError(f"{self.kind.value} extent must lie within the troposphere")
