"""Ground-to-platform link budget: loss breakdown, layer shares and capacity.

Every medium-induced loss is accumulated per atmospheric layer so the
per-layer map sums to the medium total. The gap between stratosphere and
ionosphere is reported with the stratosphere, and anything above the
ionosphere (always zero here) with the ionosphere.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import integrate

from . import absorption as ab
from . import atmosphere as atm
from .atmosphere import Layer, WeatherCondition, WeatherKind
from .constants import (
    BOLTZMANN,
    DB_PER_NEPER,
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    SPEED_OF_LIGHT,
    VACUUM_PERMITTIVITY,
)
from .errors import ConfigError, DomainError, UndefinedShareError
from .scattering import ParticlePopulation, Species, specific_attenuation

log = logging.getLogger(__name__)

SUB_THRESHOLD_DB = 0.1
#: Cn^2 is integrated no higher than this; the HV profile is ~0 above 30 km
TURBULENCE_CEILING_KM = 100.0
DEFAULT_AEROSOL_SCALE_HEIGHT_KM = 1.2

REPORT_LAYERS = (Layer.TROPOSPHERE, Layer.STRATOSPHERE, Layer.IONOSPHERE)
_FOLD = {
    Layer.TROPOSPHERE: Layer.TROPOSPHERE,
    Layer.STRATOSPHERE: Layer.STRATOSPHERE,
    Layer.GAP: Layer.STRATOSPHERE,
    Layer.IONOSPHERE: Layer.IONOSPHERE,
    Layer.SPACE: Layer.IONOSPHERE,
}


class Factor(str, enum.Enum):
    FSPL = "FSPL"
    MOLECULAR_ABSORPTION = "MolecularAbsorption"
    CLOUD = "Cloud"
    FOG = "Fog"
    RAIN = "Rain"
    IONOSPHERE = "Ionosphere"
    TURBULENCE = "Turbulence"
    MIE_SCATTERING = "MieScattering"


_WEATHER_FACTOR = {Species.RAIN: Factor.RAIN, Species.FOG: Factor.FOG, Species.CLOUD: Factor.CLOUD}
_WEATHER_SPECIES = {WeatherKind.RAIN: Species.RAIN, WeatherKind.FOG: Species.FOG, WeatherKind.CLOUD: Species.CLOUD}


class BandLabel(str, enum.Enum):
    MMWAVE = "mmWave"
    THZ = "THz"
    FSO = "FSO"


@dataclass(frozen=True)
class LinkGeometry:
    """Straight path between two altitudes (km) at an elevation angle (deg)."""

    ground_altitude: float = 0.0
    platform_altitude: float = 2000.0
    elevation: float = 90.0

    def __post_init__(self):
        if not self.platform_altitude > self.ground_altitude >= 0:
            raise ConfigError("need platform_altitude > ground_altitude >= 0")
        if not 0 < self.elevation <= 90:
            raise ConfigError("elevation must lie in (0, 90] degrees")
        if self.elevation < 10:
            log.warning("flat-earth slant geometry is inaccurate below 10 deg elevation")

    @property
    def slant_factor(self) -> float:
        return ab.slant_factor(self.elevation)

    @property
    def path_length(self) -> float:
        """Slant range in km."""
        return (self.platform_altitude - self.ground_altitude) * self.slant_factor


@dataclass(frozen=True)
class BandConfig:
    label: BandLabel
    carrier_frequency: float  # Hz
    bandwidth: float  # Hz
    tx_power: float  # dBm
    tx_gain: float  # dBi
    rx_gain: float  # dBi
    noise_figure: float  # dB
    system_temperature: float = 290.0  # K
    #: surface gas absorption (dB/km) for carriers outside the line catalog;
    #: scaled with the water-vapour profile along the path
    gas_absorption: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "label", BandLabel(self.label))
        for name in ("carrier_frequency", "bandwidth", "system_temperature"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"band {self.label.value}: {name} must be > 0")
        for name in ("tx_power", "tx_gain", "rx_gain", "noise_figure"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"band {self.label.value}: {name} must be finite")
        if self.noise_figure < 0:
            raise ConfigError(f"band {self.label.value}: noise_figure must be >= 0")
        if self.gas_absorption is not None and self.gas_absorption < 0:
            raise ConfigError(f"band {self.label.value}: gas_absorption must be >= 0")


@dataclass(frozen=True)
class CnSquaredProfile:
    """Hufnagel-Valley refractive-index structure profile (m^-2/3).

    Cn2(h) = 0.00594 (v/27)^2 (1e-5 h)^10 exp(-h/1000)
             + background exp(-h/1500) + ground exp(-h/100), h in metres.
    """

    ground_cn2: float = 1.7e-14
    wind_speed: float = 21.0
    background_cn2: float = 2.7e-16

    def __post_init__(self):
        if min(self.ground_cn2, self.wind_speed, self.background_cn2) < 0:
            raise ConfigError("Hufnagel-Valley parameters must be >= 0")

    def cn2(self, h_m):
        h = np.asarray(h_m, dtype=float)
        return (
            0.00594 * (self.wind_speed / 27.0) ** 2 * (1e-5 * h) ** 10 * np.exp(-h / 1000.0)
            + self.background_cn2 * np.exp(-h / 1500.0)
            + self.ground_cn2 * np.exp(-h / 100.0)
        )


@dataclass
class AttenuationBreakdown:
    band: str
    weather: str
    per_factor: dict[Factor, float]
    per_layer: dict[Layer, float]
    metadata: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return math.fsum(self.per_factor.values())

    @property
    def medium_total(self) -> float:
        return math.fsum(v for k, v in self.per_factor.items() if k is not Factor.FSPL)

    @property
    def sub_threshold(self) -> frozenset[Factor]:
        return frozenset(k for k, v in self.per_factor.items() if v < SUB_THRESHOLD_DB)

    def to_dict(self) -> dict:
        return {
            "band": self.band,
            "weather": self.weather,
            "per_factor_db": {k.value: v for k, v in self.per_factor.items()},
            "per_layer_db": {k.value: v for k, v in self.per_layer.items()},
            "sub_threshold": sorted(k.value for k in self.sub_threshold),
            "total_db": self.total,
            "metadata": self.metadata,
        }


@dataclass(frozen=True)
class CapacityResult:
    snr: float  # dB
    bits_per_s: float
    spectral_efficiency: float  # bps/Hz


# ---------------------------------------------------------------------------
# individual loss mechanisms

def fspl(f: float, d: float) -> float:
    """Free-space path loss in dB for frequency ``f`` Hz over ``d`` metres."""
    if not (f > 0 and d > 0):
        raise DomainError("frequency and distance must be > 0")
    return 20.0 * math.log10(4.0 * math.pi * d * f / SPEED_OF_LIGHT)


def _turbulence_moment(cn2: CnSquaredProfile, h0_km: float, lo_km: float, hi_km: float) -> float:
    """Integral of Cn2(h) (h - h0)^(5/6) dh over [lo, hi], in m^(1/6) * m^-2/3 * m."""
    base = h0_km * 1e3

    def integrand(h):
        return float(cn2.cn2(h)) * (h - base) ** (5.0 / 6.0)

    lo, hi = lo_km * 1e3, hi_km * 1e3
    pts = [p for p in (base + 100.0, base + 1500.0, 10_000.0) if lo < p < hi]
    val, _ = integrate.quad(integrand, lo, hi, points=pts or None, epsrel=1e-10, epsabs=0.0, limit=200)
    return val


def turbulence_by_layer(
    f: float, geometry: LinkGeometry, cn2: CnSquaredProfile, profile: atm.AtmosphereProfile | None = None
) -> dict[Layer, float]:
    """Mean scintillation loss (dB) accrued in each layer.

    Plane-wave Rytov variance for a ground receiver,
    sigma_R^2 = 2.25 k^(7/6) sec(zenith)^(11/6) int Cn2(h) (h - h0)^(5/6) dh,
    which for a uniform Cn2 over length L is the familiar 1.23 Cn2 k^(7/6) L^(11/6).
    The mean log-irradiance drop is sigma_R^2 / 2 nepers, so the loss is
    linear in sigma_R^2 and scales exactly as f^(7/6).
    """
    if not f > 0:
        raise DomainError("frequency must be > 0")
    profile = profile or atm.AtmosphereProfile()
    k = 2.0 * math.pi * f / SPEED_OF_LIGHT
    scale = 2.25 * k ** (7.0 / 6.0) * geometry.slant_factor ** (11.0 / 6.0) * DB_PER_NEPER / 2.0
    top = min(geometry.platform_altitude, TURBULENCE_CEILING_KM)
    out = {}
    for layer, lo, hi in atm.layer_overlaps(profile, geometry.ground_altitude, top):
        out[layer] = scale * _turbulence_moment(cn2, geometry.ground_altitude, lo, hi)
    return out


def turbulence_loss(f: float, geometry: LinkGeometry, cn2: CnSquaredProfile) -> float:
    return math.fsum(turbulence_by_layer(f, geometry, cn2).values())


def plasma_frequency(n_e: float) -> float:
    """Electron plasma frequency in Hz."""
    return math.sqrt(n_e * ELEMENTARY_CHARGE**2 / (VACUUM_PERMITTIVITY * ELECTRON_MASS)) / (2.0 * math.pi)


def plasma_coefficient(f: float, profile: atm.AtmosphereProfile, h):
    """Collisional absorption in dB/km from the unmagnetised Appleton-Hartree index."""
    n_e = np.asarray(atm.electron_density(profile, h), dtype=float)
    omega = 2.0 * math.pi * f
    x = n_e * ELEMENTARY_CHARGE**2 / (VACUUM_PERMITTIVITY * ELECTRON_MASS * omega**2)
    z = profile.electron_collision_frequency / omega
    n = np.sqrt(1.0 - x / (1.0 - 1j * z))
    kappa = omega / SPEED_OF_LIGHT * np.abs(n.imag)  # field attenuation, Np/m
    return 2.0 * DB_PER_NEPER * kappa * 1e3


def _check_above_plasma(f: float, profile: atm.AtmosphereProfile) -> None:
    fp = plasma_frequency(profile.electron_profile.peak_electron_density)
    if f <= fp:
        raise DomainError(f"{f:.4g} Hz is below the peak plasma frequency {fp:.4g} Hz")


def plasma_by_layer(f: float, geometry: LinkGeometry, profile: atm.AtmosphereProfile) -> dict[Layer, float]:
    _check_above_plasma(f, profile)
    out = {}
    for layer, lo, hi in atm.layer_overlaps(profile, geometry.ground_altitude, geometry.platform_altitude):
        if layer is not Layer.IONOSPHERE:
            continue
        peak = profile.electron_profile.peak_altitude
        pts = [peak] if lo < peak < hi else None
        val, _ = integrate.quad(
            lambda h: float(plasma_coefficient(f, profile, h)), lo, hi, points=pts, epsrel=1e-10, epsabs=0.0, limit=200
        )
        out[layer] = val * geometry.slant_factor
    return out


def plasma_loss(f: float, geometry: LinkGeometry, profile: atm.AtmosphereProfile) -> float:
    """Ionospheric collisional absorption along the path, in dB."""
    return math.fsum(plasma_by_layer(f, geometry, profile).values())


def max_plasma_coefficient(f: float, profile: atm.AtmosphereProfile, geometry: LinkGeometry | None = None) -> float:
    """Largest per-km plasma coefficient along the path (dB/km); checked, never clamped."""
    _check_above_plasma(f, profile)
    lb = profile.layer_bounds
    lo, hi = lb.ionosphere_bottom, lb.ionosphere_top
    if geometry is not None:
        lo, hi = max(lo, geometry.ground_altitude), min(hi, geometry.platform_altitude)
        if hi <= lo:
            return 0.0
    h = np.unique(np.concatenate([np.linspace(lo, hi, 2001), [np.clip(profile.electron_profile.peak_altitude, lo, hi)]]))
    return float(np.max(plasma_coefficient(f, profile, h)))


def molecular_by_layer(
    f: float,
    geometry: LinkGeometry,
    profile: atm.AtmosphereProfile,
    catalogs=None,
    gas_absorption: float | None = None,
) -> dict[Layer, float]:
    """Molecular absorption (dB) per layer.

    Uses the line catalog when it covers ``f``; otherwise ``gas_absorption``
    (surface dB/km, scaled with water vapour) must be supplied.
    """
    catalogs = ab._as_tuple(catalogs if catalogs is not None else ab.default_catalogs())
    pieces = atm.layer_overlaps(profile, geometry.ground_altitude, geometry.platform_altitude)
    out = {}
    if gas_absorption is None:
        for layer, lo, hi in pieces:
            out[layer] = ab.vertical_absorption(catalogs, profile, f, lo, hi) * geometry.slant_factor
        return out
    scale_h = profile.water_vapor_scale_height
    for layer, lo, hi in pieces:
        column = gas_absorption * scale_h * (math.exp(-lo / scale_h) - math.exp(-hi / scale_h))
        out[layer] = column * geometry.slant_factor
    return out


def _clip(extent, geometry):
    lo = max(extent[0], geometry.ground_altitude)
    hi = min(extent[1], geometry.platform_altitude)
    return (lo, hi) if hi > lo else None


def weather_by_layer(
    weather: WeatherCondition,
    band: BandConfig,
    geometry: LinkGeometry,
    pops: Mapping[Species, ParticlePopulation],
    profile: atm.AtmosphereProfile | None = None,
) -> dict[Factor, dict[Layer, float]]:
    profile = profile or atm.AtmosphereProfile()
    weather.validate(profile)
    out: dict[Factor, dict[Layer, float]] = {Factor.CLOUD: {}, Factor.FOG: {}, Factor.RAIN: {}}
    species = _WEATHER_SPECIES.get(weather.kind)
    if species is None:
        return out
    if species not in pops:
        raise ConfigError(f"no {species.value} population defined for {weather.kind.value} weather")
    extent = _clip(weather.extent(), geometry)
    if extent is None:
        return out
    gamma = specific_attenuation(pops[species], band.carrier_frequency)
    for layer, lo, hi in atm.layer_overlaps(profile, *extent):
        out[_WEATHER_FACTOR[species]][layer] = gamma * (hi - lo) * geometry.slant_factor
    return out


def weather_loss(
    weather: WeatherCondition,
    band: BandConfig,
    geometry: LinkGeometry,
    pops: Mapping[Species, ParticlePopulation],
    profile: atm.AtmosphereProfile | None = None,
) -> dict[Factor, float]:
    """Hydrometeor loss (dB) per weather factor; all zero in clear sky."""
    per = weather_by_layer(weather, band, geometry, pops, profile)
    return {factor: math.fsum(layers.values()) for factor, layers in per.items()}


def aerosol_by_layer(
    band: BandConfig,
    geometry: LinkGeometry,
    pops: Mapping[Species, ParticlePopulation],
    profile: atm.AtmosphereProfile,
    scale_height: float = DEFAULT_AEROSOL_SCALE_HEIGHT_KM,
) -> dict[Layer, float]:
    """Background aerosol extinction with an exponential vertical profile."""
    pop = pops.get(Species.AEROSOL)
    if pop is None:
        return {}
    gamma0 = specific_attenuation(pop, band.carrier_frequency)
    out = {}
    for layer, lo, hi in atm.layer_overlaps(profile, geometry.ground_altitude, geometry.platform_altitude):
        column = gamma0 * scale_height * (math.exp(-lo / scale_height) - math.exp(-hi / scale_height))
        out[layer] = column * geometry.slant_factor
    return out


# ---------------------------------------------------------------------------

def link_budget(
    geometry: LinkGeometry,
    band: BandConfig,
    weather: WeatherCondition,
    profile: atm.AtmosphereProfile,
    pops: Mapping[Species, ParticlePopulation],
    cn2: CnSquaredProfile | None = None,
    catalogs=None,
    aerosol_scale_height: float = DEFAULT_AEROSOL_SCALE_HEIGHT_KM,
) -> AttenuationBreakdown:
    """Per-factor and per-layer loss for one band under one weather state."""
    cn2 = cn2 if cn2 is not None else CnSquaredProfile()
    f = band.carrier_frequency
    layered: dict[Factor, dict[Layer, float]] = {
        Factor.MOLECULAR_ABSORPTION: molecular_by_layer(f, geometry, profile, catalogs, band.gas_absorption),
        Factor.IONOSPHERE: plasma_by_layer(f, geometry, profile),
        Factor.TURBULENCE: turbulence_by_layer(f, geometry, cn2, profile),
        Factor.MIE_SCATTERING: aerosol_by_layer(band, geometry, pops, profile, aerosol_scale_height),
    }
    layered.update(weather_by_layer(weather, band, geometry, pops, profile))

    per_factor = {Factor.FSPL: fspl(f, geometry.path_length * 1e3)}
    per_layer = {layer: 0.0 for layer in REPORT_LAYERS}
    for factor in Factor:
        if factor is Factor.FSPL:
            continue
        pieces = layered.get(factor, {})
        per_factor[factor] = math.fsum(pieces.values())
        for layer, value in pieces.items():
            per_layer[_FOLD[layer]] += value
    metadata = {
        "carrier_frequency_hz": f,
        "path_length_km": geometry.path_length,
        "max_plasma_coefficient_db_per_km": max_plasma_coefficient(f, profile, geometry),
    }
    return AttenuationBreakdown(band.label.value, weather.label, per_factor, per_layer, metadata)


def layer_shares(b: AttenuationBreakdown) -> dict[Layer, float]:
    """Per-layer share (percent) of the medium-induced loss."""
    total = math.fsum(b.per_layer.values())
    if not total > 0:
        raise UndefinedShareError("breakdown has no medium-induced loss")
    return {layer: 100.0 * value / total for layer, value in b.per_layer.items()}


def noise_power_dbm(band: BandConfig) -> float:
    """Thermal noise k T B in dBm plus the receiver noise figure."""
    return 10.0 * math.log10(BOLTZMANN * band.system_temperature * band.bandwidth) + 30.0 + band.noise_figure


def capacity_from_loss(total_loss: float, band: BandConfig) -> CapacityResult:
    if not band.bandwidth > 0:
        raise ConfigError("bandwidth must be > 0")
    snr = band.tx_power + band.tx_gain + band.rx_gain - total_loss - noise_power_dbm(band)
    if snr == -math.inf or math.isnan(snr):
        se = 0.0
    else:
        se = math.log2(1.0 + 10.0 ** (snr / 10.0)) if snr < 3000 else snr / (10 * math.log10(2))
    return CapacityResult(snr, band.bandwidth * se, se)


def capacity(b: AttenuationBreakdown, band: BandConfig) -> CapacityResult:
    """SNR, Shannon capacity and spectral efficiency for a loss breakdown."""
    return capacity_from_loss(b.total, band)
