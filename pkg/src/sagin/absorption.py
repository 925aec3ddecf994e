"""Line-by-line molecular absorption for water vapour and oxygen.

Absorption coefficient ``k(f) = 10/ln10 * 1e3 * sum(n * S(T) * g(f))`` in
dB/km, with a Van Vleck-Weisskopf line shape ``g`` whose half width combines
pressure broadening (air and self) and Doppler broadening. No continuum term.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Union

import numpy as np

from . import atmosphere as atm
from . import kernels
from .constants import ATOMIC_MASS_UNIT, BOLTZMANN, DB_PER_NEPER, SPEED_OF_LIGHT
from .errors import ConfigError, DomainError, OutOfRangeError

#: global altitude grid for path quadrature: fine steps low down, coarse above
FINE_STEP_KM = 0.1
FINE_TOP_KM = 30.0
COARSE_STEP_KM = 1.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)


class Molecule(str, enum.Enum):
    H2O = "H2O"
    O2 = "O2"


@dataclass(frozen=True)
class SpectralLine:
    center_frequency: float  # Hz
    line_intensity: float  # Hz m^2 / molecule at the catalog reference temperature
    air_broadening_halfwidth: float  # Hz / Pa
    temperature_exponent: float
    lower_state_energy: float  # J
    self_broadening_ratio: float = 0.0
    self_temperature_exponent: float = 1.0

    def __post_init__(self):
        if self.center_frequency <= 0:
            raise ConfigError("line center frequency must be > 0")
        if self.line_intensity < 0:
            raise ConfigError("line intensity must be >= 0")
        if self.air_broadening_halfwidth <= 0:
            raise ConfigError("air-broadening half width must be > 0")


@dataclass(frozen=True)
class LineCatalog:
    species: Molecule
    lines: tuple[SpectralLine, ...]
    reference_temperature: float = 300.0
    reference_pressure: float = 101_325.0
    molecular_mass: float = 18.01528  # amu
    #: S(T) ~ (T_ref/T)^partition_exponent * Boltzmann factor
    partition_exponent: float = 2.5
    volume_mixing_ratio: float = 1.0  # of dry air; unused for H2O
    coverage: tuple[float, float] = (1.0e10, 1.1e12)
    coverage_margin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "species", Molecule(self.species))
        if not self.lines:
            raise ConfigError(f"{self.species.value} catalog has no lines")
        freqs = [ln.center_frequency for ln in self.lines]
        if any(b < a for a, b in zip(freqs, freqs[1:])):
            raise ConfigError("catalog lines must be sorted by center frequency")

    def covers(self, f: float) -> bool:
        lo, hi = self.coverage
        return lo - self.coverage_margin <= f <= hi + self.coverage_margin

    def _arrays(self):
        return _line_arrays(self)


@lru_cache(maxsize=None)
def _line_arrays(catalog: LineCatalog):
    cols = zip(*(
        (ln.center_frequency, ln.line_intensity, ln.air_broadening_halfwidth, ln.temperature_exponent,
         ln.lower_state_energy, ln.self_broadening_ratio, ln.self_temperature_exponent)
        for ln in catalog.lines
    ))
    return tuple(np.array(c, dtype=float)[:, None] for c in cols)


def load_catalogs(path=None) -> dict[Molecule, LineCatalog]:
    """Read a line-catalog JSON file; the shipped catalog when ``path`` is None."""
    if path is None:
        text = resources.files("sagin").joinpath("data/line_catalog.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    doc = json.loads(text)
    meta = doc["metadata"]
    out = {}
    for name, spec in doc["species"].items():
        lines = tuple(
            SpectralLine(
                rec["center_frequency_hz"],
                rec["line_intensity_hz_m2"],
                rec["air_broadening_halfwidth_hz_per_pa"],
                rec["temperature_exponent"],
                rec["lower_state_energy_j"],
                rec.get("self_broadening_ratio", 0.0),
                rec.get("self_temperature_exponent", 1.0),
            )
            for rec in spec["lines"]
        )
        out[Molecule(name)] = LineCatalog(
            Molecule(name),
            lines,
            reference_temperature=meta["reference_temperature_k"],
            reference_pressure=meta["reference_pressure_pa"],
            molecular_mass=spec["molecular_mass_amu"],
            partition_exponent=spec["partition_exponent"],
            volume_mixing_ratio=spec.get("volume_mixing_ratio", 1.0),
            coverage=tuple(meta["coverage_hz"]),
        )
    return out


@lru_cache(maxsize=1)
def default_catalogs() -> tuple[LineCatalog, ...]:
    cats = load_catalogs()
    return (cats[Molecule.H2O], cats[Molecule.O2])


Catalogs = Union[LineCatalog, Iterable[LineCatalog]]


def _as_tuple(catalogs: Catalogs) -> tuple[LineCatalog, ...]:
    if isinstance(catalogs, LineCatalog):
        return (catalogs,)
    return tuple(catalogs)


def _species_coefficient(cat: LineCatalog, f, t, p, rho_wv):
    """1/m for one species over arrays of state (t, p, rho_wv)."""
    f0, s_ref, gamma_air, n_air, e_low, self_ratio, n_self = cat._arrays()
    n_wv = atm.water_vapor_number_density(rho_wv)
    e = n_wv * BOLTZMANN * t
    p_dry = p - e
    if cat.species is Molecule.H2O:
        n_abs = n_wv
    else:
        n_abs = cat.volume_mixing_ratio * p_dry / (BOLTZMANN * t)
    theta = cat.reference_temperature / t
    strength = s_ref * theta**cat.partition_exponent * np.exp(
        e_low / (BOLTZMANN * cat.reference_temperature) * (1.0 - theta)
    ) * n_abs
    lorentz = gamma_air * (p_dry * theta**n_air + self_ratio * e * theta**n_self)
    doppler2 = f0**2 * 2.0 * math.log(2.0) * BOLTZMANN * t / (
        cat.molecular_mass * ATOMIC_MASS_UNIT * SPEED_OF_LIGHT**2
    )
    # Olivero-Longbothum Voigt half width
    width = 0.5346 * lorentz + np.sqrt(0.2166 * lorentz**2 + doppler2)
    return kernels.vvw_line_sum(float(f), f0[:, 0], strength, width)


def _coefficient_array(catalogs, f, t, p, rho_wv):
    """dB/km over broadcast state arrays; ``catalogs`` already validated."""
    t, p, rho_wv = np.broadcast_arrays(
        np.atleast_1d(np.asarray(t, float)),
        np.atleast_1d(np.asarray(p, float)),
        np.atleast_1d(np.asarray(rho_wv, float)),
    )
    t, p, rho_wv = t[None, :], p[None, :], rho_wv[None, :]
    total = np.zeros(t.shape[1])
    for cat in catalogs:
        if cat.species is Molecule.H2O and not np.any(rho_wv > 0):
            continue
        total += _species_coefficient(cat, f, t, p, rho_wv)
    return DB_PER_NEPER * 1e3 * total


def _check_coverage(catalogs, f):
    if not f > 0:
        raise DomainError("frequency must be > 0")
    for cat in catalogs:
        if not cat.covers(f):
            lo, hi = cat.coverage
            raise OutOfRangeError(
                f"{f:.6g} Hz is outside the {cat.species.value} catalog coverage [{lo:.3g}, {hi:.3g}] Hz"
            )


def absorption_coefficient(catalog: Catalogs, f: float, T: float, p: float, rho_wv: float) -> float:
    """Molecular absorption in dB/km at frequency ``f`` Hz.

    ``T`` in K, ``p`` total pressure in Pa, ``rho_wv`` water vapour in g/m^3.
    """
    catalogs = _as_tuple(catalog)
    _check_coverage(catalogs, f)
    if T <= 0 or p <= 0 or rho_wv < 0:
        raise DomainError("need T > 0, p > 0 and rho_wv >= 0")
    return float(_coefficient_array(catalogs, f, T, p, rho_wv)[0])


def profile_coefficient(catalog: Catalogs, profile: atm.AtmosphereProfile, f: float, h):
    """Absorption in dB/km at altitudes ``h`` (km) through ``profile``."""
    catalogs = _as_tuple(catalog)
    _check_coverage(catalogs, f)
    h = np.atleast_1d(np.asarray(h, float))
    return _coefficient_array(
        catalogs, f,
        atm.temperature(profile, h),
        atm.pressure(profile, h),
        atm.water_vapor_density(profile, h),
    )


def _grid_cells(h0: float, h1: float) -> np.ndarray:
    """Cell edges of the global quadrature grid clipped to [h0, h1]."""
    top = max(h1, FINE_TOP_KM)
    n_fine = int(round(FINE_TOP_KM / FINE_STEP_KM))
    fine = np.linspace(0.0, FINE_TOP_KM, n_fine + 1)
    coarse = np.arange(FINE_TOP_KM + COARSE_STEP_KM, math.ceil(top) + COARSE_STEP_KM, COARSE_STEP_KM)
    edges = np.concatenate([fine, coarse])
    inner = edges[(edges > h0) & (edges < h1)]
    return np.concatenate([[h0], inner, [h1]])


def slant_factor(elevation: float) -> float:
    """Flat-earth path stretch 1/sin(elevation) for elevation in degrees."""
    if not 0.0 < elevation <= 90.0:
        raise DomainError("elevation must lie in (0, 90] degrees")
    return 1.0 / math.sin(math.radians(elevation))


def vertical_absorption(catalog: Catalogs, profile: atm.AtmosphereProfile, f: float, h0: float, h1: float) -> float:
    """Vertical (zenith) integral of the absorption coefficient from h0 to h1 km, in dB."""
    if h0 < 0 or h1 < h0:
        raise DomainError("need 0 <= h0 <= h1")
    if h1 == h0:
        return 0.0
    edges = _grid_cells(h0, h1)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    k = profile_coefficient(catalog, profile, f, nodes).reshape(-1, _GL_NODES.size)
    return float(np.sum(half * (k @ _GL_WEIGHTS)))


def path_absorption(
    catalog: Catalogs,
    profile: atm.AtmosphereProfile,
    f: float,
    h0: float,
    h1: float,
    elevation: float = 90.0,
) -> float:
    """Molecular absorption in dB along a straight slant path from h0 to h1 km.

    Piecewise Gauss-Legendre quadrature on a fixed global altitude grid
    (100 m cells below 30 km, 1 km above), so splitting a path at any
    altitude leaves the total unchanged to quadrature precision.
    """
    return vertical_absorption(catalog, profile, f, h0, h1) * slant_factor(elevation)
