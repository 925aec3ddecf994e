"""Scenario files: JSON in, validated dataclasses out.

Keys carry their unit as a suffix (``carrier_frequency_hz``, ``rain_top_km``).
Files are checked against the shipped JSON schema first; any violation is
reported as a ``ScenarioError`` naming the offending field.
"""

from __future__ import annotations

import json
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Mapping

import jsonschema

from . import atmosphere as atm
from . import linkbudget as lb
from . import scattering as sc
from .constants import WATER_DENSITY
from .errors import ConfigError

SCHEMA_VERSION = 1


class ScenarioError(ConfigError):
    """Invalid scenario; ``field`` is the slash-separated path of the culprit."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path or "<root>"
        super().__init__(f"{self.field}: {message}")


@lru_cache(maxsize=None)
def load_schema(name: str = "scenario.schema.json") -> dict:
    return json.loads(resources.files("sagin").joinpath("data", name).read_text())


def default_scenario_document() -> dict:
    return json.loads(resources.files("sagin").joinpath("data/default_scenario.json").read_text())


def validate_document(doc: Any, schema_name: str = "scenario.schema.json") -> None:
    """Raise ``ScenarioError`` for the first (deepest) schema violation."""
    validator = jsonschema.Draft202012Validator(load_schema(schema_name))
    errors = list(validator.iter_errors(doc))
    if not errors:
        return
    err = jsonschema.exceptions.best_match(errors)
    path = "/".join(str(p) for p in err.absolute_path)
    raise ScenarioError(path, err.message)


@contextmanager
def _field(path: str):
    # re-raise construction errors with the field that caused them
    try:
        yield
    except ScenarioError:
        raise
    except (ConfigError, ValueError) as exc:
        raise ScenarioError(path, str(exc)) from exc


# ---------------------------------------------------------------------------
# document -> dataclasses

def _geometry(doc: Mapping) -> lb.LinkGeometry:
    with _field("geometry"):
        return lb.LinkGeometry(
            doc.get("ground_altitude_km", 0.0),
            doc.get("platform_altitude_km", 2000.0),
            doc.get("elevation_deg", 90.0),
        )


def _band(doc: Mapping, index: int) -> lb.BandConfig:
    with _field(f"bands/{index}"):
        return lb.BandConfig(
            doc["label"],
            doc["carrier_frequency_hz"],
            doc["bandwidth_hz"],
            doc["tx_power_dbm"],
            doc["tx_gain_dbi"],
            doc["rx_gain_dbi"],
            doc["noise_figure_db"],
            doc.get("system_temperature_k", 290.0),
            doc.get("gas_absorption_db_km"),
        )


def weather_from_dict(doc: Mapping, path: str = "weather") -> atm.WeatherCondition:
    kind = doc["kind"]
    with _field(path):
        if kind == "clear":
            return atm.WeatherCondition.clear()
        if kind == "rain":
            return atm.WeatherCondition.rain(doc["rain_rate_mm_h"], doc.get("rain_top_km", atm.DEFAULT_RAIN_TOP_KM))
        if kind == "fog":
            return atm.WeatherCondition.fog(doc["fog_liquid_water_g_m3"], doc.get("fog_top_km", atm.DEFAULT_FOG_TOP_KM))
        return atm.WeatherCondition.cloud(
            doc["cloud_liquid_water_g_m3"],
            doc.get("cloud_base_km", atm.DEFAULT_CLOUD_BASE_KM),
            doc.get("cloud_top_km", atm.DEFAULT_CLOUD_TOP_KM),
        )


def weather_to_dict(w: atm.WeatherCondition) -> dict:
    out: dict[str, Any] = {"kind": w.label}
    if w.kind is atm.WeatherKind.RAIN:
        out.update(rain_rate_mm_h=w.rain_rate, rain_top_km=w.rain_top)
    elif w.kind is atm.WeatherKind.FOG:
        out.update(fog_liquid_water_g_m3=w.fog_liquid_water, fog_top_km=w.fog_top)
    elif w.kind is atm.WeatherKind.CLOUD:
        out.update(cloud_liquid_water_g_m3=w.cloud_liquid_water, cloud_base_km=w.cloud_base, cloud_top_km=w.cloud_top)
    return out


def _atmosphere(doc: Mapping) -> atm.AtmosphereProfile:
    kw: dict[str, Any] = {}
    simple = {
        "surface_temperature_k": "surface_temperature",
        "surface_pressure_pa": "surface_pressure",
        "surface_water_vapor_density_g_m3": "surface_water_vapor_density",
        "water_vapor_scale_height_km": "water_vapor_scale_height",
        "electron_collision_frequency_hz": "electron_collision_frequency",
    }
    for key, name in simple.items():
        if key in doc:
            kw[name] = doc[key]
    if "temperature_table_km_k" in doc:
        kw["temperature_table"] = tuple(tuple(row) for row in doc["temperature_table_km_k"])
    if "electron_profile" in doc:
        ep = doc["electron_profile"]
        with _field("atmosphere/electron_profile"):
            kw["electron_profile"] = atm.ChapmanParams(
                ep.get("peak_density_m3", 1.0e12), ep.get("peak_altitude_km", 300.0), ep.get("scale_height_km", 75.0)
            )
    if "layer_bounds_km" in doc:
        with _field("atmosphere/layer_bounds_km"):
            kw["layer_bounds"] = atm.LayerBounds(**doc["layer_bounds_km"])
    with _field("atmosphere"):
        return atm.AtmosphereProfile(**kw)


def _turbulence(doc: Mapping) -> lb.CnSquaredProfile:
    base = lb.CnSquaredProfile()
    with _field("turbulence"):
        return lb.CnSquaredProfile(
            doc.get("ground_cn2_m_2_3", base.ground_cn2),
            doc.get("wind_speed_m_s", base.wind_speed),
            doc.get("background_cn2_m_2_3", base.background_cn2),
        )


_DEFAULT_POPULATIONS = {
    "rain": {"distribution": {"type": "marshall_palmer"}, "refractive_index": {"model": "water", "temperature_k": 293.15}},
    "fog": {"distribution": {"type": "monodisperse", "radius_m": 20e-6}, "refractive_index": {"model": "water", "temperature_k": 283.15}},
    "cloud": {"distribution": {"type": "monodisperse", "radius_m": 10e-6}, "refractive_index": {"model": "water", "temperature_k": 273.15}},
    "aerosol": {
        "distribution": {"type": "monodisperse", "radius_m": 0.5e-6, "number_density_m3": 1.0e8},
        "refractive_index": {"model": "constant", "real": 1.5, "imag": 0.01},
    },
}


def _refractive_index(doc: Mapping | None, default_temperature: float):
    if doc is None:
        return sc.WaterRefractiveIndex(default_temperature)
    if doc["model"] == "water":
        return sc.WaterRefractiveIndex(doc.get("temperature_k", default_temperature))
    return sc.ConstantRefractiveIndex(complex(doc["real"], doc.get("imag", 0.0)))


def _water_content(weather: atm.WeatherCondition, species: sc.Species) -> float | None:
    if species is sc.Species.FOG and weather.kind is atm.WeatherKind.FOG:
        return weather.fog_liquid_water
    if species is sc.Species.CLOUD and weather.kind is atm.WeatherKind.CLOUD:
        return weather.cloud_liquid_water
    return None


def _population(name: str, doc: Mapping, weather: atm.WeatherCondition) -> sc.ParticlePopulation | None:
    """Build one population; None when it needs a weather quantity that is inactive."""
    species = sc.Species(name.capitalize())
    path = f"populations/{name}"
    dist_doc = doc.get("distribution", _DEFAULT_POPULATIONS[name]["distribution"])
    index_doc = doc.get("refractive_index", _DEFAULT_POPULATIONS[name].get("refractive_index"))
    kind = dist_doc["type"]
    lwc = _water_content(weather, species)
    with _field(path):
        if kind == "marshall_palmer":
            if weather.kind is not atm.WeatherKind.RAIN:
                return None
            base = sc.MarshallPalmer.from_rain_rate(weather.rain_rate)
            dist = sc.MarshallPalmer(
                dist_doc.get("n0_m3_mm", base.n0), base.slope,
                dist_doc.get("r_min_m", base.r_min), dist_doc.get("r_max_m", base.r_max),
            )
        elif kind == "monodisperse":
            radius = dist_doc["radius_m"]
            if "number_density_m3" in dist_doc:
                dist = sc.Monodisperse(radius, dist_doc["number_density_m3"])
            elif lwc is None:
                return None
            else:
                dist = sc.Monodisperse.from_liquid_water(radius, lwc)
        else:
            mu, b = dist_doc["shape"], dist_doc["scale_m"]
            if "total_density_m3" in dist_doc:
                total = dist_doc["total_density_m3"]
            elif lwc is None:
                return None
            else:
                # E[r^3] of the gamma law is b^3 Gamma(mu+4)/Gamma(mu+1)
                mean_r3 = b**3 * math.exp(math.lgamma(mu + 4.0) - math.lgamma(mu + 1.0))
                total = lwc / (WATER_DENSITY * 4.0 / 3.0 * math.pi * mean_r3)
            dist = sc.ModifiedGamma(mu, b, total)
        default_t = (_DEFAULT_POPULATIONS[name].get("refractive_index") or {}).get("temperature_k", 293.15)
        return sc.ParticlePopulation(species, dist, _refractive_index(index_doc, default_t))


@dataclass(frozen=True)
class Scenario:
    geometry: lb.LinkGeometry
    bands: tuple[lb.BandConfig, ...]
    weather: atm.WeatherCondition
    atmosphere: atm.AtmosphereProfile = field(default_factory=atm.AtmosphereProfile)
    turbulence: lb.CnSquaredProfile = field(default_factory=lb.CnSquaredProfile)
    populations: Mapping[str, Mapping] = field(default_factory=lambda: dict(_DEFAULT_POPULATIONS))
    weather_sweep: tuple[atm.WeatherCondition, ...] = ()
    aerosol_scale_height: float = lb.DEFAULT_AEROSOL_SCALE_HEIGHT_KM
    output: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.bands:
            raise ScenarioError("bands", "at least one band is required")
        for i, w in enumerate((self.weather,) + tuple(self.weather_sweep)):
            path = "weather" if i == 0 else f"weather_sweep/{i - 1}"
            with _field(path):
                w.validate(self.atmosphere)
            self.populations_for(w, path)

    def band(self, label: str) -> lb.BandConfig:
        for b in self.bands:
            if b.label.value == label:
                return b
        raise KeyError(label)

    def populations_for(self, weather: atm.WeatherCondition, path: str = "weather") -> dict[sc.Species, sc.ParticlePopulation]:
        """Particle populations for ``weather``; raises if the active one is missing."""
        out = {}
        for name, doc in self.populations.items():
            pop = _population(name, doc, weather)
            if pop is not None:
                out[pop.species] = pop
        active = {atm.WeatherKind.RAIN: sc.Species.RAIN, atm.WeatherKind.FOG: sc.Species.FOG,
                  atm.WeatherKind.CLOUD: sc.Species.CLOUD}.get(weather.kind)
        if active is not None and active not in out:
            raise ScenarioError(
                f"populations/{active.value.lower()}",
                f"no population usable for {weather.label} weather",
            )
        return out

    def sweep(self) -> tuple[atm.WeatherCondition, ...]:
        return tuple(self.weather_sweep) or default_weather_sweep()

    def breakdown(self, band: lb.BandConfig, weather: atm.WeatherCondition | None = None) -> lb.AttenuationBreakdown:
        weather = weather or self.weather
        return lb.link_budget(
            self.geometry, band, weather, self.atmosphere, self.populations_for(weather),
            cn2=self.turbulence, aerosol_scale_height=self.aerosol_scale_height,
        )


def default_weather_sweep() -> tuple[atm.WeatherCondition, ...]:
    doc = default_scenario_document()
    return tuple(weather_from_dict(w, f"weather_sweep/{i}") for i, w in enumerate(doc["weather_sweep"]))


def scenario_from_dict(doc: Any) -> Scenario:
    validate_document(doc)
    bands = tuple(_band(b, i) for i, b in enumerate(doc["bands"]))
    labels = [b.label for b in bands]
    if len(set(labels)) != len(labels):
        raise ScenarioError("bands", "band labels must be unique")
    atmosphere = _atmosphere(doc.get("atmosphere", {}))
    populations = dict(_DEFAULT_POPULATIONS) if "populations" not in doc else dict(doc["populations"])
    return Scenario(
        geometry=_geometry(doc.get("geometry", {})),
        bands=bands,
        weather=weather_from_dict(doc["weather"]),
        atmosphere=atmosphere,
        turbulence=_turbulence(doc.get("turbulence", {})),
        populations=populations,
        weather_sweep=tuple(weather_from_dict(w, f"weather_sweep/{i}") for i, w in enumerate(doc.get("weather_sweep", []))),
        aerosol_scale_height=doc.get("aerosol_scale_height_km", lb.DEFAULT_AEROSOL_SCALE_HEIGHT_KM),
        output=doc.get("output", {}),
    )


def load_scenario(path=None) -> Scenario:
    """Read a scenario file; the shipped calibrated default when ``path`` is None."""
    if path is None:
        return scenario_from_dict(default_scenario_document())
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError("<root>", f"not valid JSON ({exc})") from exc
    return scenario_from_dict(doc)


def default_scenario() -> Scenario:
    return load_scenario(None)
