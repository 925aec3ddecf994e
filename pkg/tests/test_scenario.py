import json

import pytest

from sagin import atmosphere as atm
from sagin import linkbudget as lb
from sagin import scattering as sc
from sagin import scenario as scn


def doc():
    return scn.default_scenario_document()


def test_default_scenario_is_labelled_calibrated():
    d = doc()
    assert d["calibration"].startswith("CALIBRATED")
    s = scn.default_scenario()
    assert [b.label.value for b in s.bands] == ["mmWave", "THz", "FSO"]
    assert s.band("FSO").tx_gain > 100 and s.band("FSO").rx_gain > 100


def test_default_sweep_weathers():
    labels = [w.label for w in scn.default_scenario().sweep()]
    assert labels[:3] == ["clear", "rain", "fog"]


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d["bands"][1].__setitem__("bandwidth_hz", 0), "bands/1/bandwidth_hz"),
    (lambda d: d.__setitem__("bands", []), "bands"),
    (lambda d: d["weather"].__setitem__("kind", "hail"), "weather/kind"),
    (lambda d: d["weather"].pop("rain_rate_mm_h"), "weather"),
    (lambda d: d["geometry"].__setitem__("elevation_deg", 95), "geometry/elevation_deg"),
    (lambda d: d["bands"][0].__setitem__("carrier_freq", 1.0), "bands/0"),
    (lambda d: d["atmosphere"]["layer_bounds_km"].__setitem__("troposphere_top", 70.0), "atmosphere/layer_bounds_km"),
    (lambda d: d["populations"].pop("rain"), "populations/rain"),
    (lambda d: d["weather"].__setitem__("rain_top_km", 20.0), "weather"),
])
def test_schema_errors_name_the_field(mutate, field):
    d = doc()
    mutate(d)
    with pytest.raises(scn.ScenarioError) as info:
        scn.scenario_from_dict(d)
    assert info.value.field == field
    assert field in str(info.value)


def test_populations_follow_the_weather():
    s = scn.default_scenario()
    rain = s.populations_for(atm.WeatherCondition.rain(10.0))
    assert rain[sc.Species.RAIN].distribution.slope == pytest.approx(4.1 * 10.0**-0.21)
    fog = s.populations_for(atm.WeatherCondition.fog(0.2))
    assert fog[sc.Species.FOG].distribution == sc.Monodisperse.from_liquid_water(2e-5, 0.2)
    assert sc.Species.RAIN not in fog and sc.Species.AEROSOL in fog


def test_modified_gamma_from_liquid_water():
    d = doc()
    d["weather"] = {"kind": "cloud", "cloud_liquid_water_g_m3": 0.3}
    d["populations"]["cloud"]["distribution"] = {"type": "modified_gamma", "shape": 6.0, "scale_m": 1e-6}
    s = scn.scenario_from_dict(d)
    dist = s.populations_for(s.weather)[sc.Species.CLOUD].distribution
    import numpy as np
    r = np.linspace(1e-9, 60e-6, 200001)
    n = np.array([dist.density(x) for x in r])
    lwc = np.trapezoid(n * 4 / 3 * np.pi * r**3, r) * 1e6
    assert lwc == pytest.approx(0.3, rel=1e-4)


def test_missing_populations_block_uses_defaults():
    d = doc()
    d.pop("populations")
    s = scn.scenario_from_dict(d)
    assert sc.Species.RAIN in s.populations_for(s.weather)


def test_breakdown_matches_direct_link_budget():
    s = scn.default_scenario()
    band = s.band("THz")
    direct = lb.link_budget(s.geometry, band, s.weather, s.atmosphere, s.populations_for(s.weather), cn2=s.turbulence)
    assert s.breakdown(band).per_factor == direct.per_factor


def test_load_from_file_and_bad_json(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc()))
    assert scn.load_scenario(path).weather.kind is atm.WeatherKind.RAIN
    path.write_text("{not json")
    with pytest.raises(scn.ScenarioError):
        scn.load_scenario(path)


def test_weather_round_trip():
    for w in scn.default_scenario().sweep():
        assert scn.weather_from_dict(scn.weather_to_dict(w)) == w
