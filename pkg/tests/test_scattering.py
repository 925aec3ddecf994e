import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sagin import scattering as sc
from sagin.constants import SPEED_OF_LIGHT
from sagin.errors import ConfigError, DomainError, ResourceError

from oracles import mie_qext_qsca, trapezoid_attenuation


def test_size_parameter_and_regime():
    assert sc.size_parameter(20e-6, SPEED_OF_LIGHT / 2e10) == pytest.approx(0.008383, rel=1e-3)
    assert sc.regime(0.0999) is sc.Regime.RAYLEIGH
    assert sc.regime(0.1) is sc.Regime.MIE


def test_series_length():
    assert sc.series_length(10.0) == math.ceil(10 + 4 * 10 ** (1 / 3) + 2)


def test_term_cap_raises_resource_error():
    with pytest.raises(ResourceError):
        sc.mie_efficiencies(1e5, 1.33 + 0.01j)


def test_invalid_inputs():
    with pytest.raises(DomainError):
        sc.size_parameter(-1.0, 1e-3)
    with pytest.raises(DomainError):
        sc.mie_efficiencies(0.0, 1.33 + 0j)
    with pytest.raises(DomainError):
        sc.rayleigh_efficiencies(0.01, 1j * math.sqrt(2.0))


@pytest.mark.parametrize("alpha,m", [(0.2, 7.0 + 2.5j), (3.0, 1.33 + 0j), (25.0, 1.315 + 1e-4j)])
def test_mie_matches_bessel_oracle(alpha, m):
    r = sc.mie_efficiencies(alpha, m)
    q_ext, q_sca = mie_qext_qsca(alpha, m)
    assert r.q_ext == pytest.approx(q_ext, rel=1e-8)
    assert r.q_sca == pytest.approx(q_sca, rel=1e-8)


def test_non_absorbing_sphere_has_no_absorption():
    r = sc.mie_efficiencies(7.0, 1.5 + 0j)
    assert r.q_abs == 0.0 and r.q_sca == r.q_ext


@given(st.floats(1e-4, 0.01), st.floats(1.2, 9.0), st.floats(0.0, 3.0))
def test_rayleigh_limit_of_mie(alpha, re, im):
    m = complex(re, im)
    mie = sc.mie_efficiencies(alpha, m)
    ray = sc.rayleigh_efficiencies(alpha, m)
    assert mie.q_ext == pytest.approx(ray.q_ext, rel=1e-2)


@pytest.mark.parametrize("alpha", [100.0, 250.0, 500.0])
def test_extinction_paradox(alpha):
    q = sc.mie_efficiencies(alpha, 1.33 + 0.05j).q_ext
    assert 1.8 <= q <= 2.5


def test_extinction_cross_section_scales_with_area():
    res = sc.extinction(2e-3, SPEED_OF_LIGHT / 3e11, sc.WaterRefractiveIndex()(3e11))
    assert res.sigma_ext == pytest.approx(res.q_ext * math.pi * 4e-6)


def test_water_index_models():
    water = sc.WaterRefractiveIndex(293.15)
    # single Debye relaxation near 17 GHz at 20 C: eps ~ 37 - 37j at 20 GHz
    eps = water.permittivity(2e10)
    assert 33 < eps.real < 41 and 32 < eps.imag < 41
    assert water(2e10) ** 2 == pytest.approx(eps)
    assert water(1.934e14) == complex(1.315, 1e-4)
    with pytest.raises(DomainError):
        water(5e13)


def test_monodisperse_from_liquid_water():
    d = sc.Monodisperse.from_liquid_water(10e-6, 0.1)
    mass = d.number_density * 4 / 3 * math.pi * (10e-6) ** 3 * 1e6
    assert mass == pytest.approx(0.1)


def test_marshall_palmer_liquid_water_against_closed_form():
    # W = rho_w pi/6 N0 6/Lambda^4 in consistent units; here integrate numerically over radius
    mp = sc.MarshallPalmer.from_rain_rate(10.0, r_min=1e-7, r_max=2e-2)
    r = np.geomspace(mp.r_min, mp.r_max, 200001)
    n = np.array([mp.density(x) for x in r])
    w_num = np.trapezoid(n * 4 / 3 * np.pi * r**3, r) * 1e6
    lam_per_m = mp.slope * 1e3
    w_closed = 1e6 * np.pi / 6 * (mp.n0 * 1e3) * 6 / lam_per_m**4
    assert w_num == pytest.approx(w_closed, rel=1e-4)


def test_rain_specific_attenuation_matches_dense_trapezoid():
    pop = sc.rain_population(25.0)
    f = 3e11
    wl = SPEED_OF_LIGHT / f
    m = pop.refractive_index(f)
    ref = trapezoid_attenuation(
        pop.distribution.density,
        lambda r: sc.mie_efficiencies(sc.size_parameter(r, wl), m).q_ext * math.pi * r * r,
        *pop.distribution.bounds(), n=4001,
    )
    assert sc.specific_attenuation(pop, f) == pytest.approx(ref, rel=1e-3)


def test_modified_gamma_against_trapezoid():
    pop = sc.ParticlePopulation(sc.Species.CLOUD, sc.ModifiedGamma(6.0, 1e-6, 1e8), sc.WaterRefractiveIndex(273.15))
    f = 3e11
    wl = SPEED_OF_LIGHT / f
    m = pop.refractive_index(f)
    ref = trapezoid_attenuation(
        pop.distribution.density,
        lambda r: sc.extinction(r, wl, m).sigma_ext,
        *pop.distribution.bounds(),
    )
    assert sc.specific_attenuation(pop, f) == pytest.approx(ref, rel=1e-4)


def test_specific_attenuation_linear_in_number_density():
    pop = sc.fog_population(0.1)
    a = sc.specific_attenuation(pop, 3e11)
    assert sc.specific_attenuation(pop.scaled(3.0), 3e11) == pytest.approx(3 * a, rel=1e-12)


def test_fso_rain_uses_geometric_limit_and_converges():
    gamma = sc.specific_attenuation(sc.rain_population(25.0), 1.934e14)
    # Q_ext -> 2 for all drops: compare with 2 * pi r^2 integrated in closed form
    mp = sc.MarshallPalmer.from_rain_rate(25.0)
    ref = trapezoid_attenuation(mp.density, lambda r: 2 * math.pi * r * r, mp.r_min, mp.r_max)
    assert gamma == pytest.approx(ref, rel=0.02)


def test_fog_barely_affects_thz_but_rain_does():
    fog = sc.specific_attenuation(sc.fog_population(0.1), 3e11)
    rain = sc.specific_attenuation(sc.rain_population(25.0), 3e11)
    assert rain > 10 * fog


def test_invalid_distributions():
    with pytest.raises(ConfigError):
        sc.MarshallPalmer.from_rain_rate(0.0)
    with pytest.raises(ConfigError):
        sc.Monodisperse(0.0, 1.0)
