"""Physical constants (CODATA 2018) and unit helpers."""

import math

SPEED_OF_LIGHT = 299_792_458.0  # m/s
BOLTZMANN = 1.380649e-23  # J/K
AVOGADRO = 6.02214076e23  # 1/mol
ELEMENTARY_CHARGE = 1.602176634e-19  # C
ELECTRON_MASS = 9.1093837015e-31  # kg
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg

STANDARD_GRAVITY = 9.80665  # m/s^2
MOLAR_MASS_DRY_AIR = 0.0289644  # kg/mol
GAS_CONSTANT = 8.314462618  # J/(mol K)
MOLAR_MASS_WATER = 18.01528  # g/mol
WATER_DENSITY = 1.0e6  # g/m^3

#: dB per neper of field attenuation on an intensity scale, 10 / ln(10).
DB_PER_NEPER = 10.0 / math.log(10.0)


def wavelength(frequency: float) -> float:
    """Free-space wavelength in metres for a frequency in Hz."""
    return SPEED_OF_LIGHT / frequency


def frequency_from_wavelength(wavelength_m: float) -> float:
    return SPEED_OF_LIGHT / wavelength_m


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)
