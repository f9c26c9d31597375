"""Physical constants and attenuation unit conversions.

All extinction coefficients are kept in Np/m internally; decibels appear
only at interfaces (absorption tables, reports).  The neper here is the
power neper: a path gain G relates to attenuation A as
G = exp(-A_np) = 10**(-A_db/10).
"""

import math

SPEED_OF_LIGHT_M_S = 299792458.0
PLANCK_J_S = 6.62607015e-34

_LN10 = math.log(10.0)


def db_to_np(db: float) -> float:
    """Power-ratio decibels to nepers."""
    return db * _LN10 / 10.0


def np_to_db(nepers: float) -> float:
    """Nepers back to power-ratio decibels."""
    return nepers * 10.0 / _LN10


def db_per_km_to_np_per_m(db_per_km: float) -> float:
    return db_to_np(db_per_km) / 1000.0


def np_per_m_to_db_per_km(np_per_m: float) -> float:
    return np_to_db(np_per_m) * 1000.0


def wavenumber(freq_hz: float) -> float:
    """Free-space angular wavenumber k = 2*pi*f/c in rad/m."""
    return 2.0 * math.pi * freq_hz / SPEED_OF_LIGHT_M_S


def photon_energy_j(freq_hz: float) -> float:
    return PLANCK_J_S * freq_hz
