"""Thermal radiation budget inside the shield and amplifier brightness temperature."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cryoamp.constants import C_LIGHT, H, K_B

SHIELD_AREA = 1.25e-2  # m^2, inner shield cylinder plus sample holder
# Bandwidth that reproduces the tabulated photon rates; the rates scale linearly with it.
TABLE_BANDWIDTH = 1e9  # Hz
TABLE_FREQUENCIES = (8e9, 10e9, 12e9, 15e9)
TABLE_TEMPERATURES = (0.010, 0.020, 0.030)


def spectral_radiance(f, t):
    """Planck spectral radiance B_f in W m^-2 Hz^-1 sr^-1; zero at t = 0."""
    f = np.asarray(f, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    if np.any(t < 0):
        raise ValueError("temperature must be non-negative")
    with np.errstate(divide="ignore", over="ignore"):
        x = np.where(t > 0, H * f / (K_B * np.where(t > 0, t, 1.0)), np.inf)
        b = 2 * H * f**3 / C_LIGHT**2 / np.expm1(x)
    b = np.where(t > 0, b, 0.0)
    return float(b) if b.ndim == 0 else b


def log10_spectral_radiance(f: float, t: float) -> float:
    """log10 B_f, valid far into the Wien tail where B_f underflows."""
    if t <= 0:
        return -math.inf
    x = H * f / (K_B * t)
    log_expm1 = x + math.log1p(-math.exp(-x)) if x > 1 else math.log(math.expm1(x))
    return (math.log(2 * H * f**3 / C_LIGHT**2) - log_expm1) / math.log(10)


@dataclass(frozen=True)
class PhotonBudget:
    f: float
    t: float
    area: float
    bandwidth: float
    radiance: float
    power_density: float  # W/Hz
    rate: float  # photons/s


def photon_rate(f: float, t: float, area: float = SHIELD_AREA, bandwidth: float = TABLE_BANDWIDTH) -> PhotonBudget:
    """Thermal photon generation rate of a Lambertian wall of ``area`` within ``bandwidth``."""
    if not (area > 0 and bandwidth > 0):
        raise ValueError("area and bandwidth must be positive")
    b = spectral_radiance(f, t)
    p = math.pi * area * b
    return PhotonBudget(f, t, area, bandwidth, b, p, p * bandwidth / (H * f))


def photon_table(
    frequencies=TABLE_FREQUENCIES,
    temperatures=TABLE_TEMPERATURES,
    area: float = SHIELD_AREA,
    bandwidth: float = TABLE_BANDWIDTH,
) -> list[PhotonBudget]:
    return [photon_rate(f, t, area, bandwidth) for t in temperatures for f in frequencies]


def human_rate(rate: float) -> str:
    """Rate in the most readable unit: per s, per min, per h, or one photon per N days/years."""
    if rate >= 1:
        return f"{rate:.3g} photon/s"
    if rate * 60 >= 1:
        return f"{rate * 60:.3g} photon/min"
    if rate * 3600 >= 1:
        return f"{rate * 3600:.3g} photon/h"
    if rate <= 0:
        return "0"
    days = 1 / rate / 86400
    if days < 365:
        return f"1 photon/{days:.3g} days"
    return f"1 photon/{days / 365.25:.3g} years"


@dataclass(frozen=True)
class RadianceReduction:
    ratio: float  # B(f, t_hot) / B(f, t_cold)
    orders: float  # log10 of ratio
    wideband_ratio: float  # (t_hot / t_cold)^4
    wideband_orders: float


def radiance_reduction(f: float, t_hot: float, t_cold: float) -> RadianceReduction:
    """Narrow-band and wide-band (Stefan-Boltzmann) fall of radiation on cooling."""
    if not t_hot > t_cold > 0:
        raise ValueError("need t_hot > t_cold > 0")
    orders = log10_spectral_radiance(f, t_hot) - log10_spectral_radiance(f, t_cold)
    wide = (t_hot / t_cold) ** 4
    return RadianceReduction(10.0**orders, orders, wide, 4 * math.log10(t_hot / t_cold))


def brightness_temperature(t_g: float, t_d: float, s12_db: float) -> float:
    """T_b = T_g + |S12| T_d with |S12| taken as a power ratio 10^(dB/10)."""
    if t_g < 0 or t_d < 0:
        raise ValueError("temperatures must be non-negative")
    if s12_db > 0:
        raise ValueError("s12_db must be <= 0 for a passive backward path")
    return t_g + 10.0 ** (s12_db / 10.0) * t_d
