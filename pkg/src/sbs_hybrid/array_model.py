"""Uniform linear array with half-wavelength spacing and patch elements.

Angles are in radians unless a name says ``_deg``. The array response
towards azimuth ``phi`` and elevation ``theta`` is::

    a_n(phi, theta) = g(phi, theta) * exp(1j * pi * n * sin(phi - broadside))

The element gain ``g`` is the amplitude form of the 3GPP single-element
pattern; elevation enters only through ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class ElementPattern:
    """3GPP patch element: parabolic cuts clamped at a floor, in dB."""

    max_gain_db: float = 8.0
    vertical_3db_deg: float = 65.0
    horizontal_3db_deg: float = 65.0
    sidelobe_floor_db: float = 30.0
    front_limit_db: float = 30.0
    boresight_azimuth_deg: float = 90.0


@dataclass(frozen=True)
class UlaConfig:
    """N-element ULA.

    ``broadside_azimuth_deg`` is the azimuth where the inter-element phase
    vanishes. The default of 90 degrees points the array broadside along the
    element boresight; 0 gives the bare ``exp(1j*pi*n*sin(phi))`` ramp.
    """

    n_antennas: int
    pattern: ElementPattern = field(default_factory=ElementPattern)
    broadside_azimuth_deg: float = 90.0
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if int(self.n_antennas) != self.n_antennas or self.n_antennas < 1:
            raise InvalidArgumentError(f"n_antennas must be a positive integer, got {self.n_antennas!r}")
        if self.spacing_wavelengths != 0.5:
            raise InvalidArgumentError("only half-wavelength spacing is supported")

    def spatial_frequency(self, azimuth):
        """Per-element phase increment divided by pi."""
        return np.sin(np.asarray(azimuth, dtype=float) - np.radians(self.broadside_azimuth_deg))


def element_gain_db(pattern: ElementPattern, azimuth, elevation=0.0):
    az = np.degrees(np.asarray(azimuth, dtype=float)) - pattern.boresight_azimuth_deg
    az = np.mod(az + 180.0, 360.0) - 180.0
    el = np.degrees(np.asarray(elevation, dtype=float))
    a_h = -np.minimum(12.0 * (az / pattern.horizontal_3db_deg) ** 2, pattern.front_limit_db)
    a_v = -np.minimum(12.0 * (el / pattern.vertical_3db_deg) ** 2, pattern.sidelobe_floor_db)
    return pattern.max_gain_db - np.minimum(-(a_h + a_v), pattern.front_limit_db)


def element_gain(pattern: ElementPattern, azimuth, elevation=0.0):
    """Amplitude gain ``10**(dB/20)`` of one element; broadcasts over angles."""
    return 10.0 ** (element_gain_db(pattern, azimuth, elevation) / 20.0)


def steering_vector(cfg: UlaConfig, azimuth: float, elevation: float = 0.0) -> np.ndarray:
    n = np.arange(cfg.n_antennas)
    g = element_gain(cfg.pattern, azimuth, elevation)
    return g * np.exp(1j * np.pi * n * cfg.spatial_frequency(azimuth))


def steering_matrix(cfg: UlaConfig, azimuths, elevation=0.0) -> np.ndarray:
    """N x K matrix whose columns are the array responses towards ``azimuths``."""
    az = np.atleast_1d(np.asarray(azimuths, dtype=float))
    n = np.arange(cfg.n_antennas)[:, None]
    g = element_gain(cfg.pattern, az, elevation)
    return g[None, :] * np.exp(1j * np.pi * n * cfg.spatial_frequency(az)[None, :])


def emitted_field(cfg: UlaConfig, y, azimuth, elevation=0.0):
    """Field ``a(phi, theta)^H y``; vectorized over azimuths and/or columns of ``y``."""
    a = steering_matrix(cfg, azimuth, elevation)
    z = a.conj().T @ np.asarray(y, dtype=complex)
    return z[0] if np.ndim(azimuth) == 0 else z


def beampattern(cfg: UlaConfig, y, azimuths) -> np.ndarray:
    """``|z(phi, 0)|`` over an azimuth grid; shape ``(len(azimuths),)`` or ``(len, T)``."""
    return np.abs(emitted_field(cfg, y, np.asarray(azimuths, dtype=float)))


@lru_cache(maxsize=32)
def _quadrature(cfg: UlaConfig, grid_deg: float):
    n_az = int(round(360.0 / grid_deg))
    n_el = int(round(180.0 / grid_deg))
    h_az = 2.0 * np.pi / n_az
    h_el = np.pi / n_el
    az = (np.arange(n_az) + 0.5) * h_az
    el = -np.pi / 2 + (np.arange(n_el) + 0.5) * h_el
    g2 = element_gain(cfg.pattern, az[:, None], el[None, :]) ** 2
    weight = (g2 * np.cos(el)[None, :]).sum(axis=1) * h_el * h_az
    n = np.arange(cfg.n_antennas)[None, :]
    ramp = np.exp(-1j * np.pi * n * cfg.spatial_frequency(az)[:, None])
    weight.flags.writeable = False
    ramp.flags.writeable = False
    return weight, ramp


def radiated_power(cfg: UlaConfig, y_block, grid_deg: float = 1.0) -> float:
    """Total radiated power ``sum_t integral |a^H y_t|^2 cos(theta)`` over the sphere.

    Midpoint rule on a uniform azimuth/elevation grid with step ``grid_deg``.
    Elevation only scales the element gain, so the elevation integral is
    folded into a per-azimuth weight.
    """
    y = np.asarray(y_block, dtype=complex)
    if y.ndim == 1:
        y = y[:, None]
    if y.shape[0] != cfg.n_antennas:
        raise InvalidArgumentError("signal length does not match the array size")
    weight, ramp = _quadrature(cfg, float(grid_deg))
    field = ramp @ y
    return float(np.sum(weight[:, None] * np.abs(field) ** 2))
