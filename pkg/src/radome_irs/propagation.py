"""Array responses, angle transforms, element gains, and LoS gains.

All operations are pure.  Directions follow the convention
u = (sin(theta)*sin(phi), cos(theta), sin(theta)*cos(phi)) with theta the
polar angle from the +y boresight and phi the azimuth in the x-z plane
measured from +z toward +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SURFACE_NORMALS

ELEMENT_WISE = "element-wise"
FAR_FIELD_ISOTROPIC = "far-field-isotropic"


@dataclass(frozen=True)
class Direction:
    """Arrival direction seen from the antenna array."""

    theta: float  # polar from +y, [0, pi]
    phi: float  # azimuth from +z toward +x, [0, 2pi)

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.sin(self.phi), math.cos(self.theta), st * math.cos(self.phi)]
        )

    @classmethod
    def from_unit_vector(cls, u) -> "Direction":
        u = np.asarray(u, dtype=float)
        theta = math.acos(min(1.0, max(-1.0, u[1])))
        phi = math.atan2(u[0], u[2]) % (2 * math.pi)
        return cls(theta, phi)


@dataclass(frozen=True)
class IrsAngles:
    """Elevation from a surface normal and azimuth in the surface plane."""

    theta: float  # [0, pi]
    phi: float  # [0, 2pi)


def steering_vector(phi: float, m_bar: int) -> np.ndarray:
    """1D array response: entry m is exp(i*(m-1)*pi*phi)."""
    if m_bar < 1:
        raise ValueError("m_bar must be >= 1")
    return np.exp(1j * np.pi * phi * np.arange(m_bar))


def direction_cosines(u: np.ndarray, local_surface: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(cos(theta_hat), sin*cos(phi_hat), sin*sin(phi_hat)) for surface 1..4.

    Vectorized over leading axes of ``u`` (shape (..., 3)).
    """
    u = np.asarray(u, dtype=float)
    normal = SURFACE_NORMALS[local_surface - 1]
    cos_t = u @ normal
    sc = u[..., 1]  # component along y for every orientation
    ss = u[..., 2] if local_surface in (1, 2) else u[..., 0]
    return cos_t, sc, ss


def aoa_transform(direction: Direction, surface: int) -> IrsAngles:
    """Map an array-frame arrival direction to surface-frame angles."""
    if surface not in (1, 2, 3, 4):
        raise ValueError("surface must be in 1..4")
    cos_t, sc, ss = direction_cosines(direction.unit_vector, surface)
    theta = math.acos(min(1.0, max(-1.0, float(cos_t))))
    sin_t = math.sin(theta)
    if sin_t < 1e-15:
        phi = 0.0  # degenerate: the array-response exponent vanishes anyway
    else:
        phi = math.atan2(float(ss), float(sc)) % (2 * math.pi)
    return IrsAngles(theta, phi)


def irs_array_response(
    angles: IrsAngles,
    n_row: int,
    n_col: int,
    d_i: float,
    wavelength: float,
    initial_phase: float = 0.0,
) -> complex:
    """Unit-modulus response of one reflecting element (1-based row/column)."""
    if n_row < 1 or n_col < 1:
        raise ValueError("element indices are 1-based")
    st = math.sin(angles.theta)
    exponent = (
        math.pi
        * (2 * d_i / wavelength)
        * ((n_row - 1) * st * math.cos(angles.phi) + (n_col - 1) * st * math.sin(angles.phi))
    )
    return complex(np.exp(1j * (initial_phase + exponent)))


def element_reflection_gain(
    theta_a: float,
    theta_d: float,
    area: float,
    wavelength: float,
    mode: str = ELEMENT_WISE,
) -> float:
    """Linear power reflection gain; exactly 0 outside the front half-space."""
    if not (0.0 <= theta_a <= math.pi and 0.0 <= theta_d <= math.pi):
        raise ValueError("angles must lie in [0, pi]")
    if theta_a >= math.pi / 2 or theta_d >= math.pi / 2:
        return 0.0
    if mode == FAR_FIELD_ISOTROPIC:
        return 2.0
    if mode != ELEMENT_WISE:
        raise ValueError(f"unknown mode {mode!r}")
    aperture = area / (wavelength**2 / (4 * math.pi))
    return 2.0 * aperture * math.cos(theta_a) * aperture * math.cos(theta_d)


def half_gain_factor(cos_theta, area: float, wavelength: float, mode: str = ELEMENT_WISE):
    """Per-angle factor g(theta) with sqrt(G(a,d)) = sqrt(2)*g(a)*g(d).

    Vectorized; zero whenever cos(theta) <= 0, which realises the hard
    half-space zeroing of the reflection gain on both modes.
    """
    cos_theta = np.asarray(cos_theta, dtype=float)
    if mode == FAR_FIELD_ISOTROPIC:
        return (cos_theta > 0.0).astype(float)
    if mode != ELEMENT_WISE:
        raise ValueError(f"unknown mode {mode!r}")
    aperture = area / (wavelength**2 / (4 * math.pi))
    return np.sqrt(aperture * np.clip(cos_theta, 0.0, None))


_G_MAX_DB = 8.0
_A_M_DB = 30.0
_THETA_3DB_DEG = 65.0


def antenna_gain_from_unit(u, pattern: str):
    """Linear antenna power gain for direction(s) u, shape (..., 3)."""
    u = np.asarray(u, dtype=float)
    if pattern == "isotropic":
        return np.ones(u.shape[:-1]) if u.ndim > 1 else 1.0
    if pattern != "tr38901":
        raise ValueError(f"unknown pattern {pattern!r}")
    # Sectorised mapping: boresight +y, up +z.
    theta_pp = np.degrees(np.arccos(np.clip(u[..., 2], -1.0, 1.0)))
    phi_pp = np.degrees(np.arctan2(u[..., 0], u[..., 1]))
    a_v = -np.minimum(12.0 * ((theta_pp - 90.0) / _THETA_3DB_DEG) ** 2, _A_M_DB)
    a_h = -np.minimum(12.0 * (phi_pp / _THETA_3DB_DEG) ** 2, _A_M_DB)
    gain_db = _G_MAX_DB - np.minimum(-(a_v + a_h), _A_M_DB)
    return 10.0 ** (gain_db / 10.0)


def antenna_gain(direction: Direction, pattern: str) -> float:
    return float(antenna_gain_from_unit(direction.unit_vector, pattern))


def los_gain(p_a, p_b, wavelength: float):
    """Free-space LoS complex gain (lambda/(4*pi*d)) * exp(-i*2*pi*d/lambda).

    Accepts broadcastable arrays of points with shape (..., 3); rejects
    coincident points.
    """
    p_a = np.asarray(p_a, dtype=float)
    p_b = np.asarray(p_b, dtype=float)
    d = np.linalg.norm(p_a - p_b, axis=-1)
    if np.any(d == 0.0):
        raise ValueError("coincident points have no LoS gain")
    gain = (wavelength / (4 * np.pi * d)) * np.exp(-1j * 2 * np.pi * d / wavelength)
    return complex(gain) if gain.ndim == 0 else gain
