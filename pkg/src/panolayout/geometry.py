"""Spherical / equirectangular geometry and the pixel-to-ellipse distance.

Conventions used throughout:

* azimuth ``theta`` in (0, 2*pi], polar angle ``phi`` in [0, pi]
* unit sphere vector (sin(phi)cos(theta), sin(phi)sin(theta), cos(phi))
* pixel centers: theta = 2*pi*(px + 0.5)/W, phi = pi*(py + 0.5)/H, W = 2H

All functions accept scalars or numpy arrays (broadcasting) for the angular
arguments and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# below this chord length the bearing omega is undefined (pixel coincides
# with the ellipse center or its antipode); omega := 0 there by convention
SINGULAR_EPS = 1e-8


def wrap_azimuth(theta):
    """Wrap an azimuth into (0, 2*pi]. Works elementwise on arrays."""
    w = np.mod(theta, TWO_PI)
    w = np.where(w == 0.0, TWO_PI, w)
    if np.isscalar(theta) or np.ndim(theta) == 0:
        return float(w)
    return w


@dataclass(frozen=True)
class SphereCoord:
    """A point on the unit sphere: azimuth theta in (0, 2*pi], polar phi in [0, pi]."""

    theta: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_azimuth(self.theta))
        if not 0.0 <= self.phi <= np.pi:
            raise ValueError(f"phi must lie in [0, pi], got {self.phi}")


@dataclass(frozen=True)
class UnitVec:
    x: float
    y: float
    z: float

    def __post_init__(self):
        n2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(n2 - 1.0) > 1e-9:
            raise ValueError(f"not a unit vector: |v|^2 = {n2}")


@dataclass(frozen=True)
class EllipseParams:
    """Ellipse on the sphere: center (alpha, beta), in-plane rotation gamma,
    eccentricity ecc in [0, 1)."""

    alpha: float
    beta: float
    gamma: float
    ecc: float

    def __post_init__(self):
        if not 0.0 <= self.ecc < 1.0:
            raise ValueError(f"eccentricity must lie in [0, 1), got {self.ecc}")
        if not 0.0 <= self.beta <= np.pi:
            raise ValueError(f"beta must lie in [0, pi], got {self.beta}")
        object.__setattr__(self, "alpha", wrap_azimuth(self.alpha))


@dataclass(frozen=True)
class PolarCoord:
    """Angular radius rho in [0, pi] and bearing omega in (-pi, pi]."""

    rho: float
    omega: float


def check_dims(w: int, h: int) -> None:
    if w != 2 * h:
        raise ValueError(f"equirectangular grid requires W = 2H, got W={w}, H={h}")


def pixel_to_sphere(px, py, w: int, h: int):
    """Map pixel indices to sphere coordinates using the pixel-center convention.

    Returns (theta, phi) arrays (or a SphereCoord for scalar input).
    """
    check_dims(w, h)
    px = np.asarray(px)
    py = np.asarray(py)
    if np.any(px < 0) or np.any(px >= w) or np.any(py < 0) or np.any(py >= h):
        raise ValueError("pixel indices out of range")
    theta = TWO_PI * (px + 0.5) / w
    phi = np.pi * (py + 0.5) / h
    if theta.ndim == 0:
        return SphereCoord(float(theta), float(phi))
    return theta, phi


def sphere_to_unitvec(c: SphereCoord) -> UnitVec:
    x, y, z = _unitvec(c.theta, c.phi)
    return UnitVec(float(x), float(y), float(z))


def unitvec_to_sphere(v: UnitVec) -> SphereCoord:
    phi = float(np.arccos(np.clip(v.z, -1.0, 1.0)))
    theta = float(np.arctan2(v.y, v.x))
    return SphereCoord(wrap_azimuth(theta), phi)


def _unitvec(theta, phi):
    sp = np.sin(phi)
    return sp * np.cos(theta), sp * np.sin(theta), np.cos(phi)


def _polar_parts(theta, phi, alpha, beta):
    """Shared closed forms for the rotate-and-project step.

    With delta = theta - alpha:
      cos(rho) = sin(phi) sin(beta) cos(delta) + cos(phi) cos(beta)
      a = t . e_c = sin(phi) sin(delta)              (east component)
      b = t . s_c = sin(phi) cos(beta) cos(delta) - cos(phi) sin(beta)
    where e_c, s_c span the tangent plane at the center (e_c along +theta,
    s_c along +phi) and t is the tangential part of the pixel direction.
    """
    delta = theta - alpha
    sp, cp = np.sin(phi), np.cos(phi)
    sb, cb = np.sin(beta), np.cos(beta)
    sd, cd = np.sin(delta), np.cos(delta)
    cos_rho = sp * sb * cd + cp * cb
    a = sp * sd
    b = sp * cb * cd - cp * sb
    return cos_rho, a, b


def rotate_to_center_arrays(theta, phi, alpha, beta):
    """Vectorized rotate-to-center: returns (rho, omega) arrays.

    rho is the great-circle angle to (alpha, beta); omega is the bearing in
    the tangent frame at the center, measured from the +theta direction
    toward the +phi direction. omega := 0 within SINGULAR_EPS of the center
    or its antipode.
    """
    cos_rho, a, b = _polar_parts(theta, phi, alpha, beta)
    rho = np.arccos(np.clip(cos_rho, -1.0, 1.0))
    t_norm = np.hypot(a, b)
    omega = np.where(t_norm > SINGULAR_EPS, np.arctan2(b, a), 0.0)
    return rho, omega


def rotate_to_center(p: SphereCoord, center: EllipseParams | SphereCoord) -> PolarCoord:
    alpha = center.alpha if isinstance(center, EllipseParams) else center.theta
    beta = center.beta if isinstance(center, EllipseParams) else center.phi
    rho, omega = rotate_to_center_arrays(p.theta, p.phi, alpha, beta)
    return PolarCoord(float(rho), float(omega))


def eccentricity_factor(omega, gamma: float, ecc: float):
    """sqrt((1 - e^2) / (1 - e^2 cos^2(omega + gamma))), in [sqrt(1-e^2), 1]."""
    c = np.cos(omega + gamma)
    return np.sqrt((1.0 - ecc * ecc) / (1.0 - ecc * ecc * c * c))


def ellipse_distance_arrays(theta, phi, ell: EllipseParams):
    rho, omega = rotate_to_center_arrays(theta, phi, ell.alpha, ell.beta)
    return rho * eccentricity_factor(omega, ell.gamma, ell.ecc)


def ellipse_distance(p: SphereCoord, ell: EllipseParams) -> float:
    """Angular distance from a pixel direction to an ellipse, in radians.

    d = rho * sqrt((1 - e^2) / (1 - e^2 cos^2(omega + gamma))), so
    rho*sqrt(1-e^2) <= d <= rho, with d = rho exactly for circles (e = 0).
    """
    return float(ellipse_distance_arrays(p.theta, p.phi, ell))


def pixel_grid(w: int, h: int):
    """(theta, phi) arrays of shape (h, w) at every pixel center."""
    check_dims(w, h)
    theta = TWO_PI * (np.arange(w) + 0.5) / w
    phi = np.pi * (np.arange(h) + 0.5) / h
    return theta[None, :], phi[:, None]


def distance_field(ell: EllipseParams, w: int, h: int) -> np.ndarray:
    """Ellipse distance evaluated at every pixel center; shape (h, w)."""
    theta, phi = pixel_grid(w, h)
    return np.broadcast_to(
        ellipse_distance_arrays(theta, phi, ell), (h, w)
    ).copy()
