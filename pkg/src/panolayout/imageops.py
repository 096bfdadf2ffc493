"""Panorama-aware raster operations.

Horizontal circular padding and seam-blind convolution, circular shifting,
seeded panoramic augmentation that co-transforms a scene layout, and
equirect-to-perspective reprojection with bilinear sampling.

Images are (H, W) or (H, W, C) float arrays; the horizontal axis is axis 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import correlate2d

from .geometry import TWO_PI, wrap_azimuth
from .layout import SceneLayout


@dataclass(frozen=True)
class Kernel2D:
    """Convolution kernel with odd extents so padding floor(k/2) centers it."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError("kernel must be 2-D")
        if w.shape[0] % 2 == 0 or w.shape[1] % 2 == 0:
            raise ValueError(f"kernel extents must be odd, got {w.shape}")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class PerspectiveCamera:
    yaw: float
    pitch: float
    roll: float
    hfov: float
    out_w: int
    out_h: int

    def __post_init__(self):
        if not 0.0 < self.hfov < np.pi:
            raise ValueError(f"hfov must lie in (0, pi), got {self.hfov}")
        if self.out_w <= 0 or self.out_h <= 0:
            raise ValueError("output dimensions must be positive")


@dataclass(frozen=True)
class AugmentRecord:
    t: int
    flip: bool
    seed: int

    def to_json(self) -> str:
        return json.dumps({"t": self.t, "flip": self.flip, "seed": self.seed})

    @classmethod
    def from_json(cls, text: str) -> "AugmentRecord":
        doc = json.loads(text)
        return cls(t=int(doc["t"]), flip=bool(doc["flip"]), seed=int(doc["seed"]))


def circular_pad(img: np.ndarray, pad: int) -> np.ndarray:
    """Pad `pad` columns on each side by wrapping around the seam."""
    img = np.asarray(img)
    w = img.shape[1]
    if pad < 0:
        raise ValueError("pad must be non-negative")
    if pad > w:
        raise ValueError(f"pad {pad} exceeds image width {w}")
    if pad == 0:
        return img.copy()
    return np.concatenate([img[:, w - pad:], img, img[:, :pad]], axis=1)


def circshift(img: np.ndarray, t: int) -> np.ndarray:
    """Circularly shift columns so output column x shows input column (x - t) mod W."""
    return np.roll(np.asarray(img), t, axis=1)


def conv2d_circular(img: np.ndarray, kernel: Kernel2D) -> np.ndarray:
    """Cross-correlation with horizontal circular and vertical zero padding.

    Output has the same W x H as the input, and commutes with circshift
    exactly (seam blindness).
    """
    img = np.asarray(img, dtype=np.float64)
    kh, kw = kernel.weights.shape
    ph, pw = kh // 2, kw // 2
    squeeze = img.ndim == 2
    if squeeze:
        img = img[:, :, None]
    padded = circular_pad(img, pw)
    padded = np.pad(padded, ((ph, ph), (0, 0), (0, 0)))
    # correlate2d(mode="valid") with the unflipped kernel is cross-correlation
    out = np.stack(
        [correlate2d(padded[:, :, c], kernel.weights, mode="valid") for c in range(img.shape[2])],
        axis=-1,
    )
    return out[:, :, 0] if squeeze else out


def flip_image(img: np.ndarray) -> np.ndarray:
    """Mirror horizontally: output column x shows input column W-1-x."""
    return np.asarray(img)[:, ::-1].copy()


def shift_layout(layout: SceneLayout, t: int) -> SceneLayout:
    """Co-transform for circshift by t columns: alpha_i += 2*pi*t/W."""
    d_alpha = TWO_PI * t / layout.width
    objs = tuple(
        replace(o, ellipse=replace(o.ellipse, alpha=wrap_azimuth(o.ellipse.alpha + d_alpha)))
        for o in layout.objects
    )
    return replace(layout, objects=objs)


def flip_layout(layout: SceneLayout) -> SceneLayout:
    """Co-transform for a horizontal mirror: alpha -> 2*pi - alpha, gamma -> -gamma."""
    objs = tuple(
        replace(
            o,
            ellipse=replace(
                o.ellipse,
                alpha=wrap_azimuth(TWO_PI - o.ellipse.alpha),
                gamma=-o.ellipse.gamma,
            ),
        )
        for o in layout.objects
    )
    return replace(layout, objects=objs)


def augment(img: np.ndarray, layout: SceneLayout, seed: int):
    """Seeded panoramic augmentation: random circular shift + optional flip.

    PRNG semantics (fixed for replayability): rng = numpy default_rng(seed);
    t = rng.integers(0, W); flip = bool(rng.integers(0, 2)). The shift is
    applied first, then the flip, to both the image and the layout.

    Returns (image, layout, AugmentRecord).
    """
    img = np.asarray(img)
    h, w = img.shape[:2]
    if (layout.width, layout.height) != (w, h):
        raise ValueError(
            f"layout dimensions {layout.width}x{layout.height} != image {w}x{h}"
        )
    rng = np.random.default_rng(seed)
    t = int(rng.integers(0, w))
    flip = bool(rng.integers(0, 2))
    out_img = circshift(img, t)
    out_layout = shift_layout(layout, t)
    if flip:
        out_img = flip_image(out_img)
        out_layout = flip_layout(out_layout)
    return out_img, out_layout, AugmentRecord(t=t, flip=flip, seed=seed)


def camera_rotation(cam: PerspectiveCamera) -> np.ndarray:
    """World-from-camera rotation. Camera base frame: forward +x (azimuth 0
    on the equator), right +y (increasing azimuth), up +z."""
    cy, sy = np.cos(cam.yaw), np.sin(cam.yaw)
    cp, sp = np.cos(cam.pitch), np.sin(cam.pitch)
    cr, sr = np.cos(cam.roll), np.sin(cam.roll)
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    # R_y(-pitch): positive pitch tilts the forward axis toward +z (up)
    ry = np.array([[cp, 0.0, -sp], [0.0, 1.0, 0.0], [sp, 0.0, cp]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    return rz @ ry @ rx


def camera_rays(cam: PerspectiveCamera) -> np.ndarray:
    """World-space ray directions per output pixel, shape (out_h, out_w, 3)."""
    focal = (cam.out_w / 2.0) / np.tan(cam.hfov / 2.0)
    u = (np.arange(cam.out_w) + 0.5) - cam.out_w / 2.0
    v = (np.arange(cam.out_h) + 0.5) - cam.out_h / 2.0
    uu, vv = np.meshgrid(u, v)
    rays = np.stack([np.full_like(uu, focal), uu, -vv], axis=-1)
    return rays @ camera_rotation(cam).T


def sample_bilinear_wrap(img: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Bilinear sample at continuous pixel coords; x wraps, y clamps."""
    img = np.asarray(img, dtype=np.float64)
    squeeze = img.ndim == 2
    if squeeze:
        img = img[:, :, None]
    h, w = img.shape[:2]
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]
    x0w, x1w = np.mod(x0, w), np.mod(x0 + 1, w)
    y0c, y1c = np.clip(y0, 0, h - 1), np.clip(y0 + 1, 0, h - 1)
    out = (
        img[y0c, x0w] * (1 - fx) * (1 - fy)
        + img[y0c, x1w] * fx * (1 - fy)
        + img[y1c, x0w] * (1 - fx) * fy
        + img[y1c, x1w] * fx * fy
    )
    return out[..., 0] if squeeze else out


def directions_to_pixels(dirs: np.ndarray, w: int, h: int):
    """Continuous equirect pixel coordinates for world direction vectors."""
    norm = np.linalg.norm(dirs, axis=-1)
    theta = np.mod(np.arctan2(dirs[..., 1], dirs[..., 0]), TWO_PI)
    phi = np.arccos(np.clip(dirs[..., 2] / norm, -1.0, 1.0))
    x = theta / TWO_PI * w - 0.5
    y = phi / np.pi * h - 0.5
    return x, y


def project_perspective(img: np.ndarray, cam: PerspectiveCamera) -> np.ndarray:
    """Render a pinhole perspective view of an equirectangular panorama."""
    img = np.asarray(img)
    h, w = img.shape[:2]
    if w != 2 * h:
        raise ValueError(f"panorama must be 2:1, got {w}x{h}")
    x, y = directions_to_pixels(camera_rays(cam), w, h)
    return sample_bilinear_wrap(img, x, y)
