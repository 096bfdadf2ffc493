"""Object vectors, alpha compositing into the layout map, and manipulations.

A scene is an ordered list of objects; index 0 is the backmost and index
n-1 the frontmost. The rendered map at a pixel is

    L = sum_i f_i * o_i * prod_{k>i} (1 - o_k),   o_i = sigmoid(s_i - d_i)

with d_i the ellipse distance of the pixel to object i.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit

from .geometry import (
    EllipseParams,
    ellipse_distance_arrays,
    pixel_grid,
    wrap_azimuth,
)

# "removing" an object just drives its size very negative so the opacity
# vanishes everywhere (o < 5e-5 even at d = 0)
REMOVED_SIZE = -10.0


@dataclass(frozen=True)
class ObjectVector:
    """One latent object: spherical ellipse, size s, and feature vector f.

    s shares angular units with the ellipse distance d, since the opacity
    is sigmoid(s - d).
    """

    ellipse: EllipseParams
    size: float
    features: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        if f.ndim != 1:
            raise ValueError("features must be a 1-D vector")
        object.__setattr__(self, "features", f)


@dataclass(frozen=True)
class SceneLayout:
    """Immutable scene document: objects plus render dimensions.

    d_u + d_y = d_f splits each feature vector into structure and style
    channels. Compositing order is the list order (last object frontmost).
    """

    d_f: int
    d_u: int
    d_y: int
    width: int
    height: int
    objects: tuple[ObjectVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if self.d_u + self.d_y != self.d_f:
            raise ValueError("d_u + d_y must equal d_f")
        if self.d_u < 0 or self.d_y < 0:
            raise ValueError("channel counts must be non-negative")
        if self.width != 2 * self.height:
            raise ValueError("layout requires width = 2 * height")
        for obj in self.objects:
            if obj.features.shape != (self.d_f,):
                raise ValueError(
                    f"object feature length {obj.features.shape[0]} != d_f={self.d_f}"
                )

    @property
    def n(self) -> int:
        return len(self.objects)


@dataclass(frozen=True)
class LayoutMap:
    """Rendered W x H x d grid, stored as a (H, W, d) float array."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3:
            raise ValueError("layout map must be (H, W, d)")
        if not np.all(np.isfinite(v)):
            raise ValueError("layout map contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]


def opacity(s, d):
    """sigmoid(s - d), computed stably for large |s - d|."""
    x = np.asarray(s, dtype=np.float64) - np.asarray(d, dtype=np.float64)
    out = expit(x)
    if np.isscalar(s) and np.isscalar(d):
        return float(out)
    return out


def opacity_fields(layout: SceneLayout) -> np.ndarray:
    """Per-object opacity grids, shape (n, H, W)."""
    theta, phi = pixel_grid(layout.width, layout.height)
    fields = np.empty((layout.n, layout.height, layout.width))
    for i, obj in enumerate(layout.objects):
        d = ellipse_distance_arrays(theta, phi, obj.ellipse)
        fields[i] = opacity(obj.size, d)
    return fields


def _composite_weights(opac: np.ndarray) -> np.ndarray:
    """w_i = o_i * prod_{k>i}(1 - o_k) per pixel; shape (n, H, W)."""
    n = opac.shape[0]
    trans = np.ones_like(opac)
    # suffix transmittance: trans[i] = prod_{k>i} (1 - o_k)
    for i in range(n - 2, -1, -1):
        trans[i] = trans[i + 1] * (1.0 - opac[i + 1])
    return opac * trans


def composite(layout: SceneLayout) -> LayoutMap:
    """Alpha-composite all objects into the (H, W, d_f) layout map."""
    h, w, df = layout.height, layout.width, layout.d_f
    if layout.n == 0:
        return LayoutMap(np.zeros((h, w, df)))
    weights = _composite_weights(opacity_fields(layout))
    feats = np.stack([obj.features for obj in layout.objects])  # (n, d_f)
    flat = weights.reshape(layout.n, h * w)
    vals = (flat.T @ feats).reshape(h, w, df)
    return LayoutMap(vals)


def composite_weight(layout: SceneLayout) -> np.ndarray:
    """Total per-pixel composite weight sum_i o_i prod_{k>i}(1-o_k), shape (H, W).

    Telescopes to 1 - prod_i (1 - o_i), so it always lies in [0, 1].
    """
    if layout.n == 0:
        return np.zeros((layout.height, layout.width))
    return _composite_weights(opacity_fields(layout)).sum(axis=0)


def split(lmap: LayoutMap, d_u: int, d_y: int) -> tuple[LayoutMap, LayoutMap]:
    """Slice the map into structure channels [0, d_u) and style [d_u, d)."""
    if d_u + d_y != lmap.channels:
        raise ValueError("d_u + d_y must equal the channel count")
    if d_u < 0 or d_y < 0:
        raise ValueError("channel counts must be non-negative")
    return LayoutMap(lmap.values[:, :, :d_u]), LayoutMap(lmap.values[:, :, d_u:])


def _translated(ell: EllipseParams, d_alpha: float, d_beta: float) -> EllipseParams:
    alpha = ell.alpha + d_alpha
    beta = ell.beta + d_beta
    # reflect at the poles (crossing a pole lands on the opposite meridian)
    beta = np.mod(beta, 2.0 * np.pi)
    if beta > np.pi:
        beta = 2.0 * np.pi - beta
        alpha += np.pi
    return replace(ell, alpha=wrap_azimuth(alpha), beta=float(beta))


def _check_index(layout: SceneLayout, i: int) -> int:
    """Object indices are 1-based in manipulation ops."""
    if not 1 <= i <= layout.n:
        raise IndexError(f"object index {i} out of range 1..{layout.n}")
    return i - 1


def _with_object(layout: SceneLayout, idx: int, obj: ObjectVector) -> SceneLayout:
    objs = list(layout.objects)
    objs[idx] = obj
    return replace(layout, objects=tuple(objs))


def remove(layout: SceneLayout, i: int) -> SceneLayout:
    idx = _check_index(layout, i)
    return _with_object(layout, idx, replace(layout.objects[idx], size=REMOVED_SIZE))


def translate(layout: SceneLayout, i: int, d_alpha: float, d_beta: float) -> SceneLayout:
    idx = _check_index(layout, i)
    obj = layout.objects[idx]
    return _with_object(layout, idx, replace(obj, ellipse=_translated(obj.ellipse, d_alpha, d_beta)))


def resize(layout: SceneLayout, i: int, d_s: float) -> SceneLayout:
    idx = _check_index(layout, i)
    obj = layout.objects[idx]
    return _with_object(layout, idx, replace(obj, size=obj.size + d_s))


def rotate(layout: SceneLayout, i: int, d_gamma: float) -> SceneLayout:
    idx = _check_index(layout, i)
    obj = layout.objects[idx]
    ell = replace(obj.ellipse, gamma=obj.ellipse.gamma + d_gamma)
    return _with_object(layout, idx, replace(obj, ellipse=ell))


def set_ecc(layout: SceneLayout, i: int, e: float) -> SceneLayout:
    idx = _check_index(layout, i)
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity must lie in [0, 1), got {e}")
    obj = layout.objects[idx]
    return _with_object(layout, idx, replace(obj, ellipse=replace(obj.ellipse, ecc=e)))


def object_distance_field(layout: SceneLayout, i: int) -> np.ndarray:
    """Ellipse-distance grid of object i (1-based), shape (H, W)."""
    idx = _check_index(layout, i)
    theta, phi = pixel_grid(layout.width, layout.height)
    return np.asarray(ellipse_distance_arrays(theta, phi, layout.objects[idx].ellipse))


def object_opacity_field(layout: SceneLayout, i: int) -> np.ndarray:
    """Opacity grid of object i (1-based), shape (H, W)."""
    idx = _check_index(layout, i)
    return opacity(layout.objects[idx].size, object_distance_field(layout, i))


def random_layout(seed: int, n: int, d_f: int, width: int, height: int,
                  d_u: int | None = None) -> SceneLayout:
    """Seeded default layout used when no document is supplied.

    Draw order per object (numpy default_rng(seed)): alpha ~ U(0, 2*pi),
    beta ~ U(pi/4, 3*pi/4), s ~ U(0.2, 0.6), gamma ~ U(-pi, pi),
    e ~ U(0, 0.8), then f ~ N(0, 1)^d_f.
    """
    rng = np.random.default_rng(seed)
    if d_u is None:
        d_u = d_f // 2
    objs = []
    for _ in range(n):
        ell = EllipseParams(
            alpha=rng.uniform(0.0, 2.0 * np.pi),
            beta=rng.uniform(np.pi / 4.0, 3.0 * np.pi / 4.0),
            gamma=rng.uniform(-np.pi, np.pi),
            ecc=rng.uniform(0.0, 0.8),
        )
        objs.append(ObjectVector(ellipse=ell, size=rng.uniform(0.2, 0.6),
                                 features=rng.standard_normal(d_f)))
    return SceneLayout(d_f=d_f, d_u=d_u, d_y=d_f - d_u,
                       width=width, height=height, objects=tuple(objs))


def manipulate(layout: SceneLayout, op: dict) -> SceneLayout:
    """Apply one manipulation described as a dict, e.g. {"op": "remove", "i": 2}.

    Supported ops: remove(i), translate(i, d_alpha, d_beta), resize(i, d_s),
    rotate(i, d_gamma), set_ecc(i, e). Returns a new layout.
    """
    kind = op.get("op")
    i = op.get("i")
    if kind == "remove":
        return remove(layout, i)
    if kind == "translate":
        return translate(layout, i, float(op["d_alpha"]), float(op["d_beta"]))
    if kind == "resize":
        return resize(layout, i, float(op["d_s"]))
    if kind == "rotate":
        return rotate(layout, i, float(op["d_gamma"]))
    if kind == "set_ecc":
        return set_ecc(layout, i, float(op["e"]))
    raise ValueError(f"unknown manipulation op: {kind!r}")
