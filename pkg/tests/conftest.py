"""Shared independent oracles and fixtures.

The oracles here deliberately take a different computational path from the
production code (explicit rotation matrices, literal sum-product loops,
triple-loop convolution) so agreement is meaningful.
"""

import numpy as np
import pytest

from panolayout.geometry import EllipseParams
from panolayout.layout import ObjectVector, SceneLayout, opacity


def rotation_matrix_polar(theta, phi, alpha, beta):
    """Oracle for rotate_to_center via explicit elementary rotations.

    M = R_y(-beta) R_z(-alpha) maps the center direction to +z, the
    center's +theta tangent to +y and its +phi tangent to +x; then
    rho = arccos(v_z) and omega = atan2(v_x, v_y).
    """
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    rz = np.array([[ca, sa, 0.0], [-sa, ca, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cb, 0.0, -sb], [0.0, 1.0, 0.0], [sb, 0.0, cb]])
    m = ry @ rz
    u = np.array([np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)])
    v = m @ u
    rho = np.arccos(np.clip(v[2], -1.0, 1.0))
    omega = 0.0 if np.hypot(v[0], v[1]) < 1e-8 else np.arctan2(v[0], v[1])
    return rho, omega


def ellipse_distance_oracle(theta, phi, ell: EllipseParams):
    rho, omega = rotation_matrix_polar(theta, phi, ell.alpha, ell.beta)
    c = np.cos(omega + ell.gamma)
    return rho * np.sqrt((1.0 - ell.ecc**2) / (1.0 - ell.ecc**2 * c * c))


def composite_oracle(layout: SceneLayout) -> np.ndarray:
    """Literal per-pixel sum-product evaluation of the compositing formula."""
    h, w = layout.height, layout.width
    out = np.zeros((h, w, layout.d_f))
    for py in range(h):
        for px in range(w):
            theta = 2.0 * np.pi * (px + 0.5) / w
            phi = np.pi * (py + 0.5) / h
            n = layout.n
            o = np.array([
                opacity(obj.size, ellipse_distance_oracle(theta, phi, obj.ellipse))
                for obj in layout.objects
            ])
            acc = np.zeros(layout.d_f)
            for i in range(n):
                term = layout.objects[i].features * o[i]
                for k in range(i + 1, n):
                    term = term * (1.0 - o[k])
                acc += term
            out[py, px] = acc
    return out


def conv_oracle(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Triple-loop cross-correlation: horizontal wrap, vertical zeros."""
    h, w = img.shape[:2]
    kh, kw = kernel.shape
    ph, pw = kh // 2, kw // 2
    squeeze = img.ndim == 2
    if squeeze:
        img = img[:, :, None]
    out = np.zeros_like(img, dtype=np.float64)
    for y in range(h):
        for x in range(w):
            acc = np.zeros(img.shape[2])
            for dy in range(kh):
                yy = y + dy - ph
                if yy < 0 or yy >= h:
                    continue
                for dx in range(kw):
                    xx = (x + dx - pw) % w
                    acc += kernel[dy, dx] * img[yy, xx]
            out[y, x] = acc
    return out[:, :, 0] if squeeze else out


def make_random_layout(rng, n=3, d_f=4, width=16, height=8, beta_margin=0.1):
    objs = []
    for _ in range(n):
        ell = EllipseParams(
            alpha=rng.uniform(0.0, 2.0 * np.pi),
            beta=rng.uniform(beta_margin, np.pi - beta_margin),
            gamma=rng.uniform(-np.pi, np.pi),
            ecc=rng.uniform(0.0, 0.9),
        )
        objs.append(ObjectVector(ellipse=ell, size=rng.uniform(-0.5, 1.5),
                                 features=rng.standard_normal(d_f)))
    return SceneLayout(d_f=d_f, d_u=d_f // 2, d_y=d_f - d_f // 2,
                       width=width, height=height, objects=tuple(objs))


@pytest.fixture
def rng():
    return np.random.default_rng(42)
