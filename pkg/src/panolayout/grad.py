"""Analytic derivatives of the rendered layout and a finite-difference oracle.

The primary interface is the reverse-mode vector-Jacobian product
``composite_jacobian_vp``: given a cotangent map of the same shape as the
composite, it returns the inner product's gradient with respect to every
object parameter. Forward-mode per-parameter derivatives of the ellipse
distance are exposed for testing.

Finite-difference step sizes are fixed so the oracle is reproducible:
1e-6 for scalar geometry, 1e-5 for composite-level checks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import EllipseParams, SphereCoord, pixel_grid
from .layout import ObjectVector, SceneLayout, composite, opacity

FD_STEP_GEOMETRY = 1e-6
FD_STEP_COMPOSITE = 1e-5

# pixels with rho below / above these are in the singular set (bearing
# undefined); gradients there are 0 by convention and flagged
SINGULAR_RHO = 1e-6


@dataclass
class ParamGradient:
    """Accumulated gradient for one object."""

    d_alpha: float
    d_beta: float
    d_s: float
    d_gamma: float
    d_ecc: float
    d_features: np.ndarray


def distance_partials(theta, phi, ell: EllipseParams):
    """Partials of the ellipse distance wrt (alpha, beta, gamma, ecc).

    Returns (d, d_alpha, d_beta, d_gamma, d_ecc, singular) arrays, where
    `singular` marks pixels within SINGULAR_RHO of the center or antipode;
    partials are zeroed there.
    """
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    delta = theta - ell.alpha
    sp, cp = np.sin(phi), np.cos(phi)
    sb, cb = np.sin(ell.beta), np.cos(ell.beta)
    sd, cd = np.sin(delta), np.cos(delta)

    cos_rho = sp * sb * cd + cp * cb
    a = sp * sd
    b = sp * cb * cd - cp * sb
    sin_rho = np.hypot(a, b)
    rho = np.arccos(np.clip(cos_rho, -1.0, 1.0))
    omega = np.arctan2(b, a)

    e = ell.ecc
    psi = omega + ell.gamma
    c2 = np.cos(psi) ** 2
    denom = 1.0 - e * e * c2
    factor = np.sqrt((1.0 - e * e) / denom)
    # partials of the eccentricity factor wrt psi and e
    f_psi = -0.5 * factor * (e * e * np.sin(2.0 * psi)) / denom
    f_e = factor * e * (c2 / denom - 1.0 / (1.0 - e * e))

    singular = sin_rho < SINGULAR_RHO
    safe_sin = np.where(singular, 1.0, sin_rho)
    sin2 = safe_sin * safe_sin

    drho_da = -sp * sb * sd / safe_sin
    drho_db = -b / safe_sin
    domega_da = sp * (a * cb * sd + b * cd) / sin2
    domega_db = -a * cos_rho / sin2

    d = rho * factor
    d_alpha = factor * drho_da + rho * f_psi * domega_da
    d_beta = factor * drho_db + rho * f_psi * domega_db
    d_gamma = rho * f_psi
    d_ecc = rho * f_e

    zero = np.zeros_like(d)
    d_alpha = np.where(singular, zero, d_alpha)
    d_beta = np.where(singular, zero, d_beta)
    d_gamma = np.where(singular, zero, d_gamma)
    d_ecc = np.where(singular, zero, d_ecc)
    return d, d_alpha, d_beta, d_gamma, d_ecc, singular


def d_distance(p: SphereCoord, ell: EllipseParams):
    """Scalar partials of the ellipse distance at one point.

    Returns (d_alpha, d_beta, d_gamma, d_ecc, singular).
    """
    _, da, db, dg, de, sing = distance_partials(p.theta, p.phi, ell)
    return float(da), float(db), float(dg), float(de), bool(sing)


def d_opacity(s, d):
    """(do/ds, do/dd) for o = sigmoid(s - d)."""
    o = opacity(s, d)
    g = o * (1.0 - o)
    return g, -g


def composite_jacobian_vp(layout: SceneLayout, cotangent: np.ndarray) -> list[ParamGradient]:
    """Reverse-mode gradient of <cotangent, composite(layout)> per object.

    The accumulation runs the compositing recurrence
    A_i = A_{i-1} (1 - o_i) + w_i o_i (with w_i the cotangent-feature dot
    product per pixel) and backpropagates through it, which captures each
    opacity's appearance in all deeper transmittance products.
    """
    cot = np.asarray(cotangent, dtype=np.float64)
    h, w = layout.height, layout.width
    if cot.shape != (h, w, layout.d_f):
        raise ValueError(f"cotangent shape {cot.shape} != {(h, w, layout.d_f)}")
    n = layout.n
    if n == 0:
        return []

    theta, phi = pixel_grid(w, h)
    feats = np.stack([obj.features for obj in layout.objects])  # (n, d_f)
    sizes = np.array([obj.size for obj in layout.objects])

    dists = np.empty((n, h, w))
    dist_parts = []
    for i, obj in enumerate(layout.objects):
        d, da, db, dg, de, _ = distance_partials(theta, phi, obj.ellipse)
        dists[i] = d
        dist_parts.append((da, db, dg, de))
    opac = opacity(sizes[:, None, None], dists)

    # w_i = <cotangent, f_i> per pixel
    w_dot = np.einsum("hwc,nc->nhw", cot, feats)

    # forward prefix A_{i-1}; suffix transmittance P_i = prod_{k>i}(1-o_k)
    prefix = np.zeros((n, h, w))
    acc = np.zeros((h, w))
    for i in range(n):
        prefix[i] = acc
        acc = acc * (1.0 - opac[i]) + w_dot[i] * opac[i]
    trans = np.ones((n, h, w))
    for i in range(n - 2, -1, -1):
        trans[i] = trans[i + 1] * (1.0 - opac[i + 1])

    g_opac = trans * (w_dot - prefix)
    do_ds = opac * (1.0 - opac)
    g_s = g_opac * do_ds        # per-pixel gradient wrt s_i
    g_d = -g_s                  # per-pixel gradient wrt d_i

    grads = []
    for i in range(n):
        da, db, dg, de = dist_parts[i]
        gd = g_d[i]
        g_f = np.einsum("hw,hwc->c", opac[i] * trans[i], cot)
        grads.append(
            ParamGradient(
                d_alpha=float(np.sum(gd * da)),
                d_beta=float(np.sum(gd * db)),
                d_s=float(np.sum(g_s[i])),
                d_gamma=float(np.sum(gd * dg)),
                d_ecc=float(np.sum(gd * de)),
                d_features=g_f,
            )
        )
    return grads


# --- finite-difference oracle ---


def _inner(layout: SceneLayout, cot: np.ndarray) -> float:
    return float(np.sum(composite(layout).values * cot))


def _perturb(layout: SceneLayout, idx: int, param: str, eps: float) -> SceneLayout:
    obj = layout.objects[idx]
    ell = obj.ellipse
    if param == "alpha":
        obj = replace(obj, ellipse=replace(ell, alpha=ell.alpha + eps))
    elif param == "beta":
        obj = replace(obj, ellipse=replace(ell, beta=ell.beta + eps))
    elif param == "gamma":
        obj = replace(obj, ellipse=replace(ell, gamma=ell.gamma + eps))
    elif param == "ecc":
        obj = replace(obj, ellipse=replace(ell, ecc=ell.ecc + eps))
    elif param == "s":
        obj = replace(obj, size=obj.size + eps)
    else:
        raise ValueError(param)
    objs = list(layout.objects)
    objs[idx] = obj
    return replace(layout, objects=tuple(objs))


def fd_composite_grad(layout: SceneLayout, cot: np.ndarray, idx: int, param: str,
                      step: float = FD_STEP_COMPOSITE) -> float:
    """Central finite difference of <cot, composite> wrt one scalar parameter."""
    hi = _inner(_perturb(layout, idx, param, step), cot)
    lo = _inner(_perturb(layout, idx, param, -step), cot)
    return (hi - lo) / (2.0 * step)


def fd_feature_grad(layout: SceneLayout, cot: np.ndarray, idx: int, channel: int,
                    step: float = FD_STEP_COMPOSITE) -> float:
    obj = layout.objects[idx]
    out = []
    for eps in (step, -step):
        f = obj.features.copy()
        f[channel] += eps
        objs = list(layout.objects)
        objs[idx] = replace(obj, features=f)
        out.append(_inner(replace(layout, objects=tuple(objs)), cot))
    return (out[0] - out[1]) / (2.0 * step)


def ellipse_touches_singular_set(ell: EllipseParams, w: int, h: int) -> bool:
    """True if any grid pixel lies within SINGULAR_RHO of the center/antipode."""
    theta, phi = pixel_grid(w, h)
    d, *_ , sing = distance_partials(theta, phi, ell)
    del d
    return bool(np.any(sing))


def _random_layout(rng: np.random.Generator, w: int, h: int, n: int, d_f: int) -> SceneLayout:
    objs = []
    for _ in range(n):
        ell = EllipseParams(
            alpha=rng.uniform(0.0, 2.0 * np.pi),
            beta=rng.uniform(0.15, np.pi - 0.15),
            gamma=rng.uniform(-np.pi, np.pi),
            ecc=rng.uniform(0.0, 0.9),
        )
        objs.append(ObjectVector(ellipse=ell, size=rng.uniform(-0.5, 1.5),
                                 features=rng.standard_normal(d_f)))
    return SceneLayout(d_f=d_f, d_u=d_f // 2, d_y=d_f - d_f // 2,
                       width=w, height=h, objects=tuple(objs))


def gradcheck(samples: int = 10000, seed: int = 0, width: int = 16, height: int = 8,
              rel_tol: float = 1e-4, abs_tol: float = 1e-7) -> dict:
    """Compare the vector-Jacobian product against central differences.

    Random layouts (n <= 5, d_f <= 8) and cotangents are drawn until at
    least `samples` scalar parameters have been checked. A check passes if
    the relative error is <= rel_tol or the absolute error is <= abs_tol.
    Objects whose ellipse puts any grid pixel in the singular set are
    excluded. Returns a machine-readable report.
    """
    rng = np.random.default_rng(seed)
    scalar_params = ("alpha", "beta", "s", "gamma", "ecc")
    checked = 0
    failures = []
    excluded = 0
    max_rel = 0.0
    worst = None
    per_param_max = {p: 0.0 for p in scalar_params + ("f",)}

    while checked < samples:
        n = int(rng.integers(1, 6))
        d_f = int(rng.integers(2, 9))
        layout = _random_layout(rng, width, height, n, d_f)
        cot = rng.standard_normal((height, width, d_f))
        analytic = composite_jacobian_vp(layout, cot)
        for i in range(n):
            if ellipse_touches_singular_set(layout.objects[i].ellipse, width, height):
                excluded += len(scalar_params) + d_f
                continue
            g = analytic[i]
            vals = {
                "alpha": g.d_alpha, "beta": g.d_beta, "s": g.d_s,
                "gamma": g.d_gamma, "ecc": g.d_ecc,
            }
            for param in scalar_params:
                fd = fd_composite_grad(layout, cot, i, param)
                an = vals[param]
                err = abs(an - fd)
                rel = err / max(abs(an), abs(fd), 1e-300)
                ok = rel <= rel_tol or err <= abs_tol
                score = rel if err > abs_tol else 0.0
                per_param_max[param] = max(per_param_max[param], score)
                if score > max_rel:
                    max_rel = score
                    worst = {"param": param, "analytic": an, "fd": fd}
                if not ok:
                    failures.append({"param": param, "analytic": an, "fd": fd, "rel": rel})
                checked += 1
            for ch in range(d_f):
                fd = fd_feature_grad(layout, cot, i, ch)
                an = float(g.d_features[ch])
                err = abs(an - fd)
                rel = err / max(abs(an), abs(fd), 1e-300)
                ok = rel <= rel_tol or err <= abs_tol
                score = rel if err > abs_tol else 0.0
                per_param_max["f"] = max(per_param_max["f"], score)
                if not ok:
                    failures.append({"param": "f", "analytic": an, "fd": fd, "rel": rel})
                checked += 1

    pass_fraction = 1.0 - len(failures) / checked
    return {
        "samples": checked,
        "seed": seed,
        "width": width,
        "height": height,
        "fd_step": FD_STEP_COMPOSITE,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "failure_count": len(failures),
        "pass_fraction": pass_fraction,
        "singular_exclusions": excluded,
        "max_rel_error": max_rel,
        "worst_case": worst,
        "per_param_max_rel_error": per_param_max,
        "failures": failures[:50],
        "passed": pass_fraction >= 0.99,
    }
