"""Serialization: layout JSON documents, the PLT1 grid format, and PNG I/O.

PLT1 layout: magic b"PLT1", then little-endian u32 W, H, C, then W*H*C
little-endian float32 in row-major order (y outer, x middle, channel inner).
"""

from __future__ import annotations

import json
import struct
from io import BytesIO

import numpy as np
from PIL import Image

from .geometry import EllipseParams
from .layout import LayoutMap, ObjectVector, SceneLayout

LAYOUT_VERSION = 1

_LAYOUT_KEYS = {"version", "n", "d_f", "d_u", "d_y", "width", "height", "objects"}
_OBJECT_KEYS = {"alpha", "beta", "s", "gamma", "e", "f"}


class FormatError(ValueError):
    """Malformed document or binary payload."""


def layout_to_dict(layout: SceneLayout) -> dict:
    return {
        "version": LAYOUT_VERSION,
        "n": layout.n,
        "d_f": layout.d_f,
        "d_u": layout.d_u,
        "d_y": layout.d_y,
        "width": layout.width,
        "height": layout.height,
        "objects": [
            {
                "alpha": obj.ellipse.alpha,
                "beta": obj.ellipse.beta,
                "s": obj.size,
                "gamma": obj.ellipse.gamma,
                "e": obj.ellipse.ecc,
                "f": obj.features.tolist(),
            }
            for obj in layout.objects
        ],
    }


def layout_from_dict(doc: dict) -> SceneLayout:
    if not isinstance(doc, dict):
        raise FormatError("layout document must be a JSON object")
    unknown = set(doc) - _LAYOUT_KEYS
    if unknown:
        raise FormatError(f"unknown layout keys: {sorted(unknown)}")
    missing = _LAYOUT_KEYS - set(doc)
    if missing:
        raise FormatError(f"missing layout keys: {sorted(missing)}")
    if doc["version"] != LAYOUT_VERSION:
        raise FormatError(f"unsupported layout version {doc['version']}")
    objects = []
    for entry in doc["objects"]:
        unknown = set(entry) - _OBJECT_KEYS
        if unknown:
            raise FormatError(f"unknown object keys: {sorted(unknown)}")
        missing = _OBJECT_KEYS - set(entry)
        if missing:
            raise FormatError(f"missing object keys: {sorted(missing)}")
        try:
            ell = EllipseParams(
                alpha=float(entry["alpha"]),
                beta=float(entry["beta"]),
                gamma=float(entry["gamma"]),
                ecc=float(entry["e"]),
            )
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
        objects.append(
            ObjectVector(ellipse=ell, size=float(entry["s"]), features=np.array(entry["f"], dtype=np.float64))
        )
    if doc["n"] != len(objects):
        raise FormatError(f"declared n={doc['n']} but {len(objects)} objects given")
    try:
        return SceneLayout(
            d_f=doc["d_f"],
            d_u=doc["d_u"],
            d_y=doc["d_y"],
            width=doc["width"],
            height=doc["height"],
            objects=tuple(objects),
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def layout_to_json(layout: SceneLayout) -> str:
    return json.dumps(layout_to_dict(layout), indent=2, sort_keys=True)


def layout_from_json(text: str) -> SceneLayout:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return layout_from_dict(doc)


def save_layout(layout: SceneLayout, path) -> None:
    with open(path, "w") as fh:
        fh.write(layout_to_json(layout))
        fh.write("\n")


def load_layout(path) -> SceneLayout:
    with open(path) as fh:
        return layout_from_json(fh.read())


# --- PLT1 ---

PLT1_MAGIC = b"PLT1"


def plt1_bytes(grid: np.ndarray) -> bytes:
    """Encode an (H, W) or (H, W, C) grid as PLT1 bytes."""
    arr = np.asarray(grid, dtype=np.float32)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise FormatError("PLT1 grid must be 2-D or 3-D")
    h, w, c = arr.shape
    header = PLT1_MAGIC + struct.pack("<III", w, h, c)
    return header + arr.astype("<f4").tobytes(order="C")


def plt1_from_bytes(data: bytes) -> np.ndarray:
    """Decode PLT1 bytes into an (H, W, C) float32 array."""
    if data[:4] != PLT1_MAGIC:
        raise FormatError("not a PLT1 payload (bad magic)")
    if len(data) < 16:
        raise FormatError("PLT1 payload truncated")
    w, h, c = struct.unpack("<III", data[4:16])
    expected = 16 + 4 * w * h * c
    if len(data) != expected:
        raise FormatError(f"PLT1 payload has {len(data)} bytes, expected {expected}")
    return np.frombuffer(data[16:], dtype="<f4").reshape(h, w, c).copy()


def save_plt1(grid: np.ndarray, path) -> None:
    with open(path, "wb") as fh:
        fh.write(plt1_bytes(grid))


def load_plt1(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return plt1_from_bytes(fh.read())


def save_layout_map(lmap: LayoutMap, path) -> None:
    save_plt1(lmap.values, path)


# --- PNG ---


def load_png(path_or_bytes, require_2to1: bool = True) -> np.ndarray:
    """Load an 8- or 16-bit PNG into an (H, W, 3) float array in [0, 1].

    Refuses images that are not 2:1 equirectangular when require_2to1 is set
    (no silent resampling).
    """
    src = BytesIO(path_or_bytes) if isinstance(path_or_bytes, (bytes, bytearray)) else path_or_bytes
    img = Image.open(src)
    if img.mode in ("I;16", "I;16B", "I"):
        arr = np.asarray(img, dtype=np.float64) / 65535.0
        arr = np.stack([arr] * 3, axis=-1)
    else:
        arr = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    h, w = arr.shape[:2]
    if require_2to1 and w != 2 * h:
        raise FormatError(
            f"panorama must be 2:1 equirectangular, got {w}x{h}; resampling is refused"
        )
    return np.clip(arr, 0.0, 1.0)


def png_bytes(img: np.ndarray) -> bytes:
    """Encode an (H, W, 3) or (H, W) float array in [0, 1] as 8-bit PNG."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = np.stack([arr] * 3, axis=-1)
    quant = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    buf = BytesIO()
    Image.fromarray(quant, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def save_png(img: np.ndarray, path) -> None:
    with open(path, "wb") as fh:
        fh.write(png_bytes(img))
