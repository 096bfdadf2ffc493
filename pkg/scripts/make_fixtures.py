#!/usr/bin/env python3
"""Generate a demo panorama and layout document for manual experiments.

Writes fixtures/pano.png (a gradient + meridian grid test chart) and
fixtures/layout.json, which the CLI and the editor UI can load directly.
"""

import argparse
from pathlib import Path

import numpy as np

from panolayout import formats, random_layout


def test_chart(width: int, height: int) -> np.ndarray:
    x = np.linspace(0, 1, width, endpoint=False)[None, :]
    y = np.linspace(0, 1, height, endpoint=False)[:, None]
    img = np.stack([
        np.broadcast_to(0.25 + 0.5 * x, (height, width)),
        np.broadcast_to(0.25 + 0.5 * y, (height, width)),
        np.full((height, width), 0.55),
    ], axis=-1).copy()
    # meridian / parallel grid every 30 degrees
    for gx in range(0, width, width // 12):
        img[:, gx] = 0.1
    for gy in range(0, height, height // 6):
        img[gy, :] = 0.1
    return img


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="fixtures")
    ap.add_argument("--width", type=int, default=512)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--objects", type=int, default=6)
    ap.add_argument("--features", type=int, default=8)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    w, h = args.width, args.width // 2
    formats.save_png(test_chart(w, h), out / "pano.png")
    layout = random_layout(seed=args.seed, n=args.objects, d_f=args.features,
                           width=w, height=h)
    formats.save_layout(layout, out / "layout.json")
    print(f"wrote {out / 'pano.png'} and {out / 'layout.json'}")


if __name__ == "__main__":
    main()
