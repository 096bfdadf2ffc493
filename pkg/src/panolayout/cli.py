"""Command-line entry points: render, gradcheck, augment, project, manipulate,
losses, serve.

Every subcommand is deterministic: identical flags and seed produce
byte-identical output files.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

import numpy as np

from . import formats, grad, losses
from .imageops import PerspectiveCamera, augment, project_perspective
from .layout import (
    composite,
    composite_weight,
    manipulate,
    object_distance_field,
    object_opacity_field,
)
from .service import weight_heatmap


class CliError(Exception):
    """Invalid input; reported with exit code 1."""


def _thread_limit(n):
    if n is None:
        return contextlib.nullcontext()
    try:
        from threadpoolctl import threadpool_limits

        return threadpool_limits(limits=n)
    except ImportError:
        return contextlib.nullcontext()


def cmd_render(args) -> int:
    layout = formats.load_layout(args.layout)
    mode = args.mode
    if mode == "composite":
        grid = composite(layout).values
    elif mode == "weight":
        grid = composite_weight(layout)
    elif mode.startswith("distance:"):
        grid = object_distance_field(layout, int(mode.split(":")[1]))
    elif mode.startswith("opacity:"):
        grid = object_opacity_field(layout, int(mode.split(":")[1]))
    else:
        raise CliError(f"unknown render mode {mode!r}")
    formats.save_plt1(grid, args.out)
    if args.weights:
        formats.save_png(weight_heatmap(composite_weight(layout)), args.weights)
    return 0


def cmd_gradcheck(args) -> int:
    report = grad.gradcheck(samples=args.samples, seed=args.seed,
                            width=args.width, height=args.height)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
            fh.write("\n")
    print(text)
    return 0 if report["passed"] else 1


def cmd_augment(args) -> int:
    img = formats.load_png(args.image)
    layout = formats.load_layout(args.layout)
    out_img, out_layout, record = augment(img, layout, args.seed)
    formats.save_png(out_img, args.out_prefix + ".png")
    formats.save_layout(out_layout, args.out_prefix + ".layout.json")
    with open(args.out_prefix + ".record.json", "w") as fh:
        fh.write(record.to_json())
        fh.write("\n")
    return 0


def cmd_project(args) -> int:
    img = formats.load_png(args.image)
    cam = PerspectiveCamera(yaw=args.yaw, pitch=args.pitch, roll=args.roll,
                            hfov=args.fov, out_w=args.out_w, out_h=args.out_h)
    formats.save_png(project_perspective(img, cam), args.out)
    return 0


def _parse_op(text: str) -> dict:
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "remove" and len(parts) == 2:
            return {"op": "remove", "i": int(parts[1])}
        if kind == "translate" and len(parts) == 4:
            return {"op": "translate", "i": int(parts[1]),
                    "d_alpha": float(parts[2]), "d_beta": float(parts[3])}
        if kind == "resize" and len(parts) == 3:
            return {"op": "resize", "i": int(parts[1]), "d_s": float(parts[2])}
        if kind == "rotate" and len(parts) == 3:
            return {"op": "rotate", "i": int(parts[1]), "d_gamma": float(parts[2])}
        if kind == "ecc" and len(parts) == 3:
            return {"op": "set_ecc", "i": int(parts[1]), "e": float(parts[2])}
    except ValueError as exc:
        raise CliError(f"bad op argument in {text!r}: {exc}")
    raise CliError(
        f"bad op {text!r}; expected remove:i | translate:i:da:db | resize:i:ds | "
        "rotate:i:dg | ecc:i:e"
    )


def cmd_manipulate(args) -> int:
    layout = formats.load_layout(args.layout)
    formats.save_layout(manipulate(layout, _parse_op(args.op)), args.out)
    return 0


def cmd_losses(args) -> int:
    with open(args.fixture) as fh:
        fixture = json.load(fh)
    out = {}
    for name, entry in fixture.items():
        if name == "loss_G":
            out[name] = losses.loss_g(entry["fake_scores"])
        elif name == "loss_D":
            out[name] = losses.loss_d(entry["fake_scores"], entry["real_scores"])
        elif name == "loss_recon":
            out[name] = losses.loss_recon(entry["a"], entry["b"])
        elif name == "loss_cycle":
            out[name] = losses.loss_cycle(entry["x"], entry["emptied_fake"])
        elif name == "loss_emp":
            out[name] = losses.loss_emp(entry["real_scores"], entry["fake_scores"],
                                        entry["x"], entry["emptied"])
        elif name == "loss_total":
            w = losses.LossWeights(lambda_gan=entry.get("lambda_gan", 1.0),
                                   lambda_cycle=entry.get("lambda_cycle", 5.0))
            out[name] = losses.loss_total(entry["g"], entry["d"], entry["cycle"], w)
        else:
            raise CliError(f"unknown loss fixture entry {name!r}")
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, root=args.root)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="panolayout")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap numerical thread pools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a layout document to a PLT1 grid")
    p.add_argument("--layout", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--weights", default=None, help="also write the weight heatmap PNG")
    p.add_argument("--mode", default="composite",
                   help="composite | weight | distance:i | opacity:i")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gradcheck", help="analytic vs finite-difference gradients")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--height", type=int, default=8)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("augment", help="seeded panoramic augmentation")
    p.add_argument("--image", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("project", help="equirect to perspective view")
    p.add_argument("--image", required=True)
    p.add_argument("--yaw", type=float, default=0.0)
    p.add_argument("--pitch", type=float, default=0.0)
    p.add_argument("--roll", type=float, default=0.0)
    p.add_argument("--fov", type=float, default=1.2)
    p.add_argument("--out-w", type=int, default=512)
    p.add_argument("--out-h", type=int, default=384)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("manipulate", help="apply one layout manipulation")
    p.add_argument("--layout", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser("losses", help="evaluate a loss fixture file")
    p.add_argument("--fixture", required=True)
    p.set_defaults(func=cmd_losses)

    p = sub.add_parser("serve", help="start the rendering service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--root", default=None, help="static frontend directory")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_limit(args.threads):
            return args.func(args)
    except (CliError, formats.FormatError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
