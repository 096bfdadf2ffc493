#!/usr/bin/env python3
"""Timing sweep for composite rendering at a few resolutions and sizes."""

import time

from panolayout import composite, random_layout


def bench(width, n, d_f, repeats=5):
    layout = random_layout(seed=1, n=n, d_f=d_f, width=width, height=width // 2)
    composite(layout)  # warm-up
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        composite(layout)
        times.append(time.perf_counter() - start)
    print(f"W={width:5d} n={n:3d} d_f={d_f:5d}: "
          f"best {min(times) * 1000:7.1f} ms  mean {sum(times) / repeats * 1000:7.1f} ms")


if __name__ == "__main__":
    for width, n, d_f in [(256, 20, 64), (512, 20, 64), (512, 20, 256), (256, 20, 1024)]:
        bench(width, n, d_f)
