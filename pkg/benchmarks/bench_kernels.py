"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each case reports the best-of-N time per call for both backends and the
speed-up. Whole-scene rendering is timed by swapping the backend functions
that :mod:`visblend.raster` calls.
"""

from __future__ import annotations

import argparse
import timeit
from contextlib import contextmanager
from importlib import resources

import numpy as np

from visblend import kernels
from visblend.raster import rasterize
from visblend.scene import read_scene

FUNCS = ("points_in_rings", "paint_rings", "paint_ellipse", "paint_stroke", "rmse")


@contextmanager
def backend(mod):
    saved = {f: getattr(kernels, f) for f in FUNCS}
    for f in FUNCS:
        setattr(kernels, f, getattr(mod, f))
    try:
        yield
    finally:
        for f, v in saved.items():
            setattr(kernels, f, v)


def polygon(n=96, size=1024):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    xs = size / 2 + size * 0.4 * np.cos(t) * (1 + 0.2 * np.sin(5 * t))
    ys = size / 2 + size * 0.4 * np.sin(t) * (1 + 0.2 * np.sin(5 * t))
    return xs, ys, np.array([0, n], dtype=np.int64)


def cases():
    xs, ys, starts = polygon()
    rng = np.random.default_rng(0)
    px, py = rng.uniform(0, 1024, 20_000), rng.uniform(0, 1024, 20_000)
    a, b = rng.random((256, 256)), rng.random((256, 256))
    with resources.as_file(resources.files("visblend") / "fixtures" / "angel.json") as p:
        angel = read_scene(p)

    def fill_and_stroke(mod):
        canvas = np.ones((1024, 1024))
        mod.paint_rings(canvas, xs, ys, starts, 0.5)
        mod.paint_stroke(canvas, xs, ys, True, 3.0, 0.0)

    return {
        "fill+stroke 96-gon @1024^2": fill_and_stroke,
        "ellipse fill @1024^2": lambda m: m.paint_ellipse(np.ones((1024, 1024)),
                                                         500.0, 480.0, 300.0, 200.0, 0.2),
        "20k point-in-polygon": lambda m: m.points_in_rings(px, py, xs, ys, starts),
        "rmse 256^2": lambda m: m.rmse(a, b),
        "rasterize angel @256^2": lambda m: _render(m, angel),
    }


def _render(mod, scene):
    with backend(mod):
        rasterize(scene, 256, 256)


def best_time(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 10_000:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not available; timing the numpy fallback only")
    print(f"{'case':32s} {'cython ms':>10s} {'numpy ms':>10s} {'speed-up':>9s}")
    for name, fn in cases().items():
        tp = best_time(lambda: fn(kernels.python), args.repeat) * 1e3
        if kernels.compiled is None:
            print(f"{name:32s} {'-':>10s} {tp:10.3f} {'-':>9s}")
            continue
        tc = best_time(lambda: fn(kernels.compiled), args.repeat) * 1e3
        print(f"{name:32s} {tc:10.3f} {tp:10.3f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
