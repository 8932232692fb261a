"""Time the compiled kernels against the numpy fallback on a full-size scene.

Usage::

    python benchmarks/bench_kernels.py [--repeat N] [--width W] [--height H]
"""
import argparse
import timeit

import numpy as np

from lulc import kernels


def _scene(width, height, seed=0):
    rng = np.random.default_rng(seed)
    px = rng.integers(0, 256, (height, width, 4), dtype=np.uint8)
    px[..., 3] = 255
    colors = np.array([[0x60, 0x6F, 0x55], [0x89, 0x79, 0x66], [0xA5, 0x93, 0x85],
                       [0x5F, 0x66, 0x55], [0x51, 0x55, 0x46], [0x91, 0x80, 0x70],
                       [0x98, 0x87, 0x75]], dtype=np.int32)
    tols = np.full(7, 10, dtype=np.int32)
    # 64-vertex ring covering most of the scene
    theta = np.linspace(0, 2 * np.pi, 65)
    r = 0.45 * min(width, height) * (1 + 0.1 * np.sin(5 * theta))
    ring = np.column_stack([width / 2 + r * np.cos(theta), -height / 2 + r * np.sin(theta)])
    ring[-1] = ring[0]
    labels = rng.integers(0, 7, (height, width)).astype(np.uint16)
    return px, colors, tols, [ring], labels


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--width", type=int, default=2045)
    ap.add_argument("--height", type=int, default=2048)
    args = ap.parse_args(argv)

    px, colors, tols, rings, labels = _scene(args.width, args.height)
    cases = {
        "classify_rgba": lambda k: k.classify_rgba(px, colors, tols, None),
        "rasterize_even_odd": lambda k: k.rasterize_even_odd(
            rings, 0.0, 0.0, 1.0, 1.0, args.width, args.height),
        "aggregate_majority x4": lambda k: k.aggregate_majority(labels, 4),
        "aggregate_central x4": lambda k: k.aggregate_central(labels, 4),
    }
    backends = kernels.available_backends()
    print(f"scene {args.width} x {args.height}, best of {args.repeat}")
    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases.items():
        times = {}
        outputs = {}
        for name, k in backends.items():
            outputs[name] = fn(k)
            times[name] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
        same = all(np.array_equal(o, outputs["python"]) for o in outputs.values())
        speedup = (f"{times['python'] / times['cython']:>9.1f}x" if "cython" in times
                   else f"{'n/a':>10}")
        row = f"{label:<24}" + "".join(f"{times[n] * 1e3:>10.1f}ms" for n in backends)
        print(row + speedup + ("" if same else "  OUTPUT MISMATCH"))


if __name__ == "__main__":
    main()
