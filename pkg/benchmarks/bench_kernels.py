"""Benchmark the compiled diffraction kernels against the pure-numpy fallback.

Times the two operations that dominate terrain scans: single-path Bullington
loss, and the per-radial RSS prefix sweep used by protected-contour
construction. Run from the repo root:

    python3 benchmarks/bench_kernels.py [--samples 1112] [--repeats 20]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from tvws.kernels import _pure

try:
    from tvws.kernels import _native
except ImportError:
    _native = None


def timed(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def make_profile(samples: int, seed: int = 5):
    rng = np.random.default_rng(seed)
    dist = np.linspace(0.0, 100.0, samples)
    elev = np.abs(np.cumsum(rng.normal(0.0, 8.0, samples)))
    return dist, elev


def bench(backend, name: str, dist, elev, repeats: int):
    h_ts = float(elev[0]) + 50.0
    h_rs = float(elev[-1]) + 10.0
    single = timed(lambda: backend.bullington_loss(dist, elev, h_ts, h_rs, 600.0, 4.0 / 3.0), repeats)
    sweep = timed(lambda: backend.rss_prefix_sweep(dist, elev, 50.0, 10.0, 600.0, 4.0 / 3.0, 90.0), repeats)
    print(f"{name:>8}  bullington_loss: {single * 1e6:10.1f} us   rss_prefix_sweep: {sweep * 1e3:10.2f} ms")
    return single, sweep


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1112, help="profile samples (90 m over 100 km)")
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    dist, elev = make_profile(args.samples)
    print(f"profile: {args.samples} samples over {dist[-1]:.0f} km, best of {args.repeats} runs")
    pure = bench(_pure, "pure", dist, elev, args.repeats)
    if _native is None:
        print("  native  (not built; run `python setup.py build_ext --inplace`)")
        return
    native = bench(_native, "native", dist, elev, args.repeats)

    loss_p, _ = _pure.bullington_loss(dist, elev, float(elev[0]) + 50.0, float(elev[-1]) + 10.0, 600.0, 4.0 / 3.0)
    loss_n, _ = _native.bullington_loss(dist, elev, float(elev[0]) + 50.0, float(elev[-1]) + 10.0, 600.0, 4.0 / 3.0)
    print(f"agreement: |pure - native| = {abs(loss_p - loss_n):.2e} dB")
    print(f"speedup:   bullington_loss x{pure[0] / native[0]:.1f}, rss_prefix_sweep x{pure[1] / native[1]:.1f}")


if __name__ == "__main__":
    main()
