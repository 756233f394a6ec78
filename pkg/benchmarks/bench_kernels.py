"""Timing comparison for the quadrature kernels: numba jit vs numpy fallback.

Run with:  python3 benchmarks/bench_kernels.py [--sizes 2000,8000,20000]

Both backends are called through the public dispatch, forcing each via the
BESOVBALL_KERNELS environment variable, after a warm-up call that absorbs
jit compilation.  Values are cross-checked to 1e-10 relative before timing.
"""

from __future__ import annotations

import argparse
import os
import time

import numpy as np


def _sphere_points(rng, n, d):
    z = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _time_backend(fn, args, backend, repeats=3):
    os.environ["BESOVBALL_KERNELS"] = backend
    fn(*args)  # warm-up: jit compile / cache touch
    best = float("inf")
    val = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        val = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return val, best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="2000,8000,20000",
                        help="comma list of node counts per grid copy")
    parser.add_argument("--dim", type=int, default=4)
    args = parser.parse_args()

    from besovball import kernels

    if not kernels.HAS_NUMBA:
        print("numba not importable; only the numpy path is available")

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        Z = _sphere_points(rng, n, args.dim) * 0.95
        W = _sphere_points(rng, n, args.dim) * 0.95
        T = rng.uniform(-1, 1, size=(n, 3))
        S = rng.uniform(2, 3, size=(n, 3))
        for label, fn, call_args in (
            ("energy_pair_sum", kernels.energy_pair_sum, (Z, W)),
            ("min_chord_ratio", kernels.min_chord_ratio, (Z, W, T, S)),
        ):
            v_np, t_np = _time_backend(fn, call_args, "numpy")
            if kernels.HAS_NUMBA:
                v_nb, t_nb = _time_backend(fn, call_args, "numba")
                rel = abs(v_np - v_nb) / max(abs(v_np), 1e-300)
                assert rel < 1e-10, f"backend mismatch: {rel:.2e}"
                rows.append((label, n, t_np, t_nb, t_np / t_nb))
            else:
                rows.append((label, n, t_np, float("nan"), float("nan")))
    os.environ.pop("BESOVBALL_KERNELS", None)

    print(f"{'kernel':<18}{'nodes':>8}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>9}")
    for label, n, t_np, t_nb, speedup in rows:
        print(f"{label:<18}{n:>8}{t_np:>12.4f}{t_nb:>12.4f}{speedup:>9.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
