#!/usr/bin/env python3
"""Time the compiled kernels against the numpy reference.

Runs both implementations on identical inputs and prints a table of best-of-k
wall times with the speedup ratio.  Exercises the two hot paths: the
piecewise-exact trajectory scan (norms only, memory-light) and the decay-curve
sup over modes.

The defaults mirror the package's dominant workload -- resonant staircase
inputs with many short pieces over a modest mode count -- where per-piece
dispatch overhead, not arithmetic, is the cost.  At the opposite extreme
(tens of thousands of modes, few pieces) the reference backend is already
vector-bound and the two run at par.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --modes 8192 --pieces 512 --repeat 7
"""

import argparse
import time

import numpy as np

from semistab.kernels import _reference

try:
    from semistab.kernels import _speedups
except ImportError:  # pragma: no cover - toolchain dependent
    _speedups = None


def scan_problem(n_modes, pieces, channels, seed):
    rng = np.random.default_rng(seed)
    lam = -rng.uniform(1e-3, 1.0, n_modes) + 1j * rng.normal(0, 50, n_modes)
    dts = np.full(pieces, 0.05)
    coeffs = (
        rng.normal(size=(pieces, channels))
        + 1j * rng.normal(size=(pieces, channels))
    ).astype(np.complex128)
    cols = (
        rng.normal(size=(channels, n_modes))
        + 1j * rng.normal(size=(channels, n_modes))
    ).astype(np.complex128)
    x0 = (rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes)).astype(
        np.complex128
    )
    return lam.astype(np.complex128), dts, coeffs, cols, x0


def decay_problem(n_modes, grid, seed):
    rng = np.random.default_rng(seed)
    re = -rng.uniform(1e-4, 1.0, n_modes)
    ab = np.abs(re + 1j * rng.uniform(1.0, 1e3, n_modes))
    ts = np.geomspace(1.0, 1e5, grid)
    return re, ab, 1.0, ts


def best_of(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", type=int, default=128)
    ap.add_argument("--pieces", type=int, default=20000)
    ap.add_argument("--channels", type=int, default=2)
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ns = ap.parse_args()

    cases = [
        ("scan_norms", scan_problem(ns.modes, ns.pieces, ns.channels, ns.seed)),
        ("decay_sup_grid", decay_problem(ns.modes, ns.grid, ns.seed)),
    ]
    print(
        f"modes={ns.modes} pieces={ns.pieces} channels={ns.channels} "
        f"grid={ns.grid} best of {ns.repeat}"
    )
    header = f"{'kernel':<16}{'reference':>12}{'compiled':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, args in cases:
        t_ref, out_ref = best_of(getattr(_reference, name), args, ns.repeat)
        if _speedups is None:
            print(f"{name:<16}{t_ref * 1e3:>10.2f}ms{'n/a':>12}{'n/a':>9}")
            continue
        t_fast, out_fast = best_of(getattr(_speedups, name), args, ns.repeat)
        err = float(
            np.max(np.abs(out_ref - out_fast))
            / max(1e-300, float(np.max(np.abs(out_ref))))
        )
        print(
            f"{name:<16}{t_ref * 1e3:>10.2f}ms{t_fast * 1e3:>10.2f}ms"
            f"{t_ref / t_fast:>8.1f}x  (max rel dev {err:.1e})"
        )
    if _speedups is None:
        print("compiled extension not importable; built fallback only")


if __name__ == "__main__":
    main()
