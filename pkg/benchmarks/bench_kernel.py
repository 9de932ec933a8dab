"""Compare the compiled and numpy polynomial kernels.

    python3 benchmarks/bench_kernel.py [--points N] [--repeat R]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from tpqrkit.critpath import _fallback, backend
from tpqrkit.critpath.families import builtin_family
from tpqrkit.critpath.solve import track_family


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    e, c = builtin_family("M", t=0.5).arrays()
    e3 = np.ascontiguousarray(e[:, :3])
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(args.points, 3)) + 1j * rng.normal(size=(args.points, 3))

    rows = [("numpy eval", _time(lambda: _fallback.eval_ghv(e3, c, pts), args.repeat))]
    if backend.COMPILED:
        from tpqrkit.critpath import _kernel
        ref = _fallback.eval_ghv(e3, c, pts)
        got = _kernel.eval_ghv(e3, c, pts)
        err = max(float(np.abs(a - b).max()) for a, b in zip(ref, got))
        rows.append(("compiled eval", _time(lambda: _kernel.eval_ghv(e3, c, pts), args.repeat)))
        print(f"max |compiled - numpy| = {err:.2e}")
    else:
        print("compiled kernel not built; numpy only")

    fam = builtin_family("M")
    for name in (["compiled"] if backend.COMPILED else []) + ["python"]:
        backend.set_backend(name)
        rows.append((f"track M ({name})", _time(lambda: track_family(fam), 1)))
    backend.set_backend("compiled" if backend.COMPILED else "python")

    for name, sec in rows:
        print(f"{name:<22} {sec * 1e3:10.2f} ms")


if __name__ == "__main__":
    main()
