"""Critical points by multistart Newton, and their continuation in t."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import qmc

from . import backend
from .poly import VARS, MultiPoly


class SolveError(RuntimeError):
    pass


class TrackError(RuntimeError):
    pass


@dataclass
class SolveOptions:
    residual_tol: float = 1e-9
    dedupe_tol: float = 1e-6
    starts: int = 1024  # rounded up to a power of two
    seed: int = 0
    box: float = 4.0  # starts have real and imaginary parts in [-box, box]
    max_iter: int = 100
    singular_cond: float = 1e10
    workers: int = 1

    def __post_init__(self):
        for k in ("residual_tol", "dedupe_tol", "box"):
            if getattr(self, k) <= 0:
                raise ValueError(f"{k} must be positive")
        if self.starts < 1 or self.max_iter < 1 or self.workers < 1:
            raise ValueError("starts, max_iter and workers must be positive")


@dataclass
class CriticalPoint:
    point: tuple[complex, complex, complex]
    value: complex
    residual: float
    cond: float

    def to_dict(self) -> dict:
        return {"point": [[c.real, c.imag] for c in self.point],
                "value": [self.value.real, self.value.imag],
                "residual": self.residual, "cond": self.cond}


@dataclass
class SolveResult:
    points: list[CriticalPoint]
    variables: tuple[str, ...]
    bezout: int
    starts: int
    converged: int

    def distinct_values(self, tol: float | None = None) -> list[complex]:
        tol = 1e-6 if tol is None else tol
        out: list[complex] = []
        for v in sorted((p.value for p in self.points), key=lambda c: (c.real, c.imag)):
            if not any(abs(v - w) <= tol * max(1.0, abs(w)) for w in out):
                out.append(v)
        return out

    def to_dict(self) -> dict:
        return {"variables": list(self.variables), "count": len(self.points),
                "bezout": self.bezout, "starts": self.starts, "converged": self.converged,
                "points": [p.to_dict() for p in self.points]}


class _Poly3:
    """A polynomial in x, y, z with t folded into the coefficients."""

    def __init__(self, f: MultiPoly):
        e, c = f.arrays()
        self.e4 = e
        self.c = c
        self.e3 = np.ascontiguousarray(e[:, :3])
        self.active = [i for i in range(3) if e.shape[0] and e[:, i].max() > 0]

    def at(self, t: float):
        tk = self.e4[:, 3]
        c = self.c * (t ** tk) if tk.any() else self.c
        dc = self.c * tk * np.where(tk > 0, t ** np.maximum(tk - 1, 0), 0.0)
        return np.ascontiguousarray(c), np.ascontiguousarray(dc)

    def ghv(self, c, pts):
        return backend.eval_ghv(self.e3, c, np.ascontiguousarray(pts, dtype=np.complex128))


def _solve_lin(H, g):
    try:
        return np.linalg.solve(H, g[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.einsum("nij,nj->ni", np.linalg.pinv(H), g)


def _newton(P: _Poly3, c, pts, tol, max_iter):
    """Batched Newton on grad = 0 over the active variables."""
    act = P.active
    x = pts.copy()
    alive = np.ones(len(x), dtype=bool)
    res = np.full(len(x), np.inf)
    quiet = np.zeros(len(x), dtype=int)
    for _ in range(max_iter):
        idx = np.flatnonzero(alive)
        if not len(idx):
            break
        _, g, H = P.ghv(c, x[idx])
        g = g[:, act]
        H = H[:, act][:, :, act]
        res[idx] = np.abs(g).max(axis=1)
        step = _solve_lin(H, g)
        ok = np.all(np.isfinite(step), axis=1)
        scale = 1.0 + np.abs(x[idx][:, act]).max(axis=1)
        big = np.abs(step).max(axis=1) > 10 * scale
        step[big] *= (10 * scale[big] / np.abs(step[big]).max(axis=1))[:, None]
        sub = x[idx]
        sub[:, act] -= np.where(ok[:, None], step, 0)
        x[idx] = sub
        small = np.abs(step).max(axis=1) <= 1e-15 * scale
        # stop once converged and the update has stalled at round-off
        done = (res[idx] <= tol) & small
        quiet[idx] = np.where(res[idx] <= tol, quiet[idx] + 1, 0)
        done |= quiet[idx] >= 3
        done |= ~ok | (np.abs(sub).max(axis=1) > 1e8)
        alive[idx[done]] = False
    _, g, H = P.ghv(c, x)
    res = np.abs(g[:, act]).max(axis=1) if len(x) else res
    return x, res


def _canonical_key(p):
    return tuple(v for c in p for v in (round(c.real, 9), round(c.imag, 9)))


def _dedupe(pts: list, tol: float) -> list:
    pts = sorted(pts, key=lambda q: _canonical_key(q[0]))
    kept: list = []
    for q in pts:
        a = np.array(q[0])
        hit = next((k for k in kept if np.abs(np.array(k[0]) - a).max() <= tol), None)
        if hit is None:
            kept.append(q)
    return kept


def _sobol_starts(n: int, dim: int, seed: int, box: float) -> np.ndarray:
    m = max(0, int(np.ceil(np.log2(max(n, 1)))))
    s = qmc.Sobol(d=2 * dim, scramble=True, seed=seed).random_base2(m)
    s = (2 * s - 1) * box
    return s[:, :dim] + 1j * s[:, dim:]


def _describe(P: _Poly3, c, x) -> list[CriticalPoint]:
    if not len(x):
        return []
    v, g, H = P.ghv(c, x)
    act = P.active
    out = []
    for k in range(len(x)):
        h = H[k][np.ix_(act, act)]
        cond = float(np.linalg.cond(h)) if len(act) else 1.0
        out.append(CriticalPoint(tuple(complex(u) for u in x[k]), complex(v[k]),
                                 float(np.abs(g[k, act]).max()) if act else 0.0,
                                 cond if np.isfinite(cond) else float("inf")))
    return out


def grad_solve(f: MultiPoly, opts: SolveOptions | None = None) -> SolveResult:
    """All critical points of f in x, y, z (t must not occur)."""
    opts = opts or SolveOptions()
    if "t" in f.variables:
        raise SolveError("specialise t before solving")
    P = _Poly3(f)
    act = P.active
    names = tuple(VARS[i] for i in act)
    if not act:
        raise SolveError("constant polynomial: every point is critical")
    c, _ = P.at(0.0)
    starts = np.zeros((0, 3), dtype=np.complex128)
    cloud = _sobol_starts(opts.starts, len(act), opts.seed, opts.box)
    starts = np.zeros((len(cloud), 3), dtype=np.complex128)
    starts[:, act] = cloud
    chunks = np.array_split(starts, opts.workers)
    with ThreadPoolExecutor(max_workers=opts.workers) as ex:
        parts = list(ex.map(lambda s: _newton(P, c, s, opts.residual_tol, opts.max_iter), chunks))
    x = np.concatenate([p[0] for p in parts])
    res = np.concatenate([p[1] for p in parts])
    good = np.isfinite(res) & (res <= opts.residual_tol)
    if not good.any():
        raise SolveError("Newton did not converge from any start")
    roots = _dedupe([(tuple(complex(u) for u in r),) for r in x[good]], opts.dedupe_tol)
    pts = _describe(P, c, np.array([r[0] for r in roots]))
    bez = f.bezout_bound()
    singular = [p for p in pts if p.cond > opts.singular_cond]
    if len(pts) > bez or len(singular) > len(act) + 1:
        raise SolveError(f"suspected non-isolated critical set: {len(pts)} distinct roots, "
                         f"{len(singular)} with singular Hessian")
    return SolveResult(pts, names, bez, len(starts), int(good.sum()))


# -- continuation -------------------------------------------------------------

@dataclass
class TrackOptions:
    escape_radius: float = 1e3
    residual_tol: float = 1e-9
    dedupe_tol: float = 1e-6
    min_step: float = 1e-10
    max_step: float = 0.02
    corrector_iter: int = 6
    escape_on: str = "either"  # point, value or either
    workers: int = 1
    solve: SolveOptions = field(default_factory=SolveOptions)

    def __post_init__(self):
        for k in ("escape_radius", "residual_tol", "dedupe_tol", "min_step", "max_step"):
            if getattr(self, k) <= 0:
                raise ValueError(f"{k} must be positive")
        if self.escape_on not in ("point", "value", "either"):
            raise ValueError("escape_on must be point, value or either")


@dataclass
class CriticalTrack:
    t_grid: list[float]
    snapshots: list[list[dict]]  # per t: {point, value, escaped}
    correspondence: list[list[int]]  # k -> k+1 index map, -1 once escaped
    escaped_at: dict[int, float]
    lost: dict[int, float]
    variables: tuple[str, ...]

    @property
    def n_paths(self) -> int:
        return len(self.snapshots[0]) if self.snapshots else 0

    def escaped(self) -> list[int]:
        return sorted(self.escaped_at)

    def survivors(self) -> list[int]:
        return [i for i in range(self.n_paths) if i not in self.escaped_at and i not in self.lost]

    def counts(self) -> list[int]:
        return [sum(1 for s in snap if not s["escaped"] and s["point"] is not None)
                for snap in self.snapshots]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "path_id", "re", "im", "escaped"])
        for t, snap in zip(self.t_grid, self.snapshots):
            for i, s in enumerate(snap):
                v = s["value"]
                re, im = ("nan", "nan") if v is None else (repr(v.real), repr(v.imag))
                w.writerow([repr(float(t)), i, re, im, int(s["escaped"])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        def enc(s):
            return {"point": None if s["point"] is None else [[c.real, c.imag] for c in s["point"]],
                    "value": None if s["value"] is None else [s["value"].real, s["value"].imag],
                    "escaped": bool(s["escaped"])}
        return {"variables": list(self.variables), "t_grid": list(map(float, self.t_grid)),
                "snapshots": [[enc(s) for s in snap] for snap in self.snapshots],
                "correspondence": self.correspondence,
                "escaped_at": {str(k): v for k, v in sorted(self.escaped_at.items())},
                "lost": {str(k): v for k, v in sorted(self.lost.items())}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _Path:
    def __init__(self, P: _Poly3, opts: TrackOptions):
        self.P = P
        self.o = opts
        self.act = P.active

    def _g(self, x, t):
        c, dc = self.P.at(t)
        v, g, H = self.P.ghv(c, x[None, :])
        a = self.act
        _, gt, _ = self.P.ghv(dc, x[None, :])
        return v[0], g[0, a], H[0][np.ix_(a, a)], gt[0, a]

    def _correct(self, x, t):
        a = self.act
        x = x.copy()
        prev = None
        for _ in range(self.o.corrector_iter):
            _, g, H, _ = self._g(x, t)
            try:
                d = np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                return None
            n = np.abs(d).max()
            if prev is not None and n > 0.5 * prev and n > 1e-12 * (1 + np.abs(x).max()):
                return None
            x[a] -= d
            prev = n
            if n <= 1e-12 * (1 + np.abs(x).max()):
                return x
        _, g, _, _ = self._g(x, t)
        return x if np.abs(g).max() <= max(self.o.residual_tol, 1e-9) else None

    def polish(self, x, t, iters: int = 200):
        a = self.act
        x = x.copy()
        for _ in range(iters):
            _, g, H, _ = self._g(x, t)
            if np.abs(g).max() <= self.o.residual_tol * 1e-3:
                break
            try:
                d = np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                break
            x[a] -= d
            if np.abs(d).max() <= 1e-16 * (1 + np.abs(x).max()):
                break
        return x

    def escaped(self, x, t) -> bool:
        v, _, _, _ = self._g(x, t)
        far = np.abs(x).max() > self.o.escape_radius
        high = abs(v) > self.o.escape_radius
        return {"point": far, "value": high, "either": far or high}[self.o.escape_on]

    def advance(self, x, t0, t1, h):
        """-> (state, x, h, t) with state in ok / escaped / lost."""
        a = self.act
        t = t0
        while t < t1:
            h = min(h, t1 - t, self.o.max_step)
            _, _, H, gt = self._g(x, t)
            try:
                dx = -np.linalg.solve(H, gt)
            except np.linalg.LinAlgError:
                dx = np.zeros(len(a), dtype=complex)
            xp = x.copy()
            xp[a] += h * dx
            xn = self._correct(xp, t + h)
            if xn is None or np.abs(xn - xp).max() > 0.1 * (1 + np.abs(x).max()):
                h /= 2
                if h < self.o.min_step:
                    # endgame: a degenerate endpoint stalls the step size;
                    # Newton at t1 still converges (linearly) from here
                    if t1 - t <= 1e-6:
                        xe = self.polish(x, t1)
                        _, g, _, _ = self._g(xe, t1)
                        if np.abs(g).max() <= self.o.residual_tol and \
                                np.abs(xe - x).max() <= 1e-2 * (1 + np.abs(x).max()):
                            return "ok", xe, self.o.min_step, t1
                    return "lost", x, h, t
                continue
            x, t = xn, t + h
            if t1 - t < 1e-14:
                t = t1
            h *= 1.5
            if self.escaped(x, t):
                return "escaped", x, h, t
        return "ok", x, h, t


def _track_one(path: _Path, x0, grid):
    x = np.array(x0, dtype=complex)
    entries = []
    h = path.o.max_step
    state = "ok"
    t_end = grid[0]
    for k, t in enumerate(grid):
        if k and state == "ok":
            state, x, h, t_end = path.advance(x, grid[k - 1], t, h)
            if state == "ok":
                x = path.polish(x, t)
        if state == "ok":
            v, g, _, _ = path._g(x, t)
            entries.append({"point": tuple(complex(u) for u in x), "value": complex(v),
                            "escaped": False, "residual": float(np.abs(g).max())})
        else:
            entries.append({"point": None, "value": None, "escaped": state == "escaped"})
    return state, t_end, entries


def track_family(F: MultiPoly, t_grid=None, opts: TrackOptions | None = None) -> CriticalTrack:
    """Continue every critical point of F(., t_grid[0]) along the grid."""
    opts = opts or TrackOptions()
    grid = [float(t) for t in (np.linspace(0, 1, 51) if t_grid is None else t_grid)]
    if len(grid) < 1:
        raise TrackError("empty grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise TrackError("grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > 1:
        raise TrackError("grid must lie in [0, 1]")
    P = _Poly3(F)
    f0 = F.at_t(Fraction(grid[0]).limit_denominator(10 ** 12)) if "t" in F.variables else F
    start = grad_solve(f0, opts.solve)
    path = _Path(P, opts)
    xs = [p.point for p in start.points]
    with ThreadPoolExecutor(max_workers=opts.workers) as ex:
        results = list(ex.map(lambda x0: _track_one(path, x0, grid), xs))
    snapshots = [[r[2][k] for r in results] for k in range(len(grid))]
    escaped_at = {i: r[1] for i, r in enumerate(results) if r[0] == "escaped"}
    lost = {i: r[1] for i, r in enumerate(results) if r[0] == "lost"}
    corr = []
    for k in range(len(grid) - 1):
        corr.append([i if snapshots[k + 1][i]["point"] is not None else -1
                     for i in range(len(xs))])
    for snap in snapshots:
        for s in snap:
            if s["point"] is not None and s["residual"] > opts.residual_tol:
                raise TrackError(f"residual {s['residual']:.2e} above tolerance")
            s.pop("residual", None)
    return CriticalTrack(grid, snapshots, corr, escaped_at, lost, start.variables)
