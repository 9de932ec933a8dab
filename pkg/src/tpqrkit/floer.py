"""Floer complexes of the surgery torus with a local system (alpha, beta).

Differentials have entries in Z[alpha^+-1, beta^+-1], stored as maps
(i, j) -> integer coefficient of alpha^i beta^j.  The disc counts are
data: one bigon for P_1 and Q_1, two fibre bigons differing by the
meridian for A and B, and the two discs giving (1 - beta) for R_1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
import sympy
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .lattice import tpqr_labels

Laurent = dict  # (i, j) -> int


class FloerError(ValueError):
    pass


HF_TT_RANK = 4  # H*(T^2); quoted, not computed from discs


def lmul(a: Laurent, b: Laurent) -> Laurent:
    out: Laurent = {}
    for (i, j), c in a.items():
        for (k, l), d in b.items():
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + c * d
    return {k: v for k, v in out.items() if v}


def ladd(a: Laurent, b: Laurent) -> Laurent:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def is_unit(a: Laurent) -> bool:
    return len(a) == 1 and abs(next(iter(a.values()))) == 1


def leval(a: Laurent, alpha, beta):
    return sum(c * alpha ** i * beta ** j for (i, j), c in a.items())


@dataclass
class LaurentComplex:
    generators: list[tuple[str, int]]
    diff: list[list[Laurent]]  # diff[target][source]

    def check(self) -> None:
        n = len(self.generators)
        if len(self.diff) != n or any(len(r) != n for r in self.diff):
            raise FloerError("differential must be square in the generators")
        for t in range(n):
            for s in range(n):
                if self.diff[t][s] and self.generators[t][1] != self.generators[s][1] + 1:
                    raise FloerError("differential must raise degree by one")
        if not self.squares_to_zero():
            raise FloerError("differential does not square to zero")

    def squares_to_zero(self) -> bool:
        n = len(self.generators)
        for t in range(n):
            for s in range(n):
                acc: Laurent = {}
                for m in range(n):
                    acc = ladd(acc, lmul(self.diff[t][m], self.diff[m][s]))
                if acc:
                    return False
        return True

    def to_dict(self) -> dict:
        return {
            "generators": [{"name": n, "deg": d} for n, d in self.generators],
            "diff": [[{f"({i},{j})": c for (i, j), c in sorted(e.items())} for e in row]
                     for row in self.diff],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentComplex":
        def key(s: str) -> tuple[int, int]:
            i, j = s.strip("()").split(",")
            return int(i), int(j)
        try:
            gens = [(g["name"], int(g["deg"])) for g in d["generators"]]
            diff = [[{key(k): int(v) for k, v in e.items()} for e in row] for row in d["diff"]]
        except (KeyError, ValueError, TypeError) as e:
            raise FloerError(f"malformed complex: {e}") from None
        c = cls(gens, diff)
        c.check()
        return c

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _two_term(names: tuple[str, str], coef: Laurent) -> LaurentComplex:
    return LaurentComplex([(names[0], 0), (names[1], 1)], [[{}, {}], [coef, {}]])


def tpqr_floer_complex(p: int, q: int, r: int, cycle: str) -> LaurentComplex:
    labels = tpqr_labels(p, q, r)
    if cycle not in labels:
        raise FloerError(f"{cycle!r} is not a vanishing cycle of T_{p},{q},{r}")
    if cycle == "R1":
        c = _two_term(("r_B", "r_A"), {(0, 0): 1, (0, 1): -1})
    elif cycle in ("P1", "Q1"):
        x = cycle[0].lower()
        c = _two_term((f"{x}_B", f"{x}_A"), {(0, 0): 1})
    elif cycle in ("A", "B"):
        # two bigons in the fibre whose boundaries differ by the meridian
        c = _two_term((f"{cycle.lower()}_0", f"{cycle.lower()}_1"), {(0, 0): 1, (1, 0): -1})
    else:
        c = LaurentComplex([], [])
    c.check()
    return c


def _exact(x) -> bool:
    return isinstance(x, (int, Rational, sympy.Basic)) and not isinstance(x, bool)


def _sym(x):
    if isinstance(x, Rational) and not isinstance(x, sympy.Basic):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def cohomology_at(c: LaurentComplex, alpha, beta, tol: float = 1e-9) -> dict[int, int]:
    """Ranks of H^k after specialising the holonomies.

    Exact (sympy) arithmetic for rational or Gaussian-rational input,
    SVD rank with tolerance ``tol`` for floating input.
    """
    if alpha == 0 or beta == 0:
        raise FloerError("holonomies must be nonzero")
    exact = _exact(alpha) and _exact(beta)
    if exact:
        alpha, beta = _sym(alpha), _sym(beta)
        # Gaussian-rational field elements: much cheaper than sympy expressions
        qa, qb = QQ_I.from_sympy(alpha), QQ_I.from_sympy(beta)
    degs = sorted({d for _, d in c.generators})
    out: dict[int, int] = {}

    def rk(k: int) -> int:
        src = [i for i, (_, d) in enumerate(c.generators) if d == k]
        dst = [i for i, (_, d) in enumerate(c.generators) if d == k + 1]
        if not src or not dst:
            return 0
        if exact:
            rows = [[leval(c.diff[t][s], qa, qb) if c.diff[t][s] else QQ_I.zero for s in src]
                    for t in dst]
            return int(DomainMatrix(rows, (len(dst), len(src)), QQ_I).rank())
        m = np.array([[complex(leval(c.diff[t][s], alpha, beta)) for s in src] for t in dst])
        sv = np.linalg.svd(m, compute_uv=False)
        return int(np.sum(sv > tol))

    for k in degs:
        dim = sum(1 for _, d in c.generators if d == k)
        h = dim - rk(k) - rk(k - 1)
        if h:
            out[k] = h
    return out


def total_rank(c: LaurentComplex, alpha, beta) -> int:
    return sum(cohomology_at(c, alpha, beta).values())


@dataclass(frozen=True)
class SurgeryData:
    disc_areas: tuple[float, float]
    surgery_params: tuple[float, float]
    index_diff: int


def surgery_predicates(s: SurgeryData, area_tol: float = 1e-9) -> dict[str, bool]:
    """Exactness needs equal disc areas and equal surgery parameters."""
    if area_tol <= 0:
        raise FloerError("area tolerance must be positive")
    a1, a2 = s.disc_areas
    e1, e2 = s.surgery_params
    return {"exact": abs(a1 - a2) <= area_tol and e1 == e2,
            "maslov_zero": s.index_diff == 0}


def longitude_period(fa_u: float, fa_v: float, fb_u: float, fb_v: float,
                     eps_u: float, eps_v: float) -> float:
    """Action period of the longitude, from primitives f_A, f_B at u and v."""
    return fb_u - fb_v + eps_u + fa_v - fa_u - eps_v


def sample_holonomies(n: int, seed: int = 0, box: int = 9) -> list[tuple]:
    """Random Gaussian-rational pairs, never 1 in either slot."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        re = rng.integers(-box, box + 1, size=2)
        im = rng.integers(-box, box + 1, size=2)
        den = rng.integers(1, box + 1, size=2)
        vals = [sympy.Rational(int(re[k]), int(den[k])) + sympy.I * sympy.Rational(int(im[k]), int(den[k]))
                for k in range(2)]
        if any(v == 0 or v == 1 for v in vals):
            continue
        out.append((vals[0], vals[1]))
    return out


def generation_obstruction_report(p: int, q: int, r: int, samples: int = 5,
                                  seed: int = 0) -> dict:
    """HF(T, V) = 0 for every vanishing cycle V at generic holonomy, while
    HF(T, T) has rank 4: vanishing cycles cannot split-generate."""
    labels = tpqr_labels(p, q, r)
    pts = [(Fraction(2), Fraction(5))] + sample_holonomies(samples, seed)
    table = {}
    ok = True
    for v in labels:
        c = tpqr_floer_complex(p, q, r, v)
        ranks = [total_rank(c, a, b) for a, b in pts]
        table[v] = ranks
        ok &= not any(ranks)
    verdict = ("vanishing cycles cannot split-generate" if ok and HF_TT_RANK
               else "no obstruction found")
    return {"p": p, "q": q, "r": r,
            "points": [[str(a), str(b)] for a, b in pts],
            "ranks": table, "HF_TT_rank": HF_TT_RANK, "HF_TT_source": "quoted",
            "obstructed": bool(ok), "verdict": verdict}
