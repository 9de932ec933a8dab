"""Small exact linear algebra over the rationals (or a prime field)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def rref(rows: Sequence[Sequence], modulus: int | None = None):
    """Row-reduce; returns (reduced rows, pivot columns)."""
    if modulus is None:
        m = [[Fraction(x) for x in r] for r in rows]
    else:
        m = [[int(x) % modulus for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        if modulus is None:
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
        else:
            inv = pow(m[r][c], -1, modulus)
            m[r] = [x * inv % modulus for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                if modulus is None:
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
                else:
                    m[i] = [(x - f * y) % modulus for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], modulus: int | None = None) -> int:
    return len(rref(rows, modulus)[1])


def in_span(rows: Sequence[Sequence], v: Sequence, modulus: int | None = None) -> bool:
    if not any(v):
        return True
    return rank(list(rows) + [v], modulus) == rank(rows, modulus)
