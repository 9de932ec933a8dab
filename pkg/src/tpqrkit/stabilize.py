"""Gabrielov stabilisation P(x) -> P(x) + y^(d+1) at the lattice level."""
from __future__ import annotations

import numpy as np

from .lattice import DistinguishedBasis, IntersectionLattice, LatticeError, Step


def stab_label(name: str, j: int) -> str:
    return f"{name}:{j}"


def gabrielov_stabilize(basis: DistinguishedBasis | IntersectionLattice, d: int,
                        chain_sign: int = 1, cross_sign: int = -1) -> DistinguishedBasis:
    """Distinguished basis of size d*mu, ordered alpha-major.

    Cycle (i, j) lives over the j-th sheet.  Same sheet: original pairing.
    Neighbouring sheets of one cycle: ``chain_sign``.  For i < i',
    <S_ij, S_i'(j+1)> = cross_sign * <V_i, V_i'>, while i < i' with
    j > j' gives 0.  Sheets two or more apart never meet.
    """
    if d < 1:
        raise LatticeError("stabilisation degree d must be >= 1")
    if chain_sign not in (1, -1) or cross_sign not in (1, -1):
        raise LatticeError("sign conventions must be +1 or -1")
    lat = basis.lattice if isinstance(basis, DistinguishedBasis) else basis
    lat.check()
    v = lat.gram
    mu = lat.mu
    n = mu * d
    g = np.zeros((n, n), dtype=np.int64)
    for i in range(mu):
        for j in range(d):
            a = i * d + j
            for i2 in range(mu):
                for j2 in range(d):
                    b = i2 * d + j2
                    if j == j2:
                        g[a, b] = v[i, i2]
                    elif i == i2 and abs(j - j2) == 1:
                        g[a, b] = chain_sign
                    elif i < i2 and j2 == j + 1:
                        g[a, b] = cross_sign * v[i, i2]
                    elif i2 < i and j == j2 + 1:
                        g[a, b] = cross_sign * v[i, i2]
    labels = [stab_label(x, j + 1) for x in lat.labels for j in range(d)]
    return DistinguishedBasis.from_lattice(IntersectionLattice(labels, g))


def to_sheet_major(mu: int, d: int) -> list[Step]:
    """Trivial swaps turning (a,1),(a,2),..,(b,1).. into (a,1),(b,1),..,(a,2)..

    Only pairs (i, j), (i', j') with i < i' and j > j' are exchanged,
    which never intersect.
    """
    order = [(i, j) for i in range(mu) for j in range(d)]
    target = sorted(order, key=lambda t: (t[1], t[0]))
    steps = []
    # bubble sort towards the target order; every exchanged pair is inverted
    rank = {t: k for k, t in enumerate(target)}
    cur = list(order)
    changed = True
    while changed:
        changed = False
        for k in range(len(cur) - 1):
            if rank[cur[k]] > rank[cur[k + 1]]:
                cur[k], cur[k + 1] = cur[k + 1], cur[k]
                steps.append(Step("S", k + 1))
                changed = True
    return steps


def a_chain(n: int) -> IntersectionLattice:
    """A_n in one variable (x^(n+1)): a chain of n cycles meeting once."""
    if n < 1:
        raise LatticeError("A_n needs n >= 1")
    g = -2 * np.eye(n, dtype=np.int64)
    for i in range(n - 1):
        g[i, i + 1] = g[i + 1, i] = 1
    return IntersectionLattice([f"v{i + 1}" for i in range(n)], g)
