"""Mutation scripts taking A'Campo / Gabrielov bases to the T_{p,q,r} form."""
from __future__ import annotations

import heapq

from .divides import acampo_form, hpq_divide
from .lattice import (DistinguishedBasis, IntersectionLattice, LatticeError, Step,
                      gabrielov_tpqr_form, mutate, parse_script, run_script,
                      sign_equivalent, twist_in_place)
from .stabilize import gabrielov_stabilize

# kernel cycles a..g of the h_{p,q} divide and the names they end up with
KERNEL = {"a": "C", "b": "LL", "c": "UR", "d": "UL", "e": "LR", "f": "Tl", "g": "Tb"}
FINAL = {"a": "A", "b": "B", "c": "R1", "d": "P1", "e": "Q1", "f": "P2", "g": "Q2"}

# trivial reordering written out for (p, q) = (4, 5): (target, tools, inverse)
TRAIL_45 = [
    ("Q1", ["Q4"], True),
    ("P1", ["Q2", "Q4"], True),
    ("P3", ["A", "Q1", "P1", "Q4", "Q2"], False),
    ("Q3", ["A", "Q1", "P1"], False),
    ("Q4", ["Q2", "P3", "P2", "R1", "B", "A", "Q1", "P1"], False),
    ("R1", ["P2", "P3", "Q2", "Q3", "Q4", "P1", "Q1"], True),
]


def _final_name(x: str) -> str:
    x = x.split(":")[0]
    for k, v in KERNEL.items():
        if v == x:
            return FINAL[k]
    return x.upper()


def tpq2_initial_basis(p: int, q: int) -> DistinguishedBasis:
    """A'Campo basis of h_{p,q}, stabilised once, renamed to the final labels.

    Cycles are put in the order: minimum, chain saddles, LL, UR, UL, LR,
    then the maxima.  Reordering within one real type is allowed.
    """
    base = acampo_form(hpq_divide(p, q))
    st = gabrielov_stabilize(base, 1)
    lat = st.lattice
    labs = [x.split(":")[0] for x in lat.labels]
    lat = IntersectionLattice(labs, lat.gram)
    saddles = [x for x in labs if x[0] in "pq" and x[1:].isdigit() and int(x[1:]) % 2 == 1]
    maxima = labs[labs.index("Tl"):]
    order = ["C"] + saddles + ["LL", "UR", "UL", "LR"] + maxima
    lat = lat.permuted(order)
    lat = IntersectionLattice([_final_name(x) for x in lat.labels], lat.gram)
    return DistinguishedBasis.from_lattice(lat)


def tpq2_main_script(p: int, q: int) -> list[Step]:
    tools = (["Q3"] if q > 3 else []) + (["P3"] if p > 3 else []) + ["A"] \
        + (["Q4"] if q > 4 else []) + ["Q1", "Q2", "P1", "P2", "R1"]
    steps = [Step("T", target="P2", tool="Q1"), Step("T", target="P2", tool="P1"),
             Step("T", target="Q2", tool="Q1")]
    steps += [Step("T", target="B", tool=t) for t in tools]
    return steps


def tpq2_target_order(p: int, q: int) -> list[str]:
    return (["P1", "Q1", "R1", "A", "B"] + [f"P{i}" for i in range(2, p)]
            + [f"Q{i}" for i in range(2, q)])


def trivial_reorder(basis: DistinguishedBasis, target: list[str],
                    max_states: int = 200000) -> list[Step]:
    """Rotations and trivial swaps taking the ordering to ``target``.

    Orderings up to trivial swaps are acyclic orientations of the
    intersection graph; a rotation turns the first cycle (a source) into
    a sink.  A best-first search over source-to-sink flips finds the
    orientation of ``target``, after which only trivial swaps remain.
    """
    labs = list(basis.labels)
    if sorted(target) != sorted(labs):
        raise LatticeError("target order must be a permutation of the labels")
    n = len(labs)
    g = basis.gram
    edges = [(labs[i], labs[j]) for i in range(n) for j in range(i + 1, n) if g[i, j]]
    rank_t = {x: i for i, x in enumerate(target)}

    def orient(rank):
        return frozenset((a, b) if rank[a] < rank[b] else (b, a) for a, b in edges)

    goal = orient(rank_t)

    def cost(o):
        return len(o - goal)

    start = orient({x: i for i, x in enumerate(labs)})
    prev: dict = {start: None}
    heap = [(cost(start), 0, start)]
    tick = 0
    found = None
    while heap:
        c, _, o = heapq.heappop(heap)
        if c == 0:
            found = o
            break
        heads = {b for _, b in o}
        for s in labs:
            if s in heads:
                continue
            # s is a source: flip all its edges
            flipped = frozenset((b, a) if a == s else (a, b) for a, b in o)
            if flipped not in prev:
                prev[flipped] = (o, s)
                tick += 1
                heapq.heappush(heap, (cost(flipped), tick, flipped))
        if len(prev) > max_states:
            break
    if found is None:
        raise LatticeError("target ordering is not reachable by trivial mutations")
    flips = []
    o = found
    while prev[o] is not None:
        o, s = prev[o]
        flips.append(s)
    flips.reverse()

    steps: list[Step] = []
    b = basis
    for s in flips:
        while b.labels.index(s) > 0:
            st = Step("S", b.labels.index(s))
            b = mutate(b, st)
            steps.append(st)
        st = Step("C", 2)
        b = mutate(b, st)
        steps.append(st)
    while True:
        cur = b.labels
        bad = next((i for i in range(n - 1) if rank_t[cur[i]] > rank_t[cur[i + 1]]), None)
        if bad is None:
            return steps
        st = Step("S", bad + 1)
        b = mutate(b, st)
        steps.append(st)


def tpq2_trailing_script(p: int, q: int, basis: DistinguishedBasis) -> list[Step]:
    if (p, q) == (4, 5):
        return [Step("T", target=t, tool=x, inverse=inv) for t, tools, inv in TRAIL_45
                for x in tools]
    return trivial_reorder(basis, tpq2_target_order(p, q))


def tpq2_pipeline(p: int, q: int, log: list[Step] | None = None) -> DistinguishedBasis:
    """h_{p,q} divide -> stabilise (d=1) -> mutations -> T_{p,q,2} basis."""
    b = tpq2_initial_basis(p, q)
    b = run_script(b, tpq2_main_script(p, q), cyclic=True, log=log)
    trail = tpq2_trailing_script(p, q, b)
    return run_script(b, trail, cyclic=True, log=log)


def tpq2_check(p: int, q: int) -> bool:
    out = tpq2_pipeline(p, q)
    ref = gabrielov_tpqr_form(p, q, 2, strict=False)
    return sign_equivalent(ref, out.lattice)


# -- T_{3,3,3} ----------------------------------------------------------------

T333_FIRST = """\
T d:2 e:1
T d:2 d:1
T e:2 e:1
T e:2 d:1
T f:2 g:1
T f:2 f:1
T g:2 g:1
T g:2 f:1
T f:2 e:1
T f:2 d:1
T g:2 e:1
T g:2 d:1
T f:1 e:1
T f:1 d:1
T g:1 e:1
T g:1 d:1
T a:2 b:1 -1
T a:2 c:1 -1
"""

T333_SECOND = """\
T f e
T f d
T g e
T sq e
T sq g
T sq d
T sq f
T sq c
T b a
T b e
T b g
T b d
T b f
T b c
"""

T333_NAMES = {"a": "A", "b": "B", "sq": "R2", "c": "R1", "f": "P2", "d": "P1",
              "g": "Q2", "e": "Q1"}


def t333_pipeline() -> IntersectionLattice:
    """Stabilised \\check m basis (d=2) twisted to the T_{3,3,3} form.

    The path picture fixing the order of the sixteen intermediate cycles
    is not recoverable from the twist list alone, so the twists are
    applied to homology classes in place (see ``twist_in_place``).  After
    the first list, a:1 (renamed sq) and a:2, .., g:2 are kept and the
    second list runs on them.
    """
    base = acampo_form(hpq_divide(3, 3))
    lat = base.lattice
    lat = lat.permuted([KERNEL[x] for x in "abcdefg"])
    lat = IntersectionLattice(list("abcdefg"), lat.gram)
    st = gabrielov_stabilize(lat, 2)
    b = twist_in_place(st, parse_script(T333_FIRST))
    keep = ["a:1"] + [f"{x}:2" for x in "abcdefg"]
    sub = b.lattice.permuted([x for x in b.labels if x in keep])
    sub = IntersectionLattice(["sq" if x == "a:1" else x.split(":")[0] for x in sub.labels],
                              sub.gram)
    b2 = twist_in_place(DistinguishedBasis.from_lattice(sub), parse_script(T333_SECOND))
    return b2.lattice.relabeled(T333_NAMES)
