"""A'Campo divides: validation, intersection forms, ribbon surfaces.

A divide is given declaratively: branch count, crossings, signed bounded
regions with their corner incidences, and max/min adjacencies.  The
optional ``half_edges`` field lists every branch as the sequence of
crossings it passes through (boundary to boundary); it is only needed to
build the surface.
"""
from __future__ import annotations

import json
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .lattice import DistinguishedBasis, IntersectionLattice


class DivideError(ValueError):
    pass


@dataclass(frozen=True)
class Divide:
    branches: int
    crossings: tuple[str, ...]
    regions: dict[str, str]  # id -> "max" | "min"
    incidence: tuple[tuple[str, str, int], ...]
    adjacency: tuple[tuple[str, str], ...] = ()
    half_edges: tuple[tuple[str, ...], ...] | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "Divide":
        try:
            regions = {str(x["id"]): str(x["sign"]) for x in d["regions"]}
            inc = tuple((str(a), str(b), int(m[0]) if m else 1)
                        for a, b, *m in d["incidence"])
            he = d.get("half_edges")
            return cls(
                branches=int(d["branches"]),
                crossings=tuple(str(c) for c in d["crossings"]),
                regions=regions,
                incidence=inc,
                adjacency=tuple((str(a), str(b)) for a, b in d.get("adjacency", [])),
                half_edges=None if he is None else tuple(tuple(str(c) for c in p) for p in he),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DivideError(f"malformed divide: {e}") from None

    def to_dict(self) -> dict:
        d = {
            "branches": self.branches,
            "crossings": list(self.crossings),
            "regions": [{"id": k, "sign": v} for k, v in self.regions.items()],
            "incidence": [[a, b, m] for a, b, m in self.incidence],
            "adjacency": [list(x) for x in self.adjacency],
        }
        if self.half_edges is not None:
            d["half_edges"] = [list(p) for p in self.half_edges]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class RibbonSurface:
    euler: int
    boundary_components: int
    genus: int
    # vertex -> +1/-1 flips making every band untwisted
    orientation: dict = field(default_factory=dict, compare=False, repr=False)


def validate(d: Divide) -> int:
    """Return mu = 2k - r + 1 after structural checks."""
    k = len(d.crossings)
    if len(set(d.crossings)) != k:
        raise DivideError("duplicate crossing ids")
    if d.branches < 1:
        raise DivideError("a divide needs at least one branch")
    for s in d.regions.values():
        if s not in ("max", "min"):
            raise DivideError(f"region sign must be max or min, got {s!r}")
    xs = set(d.crossings)
    for reg, c, m in d.incidence:
        if reg not in d.regions or c not in xs:
            raise DivideError(f"incidence ({reg}, {c}) names an unknown region or crossing")
        if m < 1:
            raise DivideError("incidence multiplicity must be positive")
    for a, b in d.adjacency:
        if a not in d.regions or b not in d.regions:
            raise DivideError(f"adjacency ({a}, {b}) names an unknown region")
    mu = 2 * k - d.branches + 1
    if len(d.regions) + k != mu:
        raise DivideError(
            f"#regions + k = {len(d.regions) + k} but 2k - r + 1 = {mu}")

    g = nx.Graph()
    if d.half_edges is not None:
        if len(d.half_edges) != d.branches:
            raise DivideError("half_edges must list one path per branch")
        visits = Counter(c for p in d.half_edges for c in p)
        for c in xs:
            if visits[c] != 2:
                raise DivideError(f"crossing {c} has valence {2 * visits[c]}, expected 4")
        if set(visits) - xs:
            raise DivideError("half_edges mention unknown crossings")
        for i, p in enumerate(d.half_edges):
            g.add_node(("branch", i))
            for c in p:
                g.add_edge(("branch", i), c)
    else:
        g.add_nodes_from(xs)
        g.add_nodes_from(("r", x) for x in d.regions)
        for reg, c, _ in d.incidence:
            g.add_edge(("r", reg), c)
        for a, b in d.adjacency:
            g.add_edge(("r", a), ("r", b))
        if d.branches > 1 and k == 0:
            raise DivideError("several branches without crossings are disconnected")
    if g.number_of_nodes() and not nx.is_connected(g):
        raise DivideError("divide is disconnected")
    return mu


def acampo_form(d: Divide) -> DistinguishedBasis:
    """Intersection form in the basis minima, saddles, maxima."""
    validate(d)
    mins = [r for r, s in d.regions.items() if s == "min"]
    maxs = [r for r, s in d.regions.items() if s == "max"]
    labels = mins + list(d.crossings) + maxs
    ix = {x: i for i, x in enumerate(labels)}
    n = len(labels)
    g = -2 * np.eye(n, dtype=np.int64)
    mult: Counter = Counter()
    for reg, c, m in d.incidence:
        mult[(reg, c)] += m
    if any(m > 1 for m in mult.values()):
        warnings.warn("a region meets a crossing at several corners; "
                      "entries add up per corner", stacklevel=2)
    for (reg, c), m in mult.items():
        v = m if d.regions[reg] == "max" else -m
        g[ix[reg], ix[c]] += v
        g[ix[c], ix[reg]] += v
    for a, b in d.adjacency:
        if d.regions[a] == d.regions[b]:
            raise DivideError(f"adjacent regions {a}, {b} have the same sign")
        g[ix[a], ix[b]] += 1
        g[ix[b], ix[a]] += 1
    return DistinguishedBasis.from_lattice(IntersectionLattice(labels, g))


# -- ribbon surface ------------------------------------------------------------

def _ribbon_faces(rot: dict, edges: list[tuple[int, int, bool]]) -> tuple[int, dict]:
    """Boundary count of a signed ribbon graph.

    ``rot`` maps vertex -> cyclic list of darts, ``edges`` lists
    (dart, dart, twisted).  Vertex flips are chosen so that every edge
    becomes untwisted; failure means the surface is non-orientable.
    """
    owner = {dt: v for v, ds in rot.items() for dt in ds}
    partner = {}
    g = nx.Graph()
    g.add_nodes_from(rot)
    for a, b, tw in edges:
        partner[a], partner[b] = b, a
        u, v = owner[a], owner[b]
        if u == v:
            if tw:
                raise DivideError("twisted loop: surface is non-orientable")
            continue
        if g.has_edge(u, v) and g[u][v]["tw"] != tw:
            raise DivideError("inconsistent twists: surface is non-orientable")
        g.add_edge(u, v, tw=tw)
    flip: dict = {}
    for comp in nx.connected_components(g):
        root = min(comp, key=repr)
        flip[root] = 1
        for u, v in nx.bfs_edges(g, root):
            flip[v] = flip[u] * (-1 if g[u][v]["tw"] else 1)
        for u, v, tw in g.subgraph(comp).edges(data="tw"):
            if flip[u] * flip[v] != (-1 if tw else 1):
                raise DivideError("twist bookkeeping is non-orientable")
    nxt = {}
    for v, ds in rot.items():
        order = ds if flip[v] == 1 else ds[::-1]
        for i, dt in enumerate(order):
            nxt[dt] = order[(i + 1) % len(order)]
    seen = set()
    faces = 0
    for start in partner:
        if start in seen:
            continue
        faces += 1
        dt = start
        while dt not in seen:
            seen.add(dt)
            dt = nxt[partner[dt]]
    return faces, flip


def divide_to_surface(d: Divide) -> RibbonSurface:
    """Ribbon model of the Milnor fibre built from the branch paths.

    Crossing: four slot vertices joined in a cycle by twisted bands (a
    cylinder).  Divide edge: one half-twisted band between slots.
    Branch end on the disc boundary: a univalent vertex.
    """
    if d.half_edges is None:
        raise DivideError("divide_to_surface needs half_edges")
    mu = validate(d)
    rot: dict = defaultdict(list)
    edges: list[tuple[int, int, bool]] = []
    counter = iter(range(10**9))

    slot_band: dict = {}
    for c in d.crossings:
        core = [(next(counter), next(counter)) for _ in range(4)]  # (to prev, to next)
        for j in range(4):
            prev_d, next_d = core[j]
            band = next(counter)
            slot_band[(c, j)] = band
            rot[(c, j)] = [prev_d, band, next_d]
        for j in range(4):
            edges.append((core[j][1], core[(j + 1) % 4][0], True))

    visit: Counter = Counter()
    for bi, path in enumerate(d.half_edges):
        ends = []
        for c in path:
            first = visit[c] == 0
            visit[c] += 1
            # strand 1 uses slots 0 -> 2, strand 2 uses 1 -> 3: transverse order
            ends.append(((c, 0), (c, 2)) if first else ((c, 1), (c, 3)))
        start = next(counter)
        rot[("end", bi, 0)] = [start]
        stop = next(counter)
        rot[("end", bi, 1)] = [stop]
        prev = start
        for s_in, s_out in ends:
            edges.append((prev, slot_band[s_in], True))
            prev = slot_band[s_out]
        edges.append((prev, stop, True))

    b, flip = _ribbon_faces(dict(rot), edges)
    chi = len(rot) - len(edges)
    if chi != 1 - mu:
        raise DivideError(f"euler characteristic {chi} differs from 1 - mu = {1 - mu}")
    g2 = 2 - chi - b
    if g2 < 0 or g2 % 2:
        raise DivideError("inconsistent boundary count")
    return RibbonSurface(chi, b, g2 // 2, flip)


# -- built-in divides ------------------------------------------------------------

def hpq_divide(p: int, q: int) -> Divide:
    """Divide of the real morsification h_{p,q} of (x^{p-2}-y^2)(x^2-c y^{q-2}).

    A fixed kernel (centre minimum C, saddles UL, UR, LL, LR, maxima Tl,
    Tb) with two chains attached: p3, p4, ... on the m-curve beyond Tl and
    q3, q4, ... on the n-curve beyond Tb.  Odd chain indices are
    crossings, even ones are maxima.  mu = p + q + 1.
    """
    if p < 3 or q < 3:
        raise DivideError("need p, q >= 3")
    crossings = ["UL", "UR", "LL", "LR"]
    regions = {"C": "min", "Tl": "max", "Tb": "max"}
    inc = [("C", c, 1) for c in ("UL", "UR", "LL", "LR")]
    inc += [("Tl", "UL", 1), ("Tl", "LL", 1), ("Tb", "LL", 1), ("Tb", "LR", 1)]
    paths = []
    for arm, n, top, (a0, a1), (b0, b1) in (
        ("p", p, "Tl", ("UR", "UL"), ("LR", "LL")),
        ("q", q, "Tb", ("UL", "LL"), ("UR", "LR")),
    ):
        chain = [f"{arm}{i}" for i in range(3, n) if i % 2 == 1]
        for i in range(3, n):
            name = f"{arm}{i}"
            if i % 2 == 1:
                crossings.append(name)
            else:
                regions[name] = "max"
                inc.append((name, f"{arm}{i - 1}", 1))
                if i + 1 < n:
                    inc.append((name, f"{arm}{i + 1}", 1))
        if n > 3:
            inc.append((top, f"{arm}3", 1))
        if n % 2 == 0:
            paths.append([a0, a1] + chain)
            paths.append([b0, b1] + chain)
        else:
            # the two strands close up in a tip beyond the last chain crossing
            paths.append([a0, a1] + chain + chain[::-1] + [b1, b0])
    return Divide(
        branches=len(paths),
        crossings=tuple(crossings),
        regions=regions,
        incidence=tuple(inc),
        adjacency=(("C", "Tl"), ("C", "Tb")),
        half_edges=tuple(tuple(x) for x in paths),
    )


def kernel_divide() -> Divide:
    """The seven-cycle kernel divide (the real picture of \\check m)."""
    return hpq_divide(3, 3)


def four_lines_divide() -> Divide:
    """Divide of xy(x-y+2)(x+y+1): four generic lines, 6 crossings.

    Crossing ``ij`` is the intersection of lines i and j (1: x=0, 2: y=0,
    3: y=x+2, 4: y=-x-1).  Bounded regions: two triangles where f > 0
    (maxima) and one quadrilateral where f < 0 (minimum).
    """
    return Divide(
        branches=4,
        crossings=("12", "13", "14", "23", "24", "34"),
        regions={"T1": "max", "T2": "max", "Q": "min"},
        incidence=(
            ("T1", "12", 1), ("T1", "24", 1), ("T1", "14", 1),
            ("T2", "23", 1), ("T2", "24", 1), ("T2", "34", 1),
            ("Q", "12", 1), ("Q", "13", 1), ("Q", "34", 1), ("Q", "24", 1),
        ),
        adjacency=(("T1", "Q"), ("T2", "Q")),
        half_edges=(
            ("14", "12", "13"),
            ("23", "24", "12"),
            ("23", "34", "13"),
            ("34", "24", "14"),
        ),
    )


def smooth_arc() -> Divide:
    return Divide(1, (), {}, (), (), ((),))
