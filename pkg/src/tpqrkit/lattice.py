"""Exact integer intersection lattices, distinguished bases and mutations.

Everything here works over the integers (or exact rationals for the
signature) so that comparisons between lattices are exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class LatticeError(ValueError):
    """Raised for malformed lattices and illegal mutation steps."""


def _as_gram(gram) -> np.ndarray:
    g = np.array(gram, dtype=np.int64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise LatticeError("gram must be a square matrix")
    return g


@dataclass(frozen=True)
class IntersectionLattice:
    labels: tuple[str, ...]
    gram: np.ndarray

    def __init__(self, labels: Iterable[str], gram, check: bool = True):
        object.__setattr__(self, "labels", tuple(str(x) for x in labels))
        g = _as_gram(gram)
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        if check:
            self.check()

    def check(self) -> None:
        n = len(self.labels)
        if self.gram.shape != (n, n):
            raise LatticeError(f"{n} labels but gram has shape {self.gram.shape}")
        if len(set(self.labels)) != n:
            raise LatticeError("labels must be distinct")
        if not np.array_equal(self.gram, self.gram.T):
            raise LatticeError("gram is not symmetric")
        if n and not np.all(np.diag(self.gram) == -2):
            raise LatticeError("diagonal entries must all be -2")

    @property
    def mu(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LatticeError(f"unknown label {label!r}") from None

    def pair(self, a: str, b: str) -> int:
        return int(self.gram[self.index(a), self.index(b)])

    def permuted(self, order: Sequence[str]) -> "IntersectionLattice":
        idx = [self.index(x) for x in order]
        return IntersectionLattice(order, self.gram[np.ix_(idx, idx)])

    def relabeled(self, mapping: dict[str, str]) -> "IntersectionLattice":
        return IntersectionLattice([mapping.get(x, x) for x in self.labels], self.gram)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "gram": self.gram.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "IntersectionLattice":
        try:
            return cls(d["labels"], d["gram"])
        except KeyError as e:
            raise LatticeError(f"lattice JSON lacks field {e}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntersectionLattice):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.gram, other.gram)

    def __hash__(self) -> int:
        return hash((self.labels, self.gram.tobytes()))


@dataclass(frozen=True)
class DistinguishedBasis:
    lattice: IntersectionLattice
    coords: np.ndarray
    gram0: np.ndarray
    history: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_lattice(cls, lat: IntersectionLattice) -> "DistinguishedBasis":
        n = lat.mu
        return cls(lat, np.eye(n, dtype=np.int64), lat.gram.copy(), {})

    @property
    def labels(self) -> tuple[str, ...]:
        return self.lattice.labels

    @property
    def gram(self) -> np.ndarray:
        return self.lattice.gram

    @property
    def mu(self) -> int:
        return self.lattice.mu

    def consistent(self) -> bool:
        c = self.coords
        return np.array_equal(c.T @ self.gram0 @ c, self.gram) and abs(det(c)) == 1


@dataclass(frozen=True)
class LatticeInvariants:
    rank_of_form: int
    nullity: int
    det: int
    signature: tuple[int, int]
    smith: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"rank": self.rank_of_form, "nullity": self.nullity, "det": self.det,
                "signature": list(self.signature), "smith": list(self.smith)}


# -- exact integer linear algebra -------------------------------------------

def det(m) -> int:
    """Bareiss fraction-free determinant."""
    a = [[int(v) for v in row] for row in np.asarray(m).tolist()]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_form(m) -> list[int]:
    """Diagonal of the Smith normal form (non-negative, divisibility chain)."""
    a = [[int(v) for v in row] for row in np.asarray(m).tolist()]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag: list[int] = []
    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute value in the trailing block
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    done = False
            if done:
                # enforce divisibility into the rest of the block
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move a smaller remainder into the pivot
            best = None
            for i in range(t + 1, rows):
                if a[i][t] and (best is None or abs(a[i][t]) < abs(best[2])):
                    best = (i, None, a[i][t])
            for j in range(t + 1, cols):
                if a[t][j] and (best is None or abs(a[t][j]) < abs(best[2])):
                    best = (None, j, a[t][j])
            if best is not None and abs(best[2]) < abs(p):
                if best[0] is not None:
                    a[t], a[best[0]] = a[best[0]], a[t]
                else:
                    for row in a:
                        row[t], row[best[1]] = row[best[1]], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag + [0] * (min(rows, cols) - len(diag))


def signature(m) -> tuple[int, int]:
    """(n_plus, n_minus) by symmetric rational elimination (congruences only)."""
    a = [[Fraction(int(v)) for v in row] for row in np.asarray(m).tolist()]
    n = len(a)
    pos = neg = 0
    alive = list(range(n))
    while alive:
        k = next((i for i in alive if a[i][i] != 0), None)
        if k is None:
            # zero diagonal: use an off-diagonal entry to create a nonzero pivot
            pair = next(((i, j) for i in alive for j in alive if i != j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes a[i][i] = 2 a[i][j] + a[j][j] = 2 a[i][j]
            for c in range(n):
                a[i][c] += a[j][c]
            for r in range(n):
                a[r][i] += a[r][j]
            continue
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        alive.remove(k)
        for i in alive:
            f = a[i][k] / p
            if f:
                for c in alive:
                    a[i][c] -= f * a[k][c]
        for i in alive:
            a[i][k] = a[k][i] = Fraction(0)
    return pos, neg


def invariants(lat: IntersectionLattice) -> LatticeInvariants:
    g = lat.gram
    sm = smith_form(g)
    rank = sum(1 for d in sm if d)
    sig = signature(g)
    return LatticeInvariants(rank, lat.mu - rank, det(g), sig, tuple(sm))


def kernel_basis(m) -> list[list[int]]:
    """Integer basis (primitive vectors) of the rational kernel of m."""
    a = [[Fraction(int(v)) for v in row] for row in np.asarray(m).tolist()]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    out = []
    for free in (c for c in range(cols) if c not in pivots):
        v = [Fraction(0)] * cols
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][free]
        den = math.lcm(*(x.denominator for x in v))
        iv = [int(x * den) for x in v]
        g = math.gcd(*iv)
        out.append([x // g for x in iv])
    return out


# -- reflections and mutations ----------------------------------------------

def reflect(lat: IntersectionLattice, a: int, x) -> np.ndarray:
    """Picard-Lefschetz reflection tau_a(x) = x + <e_a, x> e_a in coordinates."""
    if not 0 <= a < lat.mu:
        raise LatticeError(f"index {a} out of range for mu={lat.mu}")
    v = np.array(x, dtype=np.int64)
    if v.shape != (lat.mu,):
        raise LatticeError(f"vector length {v.shape} does not match mu={lat.mu}")
    out = v.copy()
    out[a] += int(lat.gram[a] @ v)
    return out


def reflect_vec(gram: np.ndarray, a, x) -> np.ndarray:
    """tau_a(x) for arbitrary integer vectors a, x w.r.t. gram."""
    a = np.asarray(a, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    return x + int(a @ gram @ x) * a


@dataclass(frozen=True)
class Step:
    kind: str  # "R", "L", "S", "C", "T"
    position: int = 0  # 1-based
    target: str = ""
    tool: str = ""
    inverse: bool = False

    def text(self) -> str:
        if self.kind == "T":
            return f"T {self.target} {self.tool}" + (" -1" if self.inverse else "")
        return f"{self.kind} {self.position}"


def _step_matrix(g: np.ndarray, a: int, kind: str) -> np.ndarray:
    n = g.shape[0]
    b = a + 1
    x = int(g[a, b])
    m = np.eye(n, dtype=np.int64)
    m[:, a] = 0
    m[:, b] = 0
    m[b, a] = 1
    m[a, b] = 1
    if kind == "R":
        m[a, a] = x
    else:
        m[b, b] = x
    return m


def mutate(basis: DistinguishedBasis, step: Step | tuple) -> DistinguishedBasis:
    """Apply one elementary step (R, L, S at a 1-based position, or C rotation)."""
    if isinstance(step, tuple):
        step = Step(step[0], int(step[1]))
    n = basis.mu
    labels = list(basis.labels)
    if step.kind == "C":
        k = step.position - 1
        if not 0 <= k < max(n, 1):
            raise LatticeError(f"rotation start {step.position} out of range")
        perm = list(range(k, n)) + list(range(k))
        m = np.eye(n, dtype=np.int64)[:, perm]
        lat = IntersectionLattice([labels[i] for i in perm], m.T @ basis.gram @ m, check=False)
        return DistinguishedBasis(lat, basis.coords @ m, basis.gram0, dict(basis.history))
    if step.kind not in ("R", "L", "S"):
        raise LatticeError(f"not an elementary step: {step.kind}")
    if not 1 <= step.position <= n - 1:
        raise LatticeError(f"position {step.position} outside [1, {n - 1}]")
    a = step.position - 1
    x = int(basis.gram[a, a + 1])
    if step.kind == "S" and x != 0:
        raise LatticeError(
            f"swap of {labels[a]} and {labels[a + 1]} is not trivial (pairing {x})")
    m = _step_matrix(basis.gram, a, "R" if step.kind == "S" else step.kind)
    hist = dict(basis.history)
    if x != 0:
        if step.kind == "R":
            moved, tool, sym = labels[a + 1], labels[a], "t"
        else:
            moved, tool, sym = labels[a], labels[a + 1], "t^-1"
        hist[moved] = hist.get(moved, ()) + (f"{sym}[{tool}]",)
    labels[a], labels[a + 1] = labels[a + 1], labels[a]
    lat = IntersectionLattice(labels, m.T @ basis.gram @ m, check=False)
    return DistinguishedBasis(lat, basis.coords @ m, basis.gram0, hist)


def resolve_twist(basis: DistinguishedBasis, target: str, tool: str,
                  inverse: bool = False, cyclic: bool = False,
                  either: bool = False) -> list[Step]:
    """Elementary steps realising target -> tau_tool^{+-1}(target).

    The target is brought next to the tool by trivial swaps only; a
    non-trivial blocker raises.  With ``cyclic`` the ordering may first be
    rotated so that the tool precedes the target (or follows it, for an
    inverse twist).  With ``either`` a target on the wrong side is moved
    by the opposite elementary mutation instead; on homology
    tau^-1 = tau, so only the resulting order differs.
    """
    labels = list(basis.labels)
    g = basis.gram
    if target not in labels or tool not in labels:
        raise LatticeError(f"unknown label in twist {target} by {tool}")
    if target == tool:
        raise LatticeError("a cycle cannot be twisted along itself")
    steps: list[Step] = []
    i, j = labels.index(tool), labels.index(target)
    wrong = j < i if not inverse else j > i
    if wrong and either:
        # tau and tau^-1 agree on homology; slide the path the other way round
        inverse = not inverse
    elif wrong:
        if not cyclic:
            raise LatticeError(f"{target} is on the wrong side of {tool}")
        start = i if not inverse else j
        st = Step("C", start + 1)
        steps.append(st)
        basis = mutate(basis, st)
        labels, g = list(basis.labels), basis.gram
    while True:
        i, j = labels.index(tool), labels.index(target)
        if not inverse:
            if j == i + 1:
                steps.append(Step("R", i + 1))
                return steps
            k = j - 1
        else:
            if i == j + 1:
                steps.append(Step("L", j + 1))
                return steps
            k = j
        if g[k, k + 1] != 0:
            other = labels[k] if k != j else labels[k + 1]
            raise LatticeError(
                f"cannot bring {target} next to {tool}: blocked by {other}")
        st = Step("S", k + 1)
        steps.append(st)
        basis = mutate(basis, st)
        labels, g = list(basis.labels), basis.gram


def run_script(basis: DistinguishedBasis, steps: Iterable[Step], cyclic: bool = False,
               log: list[Step] | None = None, either: bool = False) -> DistinguishedBasis:
    """Execute a script; named twists are resolved against the current state."""
    for st in steps:
        if st.kind == "T":
            elem = resolve_twist(basis, st.target, st.tool, st.inverse, cyclic, either)
        else:
            elem = [st]
        for e in elem:
            basis = mutate(basis, e)
            if log is not None:
                log.append(e)
    return basis


def twist_in_place(basis: DistinguishedBasis, steps: Iterable[Step]) -> DistinguishedBasis:
    """Apply named twists to homology classes without moving any cycle.

    Each ``T target tool`` replaces the class of target by its reflection
    in tool; the ordering is left alone.  This is the homology content of
    a twist script when the path order is not tracked.
    """
    coords = basis.coords.copy()
    labels = list(basis.labels)
    g0 = basis.gram0
    hist = dict(basis.history)
    for st in steps:
        if st.kind != "T":
            raise LatticeError("twist_in_place only takes named twists")
        try:
            t, x = labels.index(st.target), labels.index(st.tool)
        except ValueError:
            raise LatticeError(f"unknown label in twist {st.target} by {st.tool}") from None
        coords[:, t] = reflect_vec(g0, coords[:, x], coords[:, t])
        hist[st.target] = hist.get(st.target, ()) + (f"t[{st.tool}]",)
    lat = IntersectionLattice(labels, coords.T @ g0 @ coords)
    return DistinguishedBasis(lat, coords, g0, hist)


def parse_script(text: str) -> list[Step]:
    steps = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0].upper()
        try:
            if kind in ("R", "L", "S", "C") and len(tok) == 2:
                steps.append(Step(kind, int(tok[1])))
            elif kind == "T" and len(tok) in (3, 4):
                inv = len(tok) == 4
                if inv and tok[3] != "-1":
                    raise ValueError(tok[3])
                steps.append(Step("T", target=tok[1], tool=tok[2], inverse=inv))
            else:
                raise ValueError(line)
        except ValueError:
            raise LatticeError(f"line {n}: cannot parse step {raw!r}") from None
    return steps


def format_script(steps: Iterable[Step]) -> str:
    return "".join(s.text() + "\n" for s in steps)


# -- reference forms and comparisons ------------------------------------------

def tpqr_labels(p: int, q: int, r: int) -> list[str]:
    return (["A", "B"] + [f"P{i}" for i in range(1, p)] + [f"Q{i}" for i in range(1, q)]
            + [f"R{i}" for i in range(1, r)])


def gabrielov_tpqr_form(p: int, q: int, r: int, strict: bool = True) -> IntersectionLattice:
    """Reference Dynkin form of T_{p,q,r}.

    ``strict=False`` skips the 1/p+1/q+1/r <= 1 check so the same
    combinatorial recipe can be compared against the elliptic cases
    (e.g. (3,3,2)) which the T_{p,q,2} pipeline also covers.
    """
    if p < 3 or q < 3 or r < 2:
        raise LatticeError("need p, q >= 3 and r >= 2")
    if strict and Fraction(1, p) + Fraction(1, q) + Fraction(1, r) > 1:
        raise LatticeError(f"1/p+1/q+1/r > 1 for ({p},{q},{r})")
    labels = tpqr_labels(p, q, r)
    ix = {x: i for i, x in enumerate(labels)}
    n = len(labels)
    g = -2 * np.eye(n, dtype=np.int64)

    def put(a, b, v):
        g[ix[a], ix[b]] = g[ix[b], ix[a]] = v

    put("A", "B", -2)
    for arm, m in (("P", p), ("Q", q), ("R", r)):
        put("A", arm + "1", 1)
        put("B", arm + "1", 1)
        for i in range(1, m - 1):
            put(f"{arm}{i}", f"{arm}{i + 1}", 1)
    return IntersectionLattice(labels, g)


def sign_equivalent(l1: IntersectionLattice, l2: IntersectionLattice,
                    match_labels: bool = True) -> bool:
    """True if D G1 D = G2 for some diagonal +-1 matrix D.

    With ``match_labels`` the second lattice is first permuted into the
    label order of the first.  Signs are propagated greedily along a
    spanning forest of the nonzero-entry graph; that is complete, since
    each connected component admits at most two compatible sign choices.
    """
    if match_labels:
        if set(l1.labels) != set(l2.labels):
            return False
        l2 = l2.permuted(l1.labels)
    g1, g2 = l1.gram, l2.gram
    if g1.shape != g2.shape or not np.array_equal(np.abs(g1), np.abs(g2)):
        return False
    n = g1.shape[0]
    s = [0] * n
    for root in range(n):
        if s[root]:
            continue
        s[root] = 1
        stack = [root]
        while stack:
            i = stack.pop()
            for j in np.nonzero(g1[i])[0]:
                j = int(j)
                if j == i:
                    continue
                want = s[i] * (1 if g1[i, j] == g2[i, j] else -1)
                if s[j] == 0:
                    s[j] = want
                    stack.append(j)
                elif s[j] != want:
                    return False
    return True


def torus_class_report(lat: IntersectionLattice) -> dict:
    """Is [A]-[B] in the radical of the form, and primitive in H_2 = Z^mu?"""
    try:
        ia, ib = lat.labels.index("A"), lat.labels.index("B")
    except ValueError:
        raise LatticeError("lattice needs labels A and B") from None
    v = np.zeros(lat.mu, dtype=np.int64)
    v[ia], v[ib] = 1, -1
    in_null = not np.any(lat.gram @ v)
    # gcd of coordinates is invariant under unimodular (Smith) base change
    primitive = math.gcd(*(int(x) for x in v)) == 1
    return {"in_nullspace": bool(in_null), "primitive": bool(primitive)}
