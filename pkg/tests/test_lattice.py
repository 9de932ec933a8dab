from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from tpqrkit.lattice import (DistinguishedBasis, IntersectionLattice, LatticeError, Step,
                             det, format_script, gabrielov_tpqr_form, invariants, kernel_basis,
                             mutate, parse_script, resolve_twist, run_script, sign_equivalent,
                             signature, smith_form, torus_class_report, tpqr_labels)

from helpers import random_lattice


def test_rejects_bad_gram():
    with pytest.raises(LatticeError):
        IntersectionLattice(["a", "b"], [[-2, 1], [0, -2]])
    with pytest.raises(LatticeError):
        IntersectionLattice(["a"], [[-1]])
    with pytest.raises(LatticeError):
        IntersectionLattice(["a", "a"], [[-2, 0], [0, -2]])


def test_json_roundtrip():
    lat = gabrielov_tpqr_form(3, 4, 5)
    assert IntersectionLattice.from_dict(lat.to_dict()) == lat


@pytest.mark.parametrize("seed", range(6))
def test_exact_algebra_matches_sympy(seed):
    rng = np.random.default_rng(seed)
    m = rng.integers(-3, 4, size=(6, 6))
    m = m + m.T
    sm = sympy.Matrix(m.tolist())
    assert det(m) == int(sm.det())
    from sympy.matrices.normalforms import smith_normal_form
    ref = sorted(abs(int(x)) for x in smith_normal_form(sm, domain=sympy.ZZ).diagonal())
    assert sorted(smith_form(m)) == ref
    ev = np.linalg.eigvalsh(m.astype(float))
    assert signature(m) == (int((ev > 1e-9).sum()), int((ev < -1e-9).sum()))


def test_kernel_basis_is_kernel():
    lat = gabrielov_tpqr_form(3, 3, 3)
    ker = kernel_basis(lat.gram)
    assert len(ker) == 2
    for v in ker:
        assert not np.any(lat.gram @ np.array(v))


def test_tpqr_reference_forms():
    lat = gabrielov_tpqr_form(3, 3, 3)
    assert lat.mu == 8 and lat.pair("A", "B") == -2
    assert invariants(lat).nullity == 2
    assert invariants(gabrielov_tpqr_form(3, 4, 5)).nullity == 1
    assert torus_class_report(lat) == {"in_nullspace": True, "primitive": True}
    with pytest.raises(LatticeError):
        gabrielov_tpqr_form(3, 3, 2)
    assert gabrielov_tpqr_form(3, 3, 2, strict=False).mu == 7
    assert tpqr_labels(3, 3, 2) == ["A", "B", "P1", "P2", "Q1", "Q2", "R1"]


def test_right_mutation_is_reflection():
    lat = IntersectionLattice(["a", "b"], [[-2, 1], [1, -2]])
    b = mutate(DistinguishedBasis.from_lattice(lat), Step("R", 1))
    # tau_a(b) = b + <a,b> a = a + b, then a
    assert b.coords[:, 0].tolist() == [1, 1]
    assert b.coords[:, 1].tolist() == [1, 0]
    assert b.consistent()


def test_swap_requires_orthogonal():
    lat = IntersectionLattice(["a", "b"], [[-2, 1], [1, -2]])
    with pytest.raises(LatticeError):
        mutate(DistinguishedBasis.from_lattice(lat), Step("S", 1))


def test_rotation_is_permutation():
    lat = gabrielov_tpqr_form(3, 3, 3)
    b = mutate(DistinguishedBasis.from_lattice(lat), Step("C", 2))
    assert b.labels == lat.labels[1:] + lat.labels[:1]
    assert sign_equivalent(lat, b.lattice)


def test_script_roundtrip_and_errors():
    text = "R 1\nL 2 # comment\nS 3\nC 1\nT a b\nT a b -1\n"
    steps = parse_script(text)
    assert parse_script(format_script(steps)) == steps
    with pytest.raises(LatticeError, match="line 1"):
        parse_script("X 1")


def test_named_twist_reaches_target():
    lat = IntersectionLattice(["a", "b", "c"], [[-2, 0, 1], [0, -2, 0], [1, 0, -2]])
    b = DistinguishedBasis.from_lattice(lat)
    steps = resolve_twist(b, "c", "a")
    out = run_script(b, steps)
    assert out.history["c"] == ("t[a]",)
    assert out.consistent()


def test_sign_equivalence_detects_mismatch():
    a = gabrielov_tpqr_form(3, 3, 3)
    g = a.gram.copy()
    g[0, 2] = g[2, 0] = -1  # flip one edge of the A-P-B triangle only
    assert not sign_equivalent(a, IntersectionLattice(a.labels, g))
    d = np.diag([1, -1, 1, 1, -1, 1, 1, -1])
    assert sign_equivalent(a, IntersectionLattice(a.labels, d @ a.gram @ d))


words = st.lists(st.tuples(st.sampled_from("RLC"), st.integers(1, 7)), min_size=1, max_size=12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10 ** 6), word=words)
def test_mutation_preserves_invariants(seed, word):
    lat = random_lattice(np.random.default_rng(seed), 8)
    b = DistinguishedBasis.from_lattice(lat)
    for k, i in word:
        b = mutate(b, Step(k, i))
    assert invariants(b.lattice) == invariants(lat)
    assert b.consistent()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6), i=st.integers(1, 6))
def test_left_undoes_right(seed, i):
    b = DistinguishedBasis.from_lattice(random_lattice(np.random.default_rng(seed), 7))
    back = mutate(mutate(b, Step("R", i)), Step("L", i))
    assert np.array_equal(back.coords, b.coords)
    assert back.lattice == b.lattice


def test_torus_report_on_a2():
    lat = IntersectionLattice(["A", "B"], [[-2, 1], [1, -2]])
    assert torus_class_report(lat) == {"in_nullspace": False, "primitive": True}
    with pytest.raises(LatticeError):
        torus_class_report(IntersectionLattice(["x"], [[-2]]))
