from __future__ import annotations

import pytest

from tpqrkit.quiver import (Quiver, QuiverError, arm_complex, arm_hom_table, chen_krause_quiver,
                            comp, fukaya_quiver, path_algebra, single, tpqr_fukaya_algebra,
                            twisted_hom, verify_mirror)


@pytest.mark.parametrize("pqr", [(3, 3, 3), (4, 4, 2), (6, 3, 2), (3, 4, 5), (5, 5, 5)])
def test_mirror(pqr):
    rep = verify_mirror(*pqr)
    assert rep["pass"], rep["failures"]
    assert rep["dim_A"] == rep["dim_End"]


def test_perturbed_relation_fails_with_witness():
    p, q, r = 3, 3, 3
    rep = verify_mirror(p, q, r, path_algebra(chen_krause_quiver(p, q, r, perturb=True)))
    assert not rep["pass"]
    assert any(f["kind"] == "relation" and f["witness"] for f in rep["failures"])


@pytest.mark.parametrize("m", [3, 4, 6])
def test_arm_homs(m):
    # Hom(P'_i, P'_j) is one-dimensional in degree 0 for i <= j, zero otherwise
    tab = arm_hom_table(m, "P")
    for (i, j), h in tab.items():
        assert h == ({0: 1} if i <= j else {})


def test_fukaya_algebra_small_homs():
    alg = tpqr_fukaya_algebra(3, 3, 3)
    assert alg.dim("A", "B") == 2
    assert alg.dim("A", "P1") == 1  # u.p_B survives, v.p_B = 0
    assert alg.dim("P1", "P2") == 1
    assert alg.dim("B", "P2") == 0  # p_1 after p_B vanishes
    assert alg.dim("P2", "P1") == 0


def test_arm_complex_endomorphisms():
    alg = tpqr_fukaya_algebra(4, 3, 3)
    c = arm_complex(alg, "P", 3)
    assert twisted_hom(alg, c, c) == {0: 1}
    assert twisted_hom(alg, single("A"), single("A")) == {0: 1}


def test_quiver_roundtrip_and_cycles_rejected():
    q = chen_krause_quiver(3, 4, 5)
    assert Quiver.from_dict(q.to_dict()) == q
    d = fukaya_quiver(3, 3, 3).to_dict()
    d["arrows"].append({"name": "back", "src": "P2", "dst": "A"})
    with pytest.raises(QuiverError):
        path_algebra(Quiver.from_dict(d))


def test_comp_is_traversal_order():
    assert comp("g", "f") == ("f", "g")
