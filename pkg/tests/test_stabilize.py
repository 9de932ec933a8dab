from __future__ import annotations

import numpy as np
import pytest

from tpqrkit.divides import acampo_form, four_lines_divide
from tpqrkit.lattice import LatticeError, invariants, run_script
from tpqrkit.stabilize import a_chain, gabrielov_stabilize, to_sheet_major


def test_size_and_labels():
    b = gabrielov_stabilize(a_chain(3), 2)
    assert b.mu == 6
    assert b.labels[:2] == ("v1:1", "v1:2")


def test_a1_twice_is_a2():
    got = invariants(gabrielov_stabilize(a_chain(1), 2).lattice)
    assert got == invariants(a_chain(2))


def test_a3_cubed_matches_four_lines():
    # both model x^4 + y^4 + z^2
    a = invariants(gabrielov_stabilize(a_chain(3), 3).lattice)
    b = invariants(acampo_form(four_lines_divide()).lattice)
    assert (a.smith, abs(a.det), a.nullity) == (b.smith, abs(b.det), b.nullity)


def test_d1_is_identity():
    lat = a_chain(4)
    out = gabrielov_stabilize(lat, 1).lattice
    assert np.array_equal(out.gram, lat.gram)


def test_sheet_major_swaps_are_trivial():
    st = gabrielov_stabilize(a_chain(3), 3)
    out = run_script(st, to_sheet_major(3, 3))
    assert out.labels == ("v1:1", "v2:1", "v3:1", "v1:2", "v2:2", "v3:2",
                          "v1:3", "v2:3", "v3:3")
    assert invariants(out.lattice) == invariants(st.lattice)


def test_bad_degree():
    with pytest.raises(LatticeError):
        gabrielov_stabilize(a_chain(2), 0)
    with pytest.raises(LatticeError):
        gabrielov_stabilize(a_chain(2), 2, chain_sign=2)
