from __future__ import annotations

import pytest

from tpqrkit.divides import (Divide, DivideError, acampo_form, divide_to_surface,
                             four_lines_divide, hpq_divide, kernel_divide, smooth_arc, validate)
from tpqrkit.lattice import invariants


def test_four_lines():
    d = four_lines_divide()
    assert validate(d) == 9
    assert invariants(acampo_form(d).lattice).nullity == 2
    s = divide_to_surface(d)
    assert (s.genus, s.boundary_components) == (3, 4)


def test_kernel_twice_punctured_genus_three():
    d = kernel_divide()
    assert validate(d) == 7
    s = divide_to_surface(d)
    assert (s.genus, s.boundary_components, s.euler) == (3, 2, -6)


def test_smooth_arc_is_a_disc():
    s = divide_to_surface(smooth_arc())
    assert (s.euler, s.genus, s.boundary_components) == (1, 0, 1)
    assert acampo_form(smooth_arc()).mu == 0


@pytest.mark.parametrize("p,q", [(3, 3), (4, 4), (4, 5), (5, 7)])
def test_hpq_milnor_number(p, q):
    # h_{p,q} has the kernel's 7 cycles plus (p-3)+(q-3) chain cycles
    d = hpq_divide(p, q)
    assert validate(d) == p + q + 1
    s = divide_to_surface(d)
    assert s.euler == 1 - (p + q + 1)


def test_json_roundtrip():
    d = four_lines_divide()
    assert Divide.from_dict(d.to_dict()) == d


def test_euler_count_mismatch_rejected():
    d = four_lines_divide().to_dict()
    d["regions"] = d["regions"][:-1]
    d["incidence"] = [x for x in d["incidence"] if x[0] != "Q"]
    with pytest.raises(DivideError):
        validate(Divide.from_dict(d))


def test_malformed_rejected():
    with pytest.raises(DivideError):
        Divide.from_dict({"branches": 1})
