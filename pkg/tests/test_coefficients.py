from fractions import Fraction

import pytest

from heatspec.coefficients import (
    HeatCoefficientSet,
    a0,
    a1,
    a3_section4_form,
    heat_coefficients,
    star_bracket,
)
from heatspec.exact import ExactValue
from heatspec.exterior import PAIRS
from heatspec.geometry import catalog, cylinder, disk, hemisphere, interval

SP = ExactValue.sqrt_pi()
F = Fraction


def ev(q, k=0):
    return ExactValue(Fraction(q), k)


# closed forms worked out by hand for the catalog
CASES = [
    (disk(1), 0, "dirichlet", [ev(F(1, 4)), -SP / 4, ev(F(1, 6)), SP / 128]),
    (disk(1), 0, "neumann", [ev(F(1, 4)), SP / 4, ev(F(1, 6)), 5 * SP / 128]),
    (disk(1), 1, "absolute", [ev(F(1, 2)), ev(0), ev(F(-2, 3)), 3 * SP / 64]),
    (disk(1), 1, "relative", [ev(F(1, 2)), ev(0), ev(F(-2, 3)), 3 * SP / 64]),
    (hemisphere(), 0, "dirichlet", [ev(F(1, 2)), -SP / 4, ev(F(1, 6)), -SP / 16]),
    (hemisphere(), 0, "neumann", [ev(F(1, 2)), SP / 4, ev(F(1, 6)), SP / 16]),
    (cylinder(), 0, "dirichlet", [ev(F(1, 2), 2), -SP / 2, ev(0), ev(0)]),
    (cylinder(), 0, "neumann", [ev(F(1, 2), 2), SP / 2, ev(0), ev(0)]),
    (interval(), 0, "dirichlet", [SP / 2, ev(F(-1, 2)), ev(0), ev(0)]),
    (interval(), 0, "neumann", [SP / 2, ev(F(1, 2)), ev(0), ev(0)]),
]


@pytest.mark.parametrize("mdl,p,bc,want", CASES, ids=lambda x: getattr(x, "name", str(x)))
def test_closed_forms(mdl, p, bc, want):
    assert list(heat_coefficients(mdl, p, bc).a) == want


def test_a0_depends_only_on_rank_and_volume():
    assert a0(disk(1), 1) == 2 * a0(disk(1), 0)
    assert a0(disk(1), 2) == a0(disk(1), 0)
    assert a0(hemisphere(), 0) == 2 * a0(disk(1), 0)


def test_a1_one_forms_at_m2_vanishes():
    # chi has trace zero on Lambda^1 of a surface
    assert a1(disk(1), 1, "absolute") == 0


@pytest.mark.parametrize("mdl", [disk(1), hemisphere(), cylinder()])
def test_pi_exponent_parity_alternates(mdl):
    a = heat_coefficients(mdl, 0, "dirichlet").a
    parities = [v.pi_half_exponent % 2 for v in a if not v.is_zero()]
    assert a[0].pi_half_exponent % 2 != a[1].pi_half_exponent % 2
    assert len(set(parities)) == 2


@pytest.mark.parametrize("R", [Fraction(1, 3), Fraction(1, 2), 2, 3])
def test_disk_scaling(R):
    # a_n(disk(R)) = R^{2-n} a_n(disk(1))
    base = heat_coefficients(disk(1), 0, "dirichlet").a
    scaled = heat_coefficients(disk(R), 0, "dirichlet").a
    for n in range(4):
        assert scaled[n] == base[n] * ExactValue(Fraction(R) ** (2 - n))


@pytest.mark.parametrize("mdl", catalog() + [disk(2), disk(Fraction(1, 2))], ids=lambda m: m.name)
@pytest.mark.parametrize("pair", sorted(PAIRS))
def test_pair_form_matches_general_evaluator(mdl, pair):
    a, b = a3_section4_form(mdl, pair)
    (p0, bc0), (p1, bc1) = PAIRS[pair]
    assert a == heat_coefficients(mdl, p0, bc0).a[3]
    assert b == heat_coefficients(mdl, p1, bc1).a[3]


def test_star_bracket_values():
    # hemisphere Dirichlet: -16 tau + 8 rho with tau = 2, rho = 1
    assert star_bracket(2, 0, "dirichlet", 2) == -24
    assert star_bracket(2, 0, "neumann", 2) == 24
    assert star_bracket(3, 1, "absolute", 0) == 0


def test_json_round_trip():
    cs = heat_coefficients(disk(1), 0, "dirichlet")
    back = HeatCoefficientSet.from_json(cs.to_json())
    assert back == cs
    assert cs.to_json()["coefficients"][3]["text"] == "1/128*sqrt(pi)"


def test_degree_out_of_range():
    with pytest.raises(ValueError):
        heat_coefficients(disk(1), 3, "dirichlet")
