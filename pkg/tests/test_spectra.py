import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heatspec.geometry import cylinder, disk, hemisphere, interval
from heatspec.spectra import (
    EigenvalueList,
    SpectrumError,
    TailBoundError,
    bessel_zeros_below,
    cylinder_spectrum,
    disk_spectrum,
    heat_trace,
    hemisphere_spectrum,
    interval_spectrum,
    one_form_spectrum_2d,
    spectrum,
    tail_bound,
)


def lams(s):
    return [round(x, 10) for x in s.lambdas]


def test_interval_examples():
    s = interval_spectrum(math.pi, "dirichlet", 20)
    assert lams(s) == [1, 4, 9, 16] and list(s.multiplicities) == [1] * 4
    assert lams(interval_spectrum(math.pi, "neumann", 10)) == [0, 1, 4, 9]
    assert lams(interval_spectrum(2 * math.pi, "dirichlet", 2)) == [0.25, 1]
    with pytest.raises(SpectrumError):
        interval_spectrum(math.pi, "dirichlet", 0)


def test_disk_examples():
    s = disk_spectrum(1, "dirichlet", 10)
    assert s.lambdas[0] == pytest.approx(2.4048255577**2, rel=1e-10)
    n = disk_spectrum(1, "neumann", 5)
    assert n.lambdas[0] == 0 and n.multiplicities[0] == 1
    assert n.lambdas[1] == pytest.approx(1.8411838**2, rel=1e-7) and n.multiplicities[1] == 2
    big = disk_spectrum(1, "dirichlet", 400)
    small = disk_spectrum(2, "dirichlet", 100)
    assert np.allclose(small.lambdas, big.lambdas / 4, rtol=1e-13)
    assert list(small.multiplicities) == list(big.multiplicities)


@pytest.mark.parametrize("n", range(0, 8))
def test_bessel_zeros_match_mpmath(n):
    zeros = bessel_zeros_below(40.0)
    dzeros = bessel_zeros_below(40.0, derivative=True)
    for k, z in enumerate(zeros[n], start=1):
        assert z == pytest.approx(float(mpmath.besseljzero(n, k)), rel=1e-12)
    # mpmath counts the origin as the first zero of J_0'
    offset = 1 if n == 0 else 0
    for k, z in enumerate(dzeros[n], start=1):
        assert z == pytest.approx(float(mpmath.besseljzero(n, k + offset, derivative=1)), rel=1e-12)


def test_bessel_zero_counts_match_mpmath():
    zeros = bessel_zeros_below(30.0)
    for n in (0, 3, 10, 20):
        count = 0
        while float(mpmath.besseljzero(n, count + 1)) <= 30.0:
            count += 1
        assert len(zeros.get(n, [])) == count


def test_dirichlet_neumann_zeros_interlace():
    j = bessel_zeros_below(200.0)
    jp = bessel_zeros_below(200.0, derivative=True)
    # J_0' has its first nonzero zero past j_{0,1}
    a, b = j[0], jp[0]
    for k in range(min(len(a), len(b)) - 1):
        assert a[k] < b[k] < a[k + 1]
    for n in range(1, 150, 7):
        a, b = jp[n], j[n]
        for k in range(min(len(a), len(b))):
            assert a[k] < b[k]
            if k + 1 < len(a):
                assert b[k] < a[k + 1]


def test_hemisphere_examples():
    d = hemisphere_spectrum("dirichlet", 12)
    assert d.entries == [(2.0, 1), (6.0, 2), (12.0, 3)]
    n = hemisphere_spectrum("neumann", 6)
    assert n.entries == [(0.0, 1), (2.0, 2), (6.0, 3)]
    full = hemisphere_spectrum("dirichlet", 1000).count() + hemisphere_spectrum("neumann", 1000).count()
    L = 31  # 31*32 = 992 <= 1000 < 32*33
    assert full == (L + 1) ** 2


def test_cylinder_examples():
    d = cylinder_spectrum(math.pi, 1, "dirichlet", 5)
    assert d.entries == [(1.0, 1), (2.0, 2), (4.0, 1), (5.0, 4)]
    assert cylinder_spectrum(math.pi, 1, "neumann", 1).lambdas[0] == 0
    assert cylinder_spectrum(2 * math.pi, 1, "dirichlet", 1).lambdas[0] == pytest.approx(0.25)


def test_one_form_rule():
    for mdl in (disk(1), cylinder(), hemisphere()):
        lam = 300.0
        one = one_form_spectrum_2d(mdl, "absolute", lam)
        N = spectrum(mdl, 0, "neumann", lam)
        D = spectrum(mdl, 0, "dirichlet", lam)
        assert one.count() == N.count() + D.count() - 1 + mdl.b1
        rel = one_form_spectrum_2d(mdl, "relative", lam)
        assert np.array_equal(rel.lambdas, one.lambdas)
        assert np.array_equal(rel.multiplicities, one.multiplicities)
    assert one_form_spectrum_2d(disk(1), "absolute", 50).zero_modes() == 0
    assert one_form_spectrum_2d(cylinder(), "absolute", 50).zero_modes() == 1
    with pytest.raises(SpectrumError):
        one_form_spectrum_2d(interval(), "absolute", 50)


def test_one_form_merges_coincident_eigenvalues():
    # j'_{0,k+1} = j_{1,k}: Neumann n=0 and Dirichlet n=1 share values
    one = one_form_spectrum_2d(disk(1), "absolute", 20)
    assert (14.681970642123904, 3) in [(round(l, 15), k) for l, k in one.entries]


def test_list_invariants():
    d = disk_spectrum(1, "dirichlet", 2000)
    assert np.all(np.diff(d.lambdas) > 0) and d.zero_modes() == 0
    assert disk_spectrum(1, "neumann", 100).zero_modes() == 1
    with pytest.raises(SpectrumError):
        EigenvalueList(np.array([2.0, 1.0]), np.array([1, 1]), 3.0, 2, 1.0)
    with pytest.raises(SpectrumError):
        EigenvalueList(np.array([1.0]), np.array([0]), 3.0, 2, 1.0)


@pytest.mark.parametrize(
    "lst",
    [
        lambda L: disk_spectrum(1, "dirichlet", L),
        lambda L: disk_spectrum(1, "neumann", L),
        lambda L: disk_spectrum(0.5, "neumann", L),
        lambda L: hemisphere_spectrum("dirichlet", L),
        lambda L: hemisphere_spectrum("neumann", L),
        lambda L: cylinder_spectrum(math.pi, 1, "neumann", L),
        lambda L: cylinder_spectrum(2.0, 3.0, "dirichlet", L),
        lambda L: interval_spectrum(math.pi, "neumann", L),
        lambda L: one_form_spectrum_2d(disk(1), "absolute", L),
        lambda L: one_form_spectrum_2d(cylinder(), "absolute", L),
    ],
)
def test_weyl_constant_bounds_the_counting_function(lst):
    s = lst(5000.0)
    counts = np.cumsum(s.multiplicities)
    bound = s.weyl_constant * (s.lambdas ** (s.m / 2) + 1)
    # the interval bound is attained, so allow for rounding in the eigenvalues
    assert np.all(counts <= bound * (1 + 1e-12))


def test_weyl_law_leading_term():
    s = disk_spectrum(1, "dirichlet", 1e4)
    weyl = math.pi * 1e4 / (4 * math.pi)
    assert abs(s.count() - weyl) <= 0.05 * weyl


def test_heat_trace_examples():
    s = interval_spectrum(math.pi, "dirichlet", 400)
    assert heat_trace(s, 1.0).theta == pytest.approx(0.38631860, abs=1e-8)
    n = interval_spectrum(math.pi, "neumann", 400)
    assert heat_trace(n, 50.0).theta == pytest.approx(1.0)
    # large t leaves the zero modes
    assert heat_trace(s, 50.0).theta < 1e-20
    assert heat_trace(one_form_spectrum_2d(cylinder(), "absolute", 400), 80.0).theta == pytest.approx(1.0)
    h = [hemisphere_spectrum(bc, 2e4) for bc in ("dirichlet", "neumann")]
    t = 0.01
    full = sum((2 * l + 1) * math.exp(-l * (l + 1) * t) for l in range(0, 200))
    assert heat_trace(h[0], t).theta + heat_trace(h[1], t).theta == pytest.approx(full, rel=1e-12)


def test_tail_bound_certifies_truncation():
    big = disk_spectrum(1, "neumann", 4e4)
    small = disk_spectrum(1, "neumann", 2500)
    for t in (0.005, 0.01, 0.03):
        true_tail = heat_trace(big, t).theta - heat_trace(small, t).theta
        assert 0 <= true_tail <= tail_bound(small, t)


def test_tail_bound_refuses_small_t():
    with pytest.raises(TailBoundError):
        heat_trace(disk_spectrum(1, "dirichlet", 100), 1e-3)


_DISK = disk_spectrum(1, "dirichlet", 4e3)


def _theta(t):
    return float(np.dot(_DISK.multiplicities, np.exp(-_DISK.lambdas * t)))


@given(st.floats(1e-3, 1.0), st.floats(1.01, 3.0))
def test_heat_trace_decreasing_and_log_convex(t, r):
    a, b = _theta(t), _theta(t * r)
    assert b < a
    mid = _theta(t * (1 + r) / 2)
    assert math.log(mid) <= (math.log(a) + math.log(b)) / 2 + 1e-12


def test_csv_round_trip(tmp_path):
    s = disk_spectrum(1, "dirichlet", 100)
    text = s.to_csv()
    assert text.splitlines()[0] == "5.78318596294678,1"
    path = tmp_path / "d.csv"
    s.write_csv(path)
    back = EigenvalueList.from_csv(path, 2, 100, s.weyl_constant)
    assert back.certified
    assert np.allclose(back.lambdas, s.lambdas, rtol=1e-14)
    assert list(back.multiplicities) == list(s.multiplicities)
    est = EigenvalueList.from_csv("# comment\nlambda,multiplicity\n1.0,2\n4.0,1\n", 1)
    assert not est.certified and est.count() == 3 and est.weyl_constant > 0
    with pytest.raises(SpectrumError):
        EigenvalueList.from_csv("1.0,2\nbad,line\n", 1)


def test_unsupported_requests():
    with pytest.raises(SpectrumError):
        spectrum(disk(1), 2, "absolute", 10)
    with pytest.raises(SpectrumError):
        disk_spectrum(0, "dirichlet", 10)
