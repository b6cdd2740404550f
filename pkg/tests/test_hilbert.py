from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbt.exactmath import Inconsistent, Underdetermined
from qbt.hilbert import (
    Determined,
    IntegerValuedPoly,
    Unbounded,
    binom,
    bounds_report,
    castelnuovo_pi0,
    ciliberto_theta,
    egh_bound,
    egh_decomposition,
    eval_poly,
    fano_bound,
    fit_binomial,
    interpolate_base_hilbert,
    max_points_for_h2,
    sectional_genus,
)

R10 = IntegerValuedPoly((34, 272, 964, 1988, 2633, 2330, 1387, 544, 133, 18, 1))
R13 = IntegerValuedPoly((82, 861, 4126, 11932, 23195, 31943, 31984, 23504, 12628, 4875, 1306,
                         228, 23, 1))


# oracles written from the definitions

def pi0_oracle(lam, N):
    for q in range(lam + 1):
        for r in range(N):
            if q * N + r == lam - 1:
                return q * (q - 1) // 2 * N + q * r
    raise AssertionError


def theta_oracle(lam, N, th):
    w = 2 * N + th
    for mu in range(lam + 1):
        for eta in range(w):
            if mu * w + eta == lam - 1:
                val = mu * mu * w - mu * N + 2 * mu * eta
                return val + max(0, eta - N)
    raise AssertionError


def test_binom_negative_argument():
    assert binom(-1, 3) == -1
    assert binom(-3, 2) == 6
    assert binom(5, 0) == 1


def test_eval_examples():
    assert eval_poly(IntegerValuedPoly((12, -5)), 1) == 7
    assert eval_poly(IntegerValuedPoly((1,)), -100) == 1
    assert R10(1) == 19


def test_sectional_genus_examples():
    assert sectional_genus(IntegerValuedPoly((12, -5))) == 6
    assert sectional_genus(R10) == 35
    assert sectional_genus(R13) == 124
    # adjunction oracle: 2g - 2 = (r - 1 - i) a0 with index i = (r + delta)/2
    assert 2 * 35 - 2 == (10 - 1 - 7) * 34
    assert 2 * 124 - 2 == (13 - 1 - 9) * 82


def test_sectional_genus_refuses_constants():
    with pytest.raises(ValueError):
        sectional_genus(IntegerValuedPoly((3,)))


def test_power_basis():
    p = IntegerValuedPoly((7, 6, 1))
    assert p.power_basis() == [1, Fraction(5, 2), Fraction(7, 2)]


def test_interpolation_examples():
    res = interpolate_base_hilbert(16, 8, 2)
    assert isinstance(res, Determined) and res.poly.leading == 36
    res = interpolate_base_hilbert(21, 11, 3)
    assert isinstance(res, Determined) and res.poly.leading == 86
    assert isinstance(interpolate_base_hilbert(11, 5, 1), Inconsistent)
    assert interpolate_base_hilbert(18, 10, 4).poly == R10


def test_interpolation_rejects_bad_input():
    with pytest.raises(ValueError):
        interpolate_base_hilbert(10, 4, 0)
    with pytest.raises(ValueError):
        interpolate_base_hilbert(10, 4, 1)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 14), st.integers(1, 8), st.integers(-3, 20))
def test_interpolation_symmetry(r, delta, n_off):
    if (r + delta) % 2:
        return
    n = 2 * r + 2 - delta + n_off
    res = interpolate_base_hilbert(n, r, delta)
    if not isinstance(res, Determined):
        assert isinstance(res, (Inconsistent, Underdetermined))
        return
    p, i = res.poly, (r + delta) // 2
    sign = -1 if r % 2 else 1
    for t in range(-30, 31):
        assert p(t) == sign * p(-t - i)
    assert p(0) == 1 and p(1) == n + 1 and p.leading > 0


def test_castelnuovo_examples():
    assert castelnuovo_pi0(12, 5) == 7
    assert castelnuovo_pi0(7, 5) == pi0_oracle(7, 5) == 1
    assert castelnuovo_pi0(1, 2) == 0


@settings(max_examples=200)
@given(st.integers(1, 300), st.integers(2, 20))
def test_castelnuovo_matches_definition_and_is_monotone(lam, N):
    assert castelnuovo_pi0(lam, N) == pi0_oracle(lam, N)
    assert castelnuovo_pi0(lam + 1, N) >= castelnuovo_pi0(lam, N)


def test_fano_examples():
    assert fano_bound(14, 5, 1) == pi0_oracle(13, 5) + 1 == 10
    assert fano_bound(13, 5, 2) == castelnuovo_pi0(11, 5) + 2  # theta = lambda - 2N - 1
    with pytest.raises(ValueError):
        fano_bound(14, 5, 0)
    with pytest.raises(ValueError):
        fano_bound(13, 5, 3)


def test_ciliberto_examples():
    assert ciliberto_theta(13, 5, 1) == 8 == 2 * 13 - 18
    assert ciliberto_theta(14, 5, 1) == 10 == 2 * 14 - 18
    assert ciliberto_theta(20, 6, 1) == theta_oracle(20, 6, 1)
    with pytest.raises(ValueError):
        ciliberto_theta(12, 6, 1)


@settings(max_examples=200)
@given(st.integers(2, 15), st.data())
def test_bound_ordering(N, data):
    lam = data.draw(st.integers(2 * N + 2, 8 * N))
    th = data.draw(st.integers(1, lam - 2 * N - 1))
    c = ciliberto_theta(lam, N, th)
    assert c == theta_oracle(lam, N, th)
    assert c <= fano_bound(lam, N, th) <= castelnuovo_pi0(lam, N)


def test_max_points_examples():
    assert max_points_for_h2(5, 11) == 12
    assert max_points_for_h2(6, 16) == 20
    assert max_points_for_h2(5, 8) == 8
    assert max_points_for_h2(5, 15) is Unbounded
    with pytest.raises(ValueError):
        max_points_for_h2(5, 5)


def test_egh_examples():
    N, th = 7, 4
    assert egh_bound(N, N * (N - 1) // 2 - th) == 4 * th + 8 == 24
    for N in range(5, 13):
        for th in range(-1, N - 3):
            assert egh_bound(N, N * (N - 1) // 2 - th) == 2 * N + 2 * th + 2


@settings(max_examples=200)
@given(st.integers(2, 14), st.integers(0, 90))
def test_egh_decomposition_unique(N, k):
    m = N + 1 + k
    b, c = egh_decomposition(N, m)
    sols = [(bb, cc) for bb in range(0, m + 2) for cc in range(0, bb)
            if m == N + 1 + comb(bb, 2) + cc]
    assert sols == [(b, c)]


def test_egh_rejects_small_m():
    with pytest.raises(ValueError):
        egh_decomposition(5, 5)


def test_bounds_report():
    rep = bounds_report(13, 5, 1)
    assert rep["theta"] == 8 and rep["pi0"] == 9 and rep["fano"] == 8
    assert bounds_report(11, 5, 1)["theta"] is None


def test_fit_binomial_roundtrip():
    p = IntegerValuedPoly((7, 6, 1))
    pts = [(t, p(t)) for t in range(3, 6)]
    assert fit_binomial(pts, 2) == p
    assert fit_binomial([(1, 1), (1, 1)], 1) is None
