"""Tests for truncated Tate-algebra series."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcarlitz.algebra import FqContext
from vcarlitz.errors import DecayNotCertified
from vcarlitz.local import LocalNum, PlaceV
from vcarlitz.tseries import (
    GaussNorm, TSeries, eval_series, frobenius_twist, gauss_norm, ts_arith,
)

CTX3 = FqContext(3)
V0 = PlaceV(CTX3, 0)
W = 10


def series_strategy(D=5, window=8):
    coeff = st.tuples(
        st.integers(0, 3),
        st.lists(st.integers(0, 2), min_size=1, max_size=window),
    ).map(lambda t: LocalNum(V0, t[0], t[1]))
    return st.lists(coeff, min_size=D, max_size=D).map(
        lambda cs: TSeries(V0, cs))


def unit(window=W):
    return LocalNum.unit_one(V0, window)


def pi(window=W):
    return LocalNum(V0, 1, (1,) + (0,) * (window - 1))


def test_telescoping_product():
    a = TSeries.from_local_coeffs(V0, [unit(), -pi()], 5, W)
    b = TSeries.from_local_coeffs(V0, [unit(), pi(), pi() * pi()], 5, W)
    c = a * b
    assert c.coeff(0).congruent(unit())
    assert c.coeff(1).is_zero_to_precision()
    assert c.coeff(2).is_zero_to_precision()
    assert c.coeff(3).congruent(-pi().pow(3))


@given(series_strategy(), series_strategy(), series_strategy())
@settings(max_examples=40)
def test_ring_axioms_to_window(f, g, h):
    lhs = f * (g + h)
    rhs = f * g + f * h
    d = lhs - rhs
    assert all(c.is_exact_zero() or not c.coeffs for c in d.coeffs)


def test_ts_arith_dispatch():
    f = TSeries.one(V0, 3, W)
    g = TSeries.from_local_coeffs(V0, [pi()], 3, W)
    assert (ts_arith(f, g, "add").coeff(0)).congruent(unit() + pi())
    assert (ts_arith(f, g, "mul").coeff(0)).congruent(pi())
    with pytest.raises(ValueError):
        ts_arith(f, g, "sub")


@given(series_strategy(), series_strategy())
@settings(max_examples=30)
def test_twist_is_multiplicative(f, g):
    d = frobenius_twist(f * g) - frobenius_twist(f) * frobenius_twist(g)
    assert d.is_zero_to_window()


def test_twist_composition_and_identity():
    f = TSeries.from_local_coeffs(V0, [unit(), pi()], 4, W)
    assert frobenius_twist(f, 0) is f
    one_twist_twice = frobenius_twist(frobenius_twist(f))
    assert (one_twist_twice - frobenius_twist(f, 2)).is_zero_to_window()
    with pytest.raises(ValueError):
        frobenius_twist(f, -1)


def test_gauss_norm_values():
    f = TSeries.from_local_coeffs(V0, [pi(), pi() * pi()], 4, W)
    assert gauss_norm(f) == GaussNorm(-1, True)
    g = TSeries.one(V0, 3, W)
    assert gauss_norm(g) == GaussNorm(0, True)
    z = TSeries(V0, [LocalNum.exact_zero(V0)] * 3)
    assert gauss_norm(z).exponent is None
    zw = TSeries.zero(V0, 3, W)   # known only to O(pi^W): a norm bound
    assert gauss_norm(zw) == GaussNorm(-W, False)
    # a window-zero coefficient above the known sup makes the norm a bound
    h = TSeries(V0, [pi(), LocalNum.zero_to_precision(V0, -2)])
    n = gauss_norm(h)
    assert not n.exact


@given(series_strategy(), series_strategy())
@settings(max_examples=30)
def test_gauss_norm_submultiplicative(f, g):
    nf, ng, nfg = gauss_norm(f), gauss_norm(g), gauss_norm(f * g)
    if not (nf.exact and ng.exact and nfg.exact):
        return  # inexact norms are window bounds, which multiplication widens
    if nf.exponent is None or ng.exponent is None or nfg.exponent is None:
        return
    assert nfg.exponent <= nf.exponent + ng.exponent


def test_eval_geometric():
    geo = TSeries.from_local_coeffs(V0, [unit(14)] * 8, 8, 14)
    x = pi(14)
    val = eval_series(geo, x)
    tgt = (unit(14) - x).inv()
    assert val.congruent(tgt, 8)


def test_eval_needs_decay_outside_unit_disk():
    f = TSeries.one(V0, 3, W)
    x = LocalNum(V0, -1, (1,) + (0,) * 5)
    with pytest.raises(DecayNotCertified):
        eval_series(f, x)
    # with a certified decay the same point evaluates
    val = eval_series(f, x, decay=lambda i: 3 * i)
    assert val.valuation() == 0


def test_eval_at_zero_returns_constant_term():
    f = TSeries.from_local_coeffs(V0, [pi(), unit()], 4, W)
    val = eval_series(f, LocalNum.exact_zero(V0))
    assert val == f.coeff(0)
