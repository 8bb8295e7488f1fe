"""Tests for the executable norm lemmas over R_v."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcarlitz.algebra import FqContext, RatK
from vcarlitz.errors import (
    AssertionFailure, NoSolutionInBudget, ParseError, RootCheckFailed,
    TooLarge,
)
from vcarlitz.local import LocalNum, PlaceV, embed_local
from vcarlitz.abp import (
    RvElem, liouville_check, norm_ball_count, norm_bound_checks, parse_rv,
    q_power_str, rvt_norm_exp, small_solution, sup_norm_disk,
    sup_norm_factored,
)

CTX3 = FqContext(3)
V0 = PlaceV(CTX3, 0)


def rv_strategy(max_deg=4):
    return st.lists(st.integers(0, 2), min_size=0, max_size=max_deg + 1) \
             .map(lambda c: RvElem(V0, c))


# -- ring of functions regular away from v -------------------------------

def test_rv_print_parse_roundtrip():
    for text in ("2*v^-3+v^-1+1", "v^-1", "1", "0", "2*v^-2+2"):
        assert str(parse_rv(V0, text)) == text
    with pytest.raises(ParseError):
        parse_rv(V0, "v^-1+v^-1")


def test_rv_matches_field_embedding():
    x = parse_rv(V0, "2*v^-3+v^-1+1")
    assert V0.ord_ratk(x.to_ratk()) == -3
    assert x.norm_exp() == 3


@given(rv_strategy(), rv_strategy())
@settings(max_examples=40)
def test_rv_norm_is_ultrametric_and_multiplicative(x, y):
    if x.is_zero() or y.is_zero():
        return
    assert (x * y).norm_exp() == x.norm_exp() + y.norm_exp()
    s = x + y
    if not s.is_zero():
        assert s.norm_exp() <= max(x.norm_exp(), y.norm_exp())


def test_norm_bounds():
    assert norm_bound_checks(RvElem.one(V0)) == (0, 0)
    assert norm_bound_checks(parse_rv(V0, "v^-1+1")) == (1, 1)
    assert norm_bound_checks(parse_rv(V0, "v^-3")) == (3, 3)
    with pytest.raises(ValueError):
        norm_bound_checks(RvElem.zero(V0))


# -- sup norms on disks --------------------------------------------------

def test_sup_norm_examples():
    one = LocalNum.unit_one(V0, 20)
    pi = embed_local(RatK(V0.uniformizer()), V0, 20)
    assert sup_norm_disk([one, -pi], 2) == 1          # 1 - pi t on |t|<=q^2
    assert sup_norm_disk([pi], 7) == -1               # a constant
    assert sup_norm_disk([LocalNum.exact_zero(V0), one], 3) == 3  # f = t


def test_sup_norm_factored_two_routes():
    one = LocalNum.unit_one(V0, 20)
    pi = embed_local(RatK(V0.uniformizer()), V0, 20)
    # 1 - pi t has its zero at pi^{-1} with |w| = q < q^2
    assert sup_norm_factored(one, [pi.inv()], 0, 2) == 1
    # zero outside the disk contributes nothing
    assert sup_norm_factored(one, [pi.inv().pow(3)], 0, 2) == 0
    # extra zeros at the origin each contribute r
    assert sup_norm_factored(one, [pi.inv()], 2, 2) == 5


@given(st.integers(-3, 3), st.integers(0, 2), st.integers(0, 3),
       st.integers(0, 3))
@settings(max_examples=40)
def test_sup_norm_routes_agree_random(word, n_zero, r_exp, lam_ord):
    one = LocalNum.unit_one(V0, 24)
    pi = embed_local(RatK(V0.uniformizer()), V0, 24)
    lam = one.shift(lam_ord)
    omega = pi.pow(abs(word)).inv() if word >= 0 else pi.pow(-word)
    # raises AssertionFailure on route disagreement; value sanity-checked
    e = sup_norm_factored(lam, [omega], n_zero, r_exp)
    assert e >= -lam_ord + n_zero * r_exp - 0 - 100  # finite


# -- Liouville inequality ------------------------------------------------

def test_liouville_example():
    pi = V0.uniformizer()
    f = [RatK(-(pi * pi)), RatK.zero(CTX3), RatK.one(CTX3)]  # z^2 - pi^2
    assert liouville_check(f, RatK(pi), 1, V0) == (-1, -2, True)


def test_liouville_boundary():
    f = [-RatK.one(CTX3), RatK.one(CTX3)]  # z - 1
    assert liouville_check(f, RatK.one(CTX3), 1, V0) == (0, 0, True)


def test_liouville_rejections():
    pi = V0.uniformizer()
    f = [RatK(-(pi * pi)), RatK.zero(CTX3), RatK.one(CTX3)]
    with pytest.raises(RootCheckFailed):
        liouville_check(f, RatK(pi) + RatK.one(CTX3), 1, V0)
    with pytest.raises(RootCheckFailed):
        liouville_check(f, RatK(pi), 2, V0)  # simple root, mu = 2
    with pytest.raises(ValueError):
        liouville_check(f, RatK.zero(CTX3), 1, V0)  # nonzero roots only


@given(st.integers(1, 3), st.integers(0, 2), st.integers(1, 2))
@settings(max_examples=30)
def test_liouville_holds_for_built_roots(a_deg, lam_ord, mu):
    # f = (z - lam)^mu * (z - 1) always satisfies the inequality
    pi = RatK(V0.uniformizer())
    lam = pi ** lam_ord * RatK(CTX3, None) if False else pi ** lam_ord
    coeffs = [-lam, RatK.one(CTX3)]
    for _ in range(mu - 1):
        coeffs = _poly_mul_z(coeffs, [-lam, RatK.one(CTX3)])
    coeffs = _poly_mul_z(coeffs, [-RatK.one(CTX3), RatK.one(CTX3)])
    lhs, rhs, ok = liouville_check(coeffs, lam, mu, V0)
    assert ok and lhs >= rhs


def _poly_mul_z(a, b):
    out = [RatK.zero(CTX3)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


# -- ball counts ---------------------------------------------------------

@pytest.mark.parametrize("q,lam,n,want", [
    (2, 1, 0, 2), (2, 1, 2, 8), (3, 0, 1, 9), (3, 0, 3, 81), (2, 0, 3, 16),
])
def test_ball_counts(q, lam, n, want):
    place = PlaceV(FqContext(q), lam)
    assert norm_ball_count(place, n) == want == q ** (n + 1)


def test_ball_count_budget():
    with pytest.raises(TooLarge):
        norm_ball_count(V0, 20)


# -- small solutions -----------------------------------------------------

def test_small_solution_symmetric_kernel():
    one = (RvElem.one(V0),)
    neg = (RvElem(V0, (2,)),)
    x = small_solution([[one, neg]], 2, 0, V0)
    assert max(rvt_norm_exp(e) or 0 for e in x) == 0


def test_small_solution_with_pole():
    one = (RvElem.one(V0),)
    pole = (parse_rv(V0, "v^-1"),)
    x = small_solution([[pole, one]], 2, 0, V0)
    assert max(rvt_norm_exp(e) or 0 for e in x) == 1  # strictly below q^2


def test_small_solution_preconditions():
    one = (RvElem.one(V0),)
    with pytest.raises(ValueError):
        small_solution([[one], [one]], 3, 0, V0)  # r >= s
    pole3 = (parse_rv(V0, "v^-3"),)
    with pytest.raises(ValueError):
        small_solution([[pole3, one]], 2, 0, V0)  # ||M|| >= C


def test_small_solution_degree_budget():
    # M = (1, t): no kernel with t-degree 0, but t-degree 1 suffices
    one = RvElem.one(V0)
    M = [[(one,), (RvElem.zero(V0), one)]]
    with pytest.raises(NoSolutionInBudget):
        small_solution(M, 2, 0, V0)
    x = small_solution(M, 2, 1, V0)
    assert any(not c.is_zero() for e in x for c in e)


def test_small_solution_in_t():
    # entries with a t-dependence; solution needs t-degree 1
    one = RvElem.one(V0)
    Mt = [[(one, one), (RvElem.zero(V0), one)]]   # (1 + t, t)
    x = small_solution(Mt, 2, 2, V0)
    # verify it found something nonzero (re-verified internally)
    assert any(not c.is_zero() for e in x for c in e)


def test_q_power_strings():
    assert q_power_str(3) == "q^3"
    assert q_power_str(-1) == "q^-1"
