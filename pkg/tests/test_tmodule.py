"""Tests for Anderson t-modules and extended-domain v-adic evaluation."""

import pytest

from vcarlitz.algebra import FqContext, PolyA, RatK, carlitz_action, parse_poly
from vcarlitz.errors import (
    AnnihilationFailure, ConvergenceNotCertified, DomainError, ParseError,
)
from vcarlitz.linalg import (
    fq_kernel, fq_min_poly, kmat_add, kmat_frobenius, kmat_identity, kmat_inv,
    kmat_mul, kmat_zero,
)
from vcarlitz.local import LocalNum, PlaceV, embed_local
from vcarlitz.polylog import ArgTuple, Index, L_factorial, cmpl_eval, cmspl_eval
from vcarlitz.tmodule import (
    TModuleSpec, candidate_depth2_spec, dump_tmodule_spec, explog_coeffs,
    extended_cmspl_v, log_at_point, parse_tmodule_spec, residue_annihilator,
    tensor_carlitz_spec, tm_action, validate_tmodule, with_args,
)

CTX3 = FqContext(3)
V0 = PlaceV(CTX3, 0)
T = RatK.T(CTX3)


@pytest.fixture(scope="module")
def specs():
    out = {s: tensor_carlitz_spec(s, CTX3) for s in (1, 2, 3)}
    for spec in out.values():
        assert validate_tmodule(spec, V0, 30).ok
    return out


# -- linear algebra helpers ---------------------------------------------

def test_kmat_inverse():
    M = ((T, RatK.one(CTX3)), (RatK.zero(CTX3), T * T))
    Minv = kmat_inv(M)
    assert kmat_mul(M, Minv) == kmat_identity(CTX3, 2)


def test_fq_kernel_recovers_dependence():
    # rows of a rank-1 matrix over F_3
    rows = [(1, 2, 0), (2, 1, 0)]
    ker = fq_kernel(CTX3, rows, 3)
    assert len(ker) == 2
    for v in ker:
        for row in rows:
            s = 0
            for a, b in zip(row, v):
                s = CTX3.add(s, CTX3.mul(a, b))
            assert s == 0


def test_fq_min_poly_involution():
    M = ((0, 1), (1, 0))
    a = fq_min_poly(CTX3, M)
    assert str(a) == "T^2+2"  # x^2 - 1


# -- module action -------------------------------------------------------

def test_action_dim1_is_carlitz():
    spec = tensor_carlitz_spec(1, CTX3)
    a = parse_poly(CTX3, "T^2+2*T")
    z = T * T + T
    assert tm_action(spec, a, (z,))[0] == carlitz_action(a, z)


def test_action_identity_and_ring_homomorphism():
    spec = tensor_carlitz_spec(2, CTX3)
    z = (T, T + RatK.one(CTX3))
    assert tm_action(spec, PolyA.one(CTX3), z) == z
    a = parse_poly(CTX3, "T+1")
    b = parse_poly(CTX3, "T^2+2")
    assert tm_action(spec, a * b, z) == tm_action(spec, a, tm_action(spec, b, z))
    lhs = tm_action(spec, a + b, z)
    rhs = tuple(x + y for x, y in
                zip(tm_action(spec, a, z), tm_action(spec, b, z)))
    assert lhs == rhs


def test_action_on_local_vectors_matches_exact():
    spec = tensor_carlitz_spec(2, CTX3)
    a = parse_poly(CTX3, "T^2+T")
    z = (T, T * T)
    exact = tm_action(spec, a, z)
    zl = tuple(embed_local(x, V0, 40) for x in z)
    local = tm_action(spec, a, zl)
    for e, l in zip(exact, local):
        assert (embed_local(e, V0, 30) - l).is_zero_to_precision()


# -- exp/log coefficients ------------------------------------------------

def test_explog_dim1_carlitz_factorials():
    spec = tensor_carlitz_spec(1, CTX3)
    Q, P = explog_coeffs(spec, 3)
    assert P[0][0][0] == RatK.one(CTX3)
    for i in range(4):
        assert P[i][0][0] == RatK(L_factorial(CTX3, i)).inv()


def test_explog_compositional_inverse():
    spec = tensor_carlitz_spec(2, CTX3)
    Q, P = explog_coeffs(spec, 3)
    assert Q[0] == P[0] == kmat_identity(CTX3, 2)
    for m in range(1, 4):
        for first, second in ((Q, P), (P, Q)):
            acc = kmat_zero(CTX3, 2, 2)
            for i in range(m + 1):
                acc = kmat_add(acc, kmat_mul(first[i],
                                             kmat_frobenius(second[m - i], i)))
            assert all(e.is_zero() for r in acc for e in r)


# -- residue annihilators ------------------------------------------------

def test_annihilator_carlitz_lambda0():
    a, invertible = residue_annihilator(tensor_carlitz_spec(1, CTX3), V0)
    assert str(a) == "T+2" and invertible  # theta - 1


def test_annihilator_carlitz_q2_lambda1():
    ctx = FqContext(2)
    a, invertible = residue_annihilator(
        tensor_carlitz_spec(1, ctx), PlaceV(ctx, 1))
    assert str(a) == "T" and not invertible


def test_annihilator_tensor_square():
    a, invertible = residue_annihilator(tensor_carlitz_spec(2, CTX3), V0)
    assert str(a) == "T^2+2" and invertible  # theta^2 - 1


def test_annihilator_gains_valuation(specs):
    for spec in specs.values():
        a, _ = residue_annihilator(spec, V0)
        z = tuple([T + RatK.one(CTX3)] * spec.dim)  # v-units everywhere
        w = tm_action(spec, a, z)
        assert all(V0.ord_ratk(x) >= 1 for x in w)


# -- validation gate -----------------------------------------------------

def test_validation_passes_tensor_powers(specs):
    for spec in specs.values():
        assert spec.validated


def test_validation_fails_broken_corner():
    good = tensor_carlitz_spec(2, CTX3)
    zero = PolyA.zero(CTX3)
    broken = TModuleSpec(
        CTX3, 2, good.N0, [[zero, zero], [zero, zero]], good.readout,
        good.index, good.args, good.point, good.test_points, name="broken")
    cert = validate_tmodule(broken, V0, 20)
    assert not cert.ok
    assert not broken.validated
    with pytest.raises(DomainError):
        extended_cmspl_v(broken, V0, 20)


def test_validation_needs_three_points():
    spec = tensor_carlitz_spec(1, CTX3)
    starved = TModuleSpec(CTX3, 1, spec.N0,
                          [[e.num for e in r] for r in spec.B1],
                          spec.readout, spec.index, spec.args, spec.point,
                          spec.test_points[:2], name="starved")
    with pytest.raises(ValueError):
        validate_tmodule(starved, V0, 20)


# -- logarithm -----------------------------------------------------------

def test_log_functional_equation(specs):
    # Log(phi_a(z)) = d[a] Log(z) at depth 1 with a = theta
    spec = specs[1]
    z = (embed_local(T, V0, 50),)
    az = tuple(embed_local(x, V0, 50)
               for x in tm_action(spec, PolyA.T(CTX3), (T,)))
    lhs = log_at_point(spec, az, V0, 30)[0]
    rhs = embed_local(T, V0, 40) * log_at_point(spec, z, V0, 35)[0]
    assert (lhs - rhs).is_zero_to_precision()
    assert (lhs - rhs).cutoff >= 30


def test_log_rejects_units():
    spec = tensor_carlitz_spec(1, CTX3)
    with pytest.raises(ConvergenceNotCertified):
        log_at_point(spec, (embed_local(RatK.one(CTX3), V0, 40),), V0, 20)


# -- extended evaluation -------------------------------------------------

def test_extended_matches_series_on_overlap(specs):
    for s, spec in specs.items():
        got = extended_cmspl_v(spec, V0, 30)
        want = cmspl_eval(Index([s]), ArgTuple([T]), V0, 30)
        d = got - want
        assert d.is_zero_to_precision() and d.cutoff >= 30


def test_extended_zeta2_vanishes(specs):
    spec = with_args(specs[2], ArgTuple([RatK.one(CTX3)]),
                     (RatK.zero(CTX3), RatK.one(CTX3)))
    val = extended_cmspl_v(spec, V0, 40)
    assert val.is_zero_to_precision() and val.cutoff >= 40


def test_extended_zeta1_nonzero_leading_digits(specs):
    spec = with_args(specs[1], ArgTuple([RatK.one(CTX3)]),
                     (RatK.one(CTX3),))
    val = extended_cmspl_v(spec, V0, 30)
    assert val.valuation() == 1
    assert [val.digit(i) for i in range(1, 4)] == [2, 1, 1]


def test_annihilator_invariance(specs):
    spec = with_args(specs[2], ArgTuple([RatK.one(CTX3)]),
                     (RatK.zero(CTX3), RatK.one(CTX3)))
    a, _ = residue_annihilator(spec, V0)
    v1 = extended_cmspl_v(spec, V0, 30)
    v2 = extended_cmspl_v(spec, V0, 30, annihilator=a * a)
    d = v1 - v2
    assert d.is_zero_to_precision() and d.cutoff >= 30


def test_extended_requires_defining_domain(specs):
    bad = with_args(specs[1], ArgTuple([RatK.one(CTX3) / T]),
                    (RatK.one(CTX3) / T,))
    with pytest.raises(DomainError):
        extended_cmspl_v(bad, V0, 20)


# -- candidates and spec files ------------------------------------------

def test_depth2_candidate_is_gated():
    cand = candidate_depth2_spec(CTX3, 1, 1, T)
    assert not cand.validated
    with pytest.raises(DomainError):
        extended_cmspl_v(cand, V0, 10)
    with pytest.raises(ValueError):
        validate_tmodule(cand, V0, 10)  # ships without test points


def test_spec_file_roundtrip():
    spec = tensor_carlitz_spec(2, CTX3)
    text = dump_tmodule_spec(spec)
    again = parse_tmodule_spec(text)
    assert dump_tmodule_spec(again) == text
    assert not again.validated
    assert validate_tmodule(again, V0, 20).ok


def test_spec_file_errors():
    with pytest.raises(ParseError):
        parse_tmodule_spec("name only, no colon structure\n")
    with pytest.raises(ParseError):
        parse_tmodule_spec("name: x\np: 3\ndim: nope\n")
