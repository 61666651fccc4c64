import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prismsen import Eisenstein, InsufficientValuation, LengthCap, PAdic, PAdicRing, RingMismatch, SRing
from prismsen.jsonio import decode_witt
from prismsen.poly import binomial
from prismsen.witt import (
    UNIVERSAL_MAX_LENGTH,
    WittVec,
    ghost,
    teichmuller,
    unghost,
    universal_polynomials,
    witt_delta,
    witt_F,
    witt_int,
    witt_one,
    witt_phi,
    witt_selftest,
    witt_universal,
    witt_V,
    witt_zero,
)

Z3 = PAdicRing(3, 20)


def W(*xs, p=3, N=20):
    return WittVec(tuple(PAdic(p, N, x) for x in xs))


class TestGhost:
    def test_teichmuller(self):
        a = Z3(5)
        assert ghost(teichmuller(a, 3)) == [a, a**3, a**9]

    def test_V_of_one(self):
        assert ghost(W(0, 1)) == [0, 3]

    def test_small_vector(self):
        assert ghost(W(1, 1)) == [1, 4]

    def test_unghost_simple(self):
        assert unghost([Z3(0), Z3(3)]) == W(0, 1)

    def test_unghost_reports_index(self):
        with pytest.raises(InsufficientValuation) as info:
            unghost([Z3(0), Z3(1)])
        assert info.value.index == 1


class TestArithmetic:
    def test_teichmuller_unit(self):
        x = W(4, 7, 2)
        assert witt_one(x.base, 3) * x == x

    def test_V1_squared(self):
        v1 = W(0, 1, 0)
        assert v1 * v1 == witt_V(witt_int(Z3, 3, 2))

    def test_add_zero(self):
        x = W(4, 7, 2)
        assert x + witt_zero(Z3, 3) == x

    def test_teichmuller_multiplicative(self):
        assert teichmuller(Z3(4), 3) * teichmuller(Z3(7), 3) == teichmuller(Z3(28), 3)

    def test_V1_times_teichmuller(self):
        a = Z3(5)
        lhs = witt_V(witt_one(Z3, 2)) * teichmuller(a, 3)
        assert lhs == witt_V(teichmuller(a**3, 2))

    def test_delta_teichmuller(self):
        d = witt_delta(teichmuller(Z3(5), 3))
        assert all(c == 0 for c in d.comps)

    def test_VF_ghost(self):
        assert ghost(witt_V(witt_F(witt_one(Z3, 3)))) == [0, 3, 3]

    @pytest.mark.parametrize("p", [3, 5])
    def test_delta_of_p(self, p):
        x = witt_int(PAdicRing(p, 20), p, 2)
        assert ghost(witt_delta(x))[0] == 1 - p ** (p - 1)

    def test_phi_is_F(self):
        x = W(4, 7, 2)
        assert witt_phi(x) == witt_F(x)

    def test_mixed_rings_rejected(self):
        S = SRing(Eisenstein.unramified(3), 2, 10)
        with pytest.raises(RingMismatch):
            WittVec((S.u, Z3(1)))

    def test_length_cap(self):
        with pytest.raises(LengthCap):
            universal_polynomials(3, UNIVERSAL_MAX_LENGTH + 1, "mul")

    def test_json_roundtrip(self):
        S = SRing(Eisenstein(3, (-3, 0, 1)), 2, 10)
        x = WittVec((S.u, S.one() + 3, S.from_poly([1, 2, 3])))
        assert decode_witt(x.to_json()) == x
        y = W(1, 2, 3)
        assert decode_witt(y.to_json()) == y


def test_universal_addition_polynomials_known():
    S0, S1 = universal_polynomials(2, 2, "add")
    # S_1 = X_1 + Y_1 - X_0 Y_0 for p = 2
    assert S1 == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): -1}


def test_selftest_runs_clean():
    results = witt_selftest(3, 3, 30, seed=1)
    assert all(r.passed for r in results)
    assert all(r.trials == 30 for r in results)


# ---------------------------------------------------------------- properties

E_CHOICES = [Eisenstein.unramified(3), Eisenstein(3, (-3, 0, 1)), Eisenstein.unramified(5)]


@st.composite
def witt_pairs(draw, max_len=3, extra=0):
    kind = draw(st.sampled_from(["padic", "sring"]))
    L = draw(st.integers(1, max_len))
    rng = random.Random(draw(st.integers(0, 2**32)))
    if kind == "padic":
        p = draw(st.sampled_from([2, 3, 5]))
        N = 24

        def make(n):
            return WittVec(tuple(PAdic(p, N, rng.randrange(p**N)) for _ in range(n)))

    else:
        E = draw(st.sampled_from(E_CHOICES))
        R = SRing(E, 2, 24)

        def make(n):
            return WittVec(tuple(R.random(rng) for _ in range(n)))

    return L, make


@given(witt_pairs())
def test_ghost_roundtrip(data):
    L, make = data
    x = make(L)
    assert unghost(ghost(x)) == x


@given(witt_pairs())
def test_ghost_matches_universal(data):
    L, make = data
    x, y = make(L), make(L)
    assert x * y == witt_universal(x, y, "mul")
    assert x + y == witt_universal(x, y, "add")


@given(witt_pairs())
def test_F_V_is_p(data):
    L, make = data
    x = make(L)
    assert witt_F(witt_V(x)) == x * x.p


@given(witt_pairs())
def test_V_projection_formula(data):
    L, make = data
    x, y = make(L), make(L + 1)
    assert witt_V(x) * y == witt_V(x * witt_F(y))


@given(witt_pairs())
def test_delta_leibniz(data):
    L, make = data
    a, b = make(L + 1), make(L + 1)
    p = a.p
    at, bt = a.truncate(L), b.truncate(L)
    da, db = witt_delta(a), witt_delta(b)
    assert witt_delta(a * b) == (at**p) * db + (bt**p) * da + da * db * p


@given(witt_pairs())
def test_delta_additivity(data):
    L, make = data
    a, b = make(L + 1), make(L + 1)
    p = a.p
    at, bt = a.truncate(L), b.truncate(L)
    cross = witt_zero(at.base, L)
    for i in range(1, p):
        cross = cross + (at**i) * (bt ** (p - i)) * (binomial(p, i) // p)
    assert witt_delta(a + b) == witt_delta(a) + witt_delta(b) - cross


@given(witt_pairs())
def test_phi_is_frobenius_lift_mod_p(data):
    # phi(x) = x^p + p delta(x)
    L, make = data
    x = make(L + 1)
    assert witt_phi(x) == x.truncate(L) ** x.p + witt_delta(x) * x.p


@given(witt_pairs())
def test_precision_not_collapsed(data):
    L, make = data
    x, y = make(L), make(L)
    z = x * y
    assert all(c.prec >= 24 - L for c in z.comps)
