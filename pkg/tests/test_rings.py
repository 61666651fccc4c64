import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prismsen import DigitRing, DualRing, Eisenstein, NotAUnit, RingMismatch, SRing
from prismsen import poly as P
from prismsen.rings import compute_h_n, compute_t_n, h_poly, phi_n_poly, ring_from_descriptor, t_poly

E3 = Eisenstein.unramified(3)
E_ram = Eisenstein(3, (-3, 0, 1))
EISENSTEINS = [E3, E_ram, Eisenstein.unramified(5), Eisenstein(5, (5, 5, 1))]

# values computed once with sympy (see test_oracles.py)
H1_UNRAMIFIED_3 = [8, -9, 3]
T1_UNRAMIFIED_3 = [-3, 2]
H1_RAMIFIED_3 = [8, 0, -9, 0, 3]
T1_RAMIFIED_3 = [0, -6, 0, 4]


class TestEisenstein:
    def test_unramified(self):
        assert E3.coeffs == (-3, 1) and E3.e == 1

    def test_parse_and_str(self):
        E = Eisenstein.parse(3, "-3, 0, 1")
        assert E == E_ram
        assert str(E) == "u^2 - 3"

    @pytest.mark.parametrize(
        "p,coeffs",
        [(3, (-9, 1)), (3, (-3, 2)), (3, (-1, 1)), (4, (-2, 1)), (3, (3, 1, 1))],
    )
    def test_rejects_non_eisenstein(self, p, coeffs):
        with pytest.raises(ValueError):
            Eisenstein(p, coeffs)


class TestSRing:
    def test_no_reduction(self):
        R = SRing(E3, 3, 10)
        assert (R.u * R.u).c == (0, 0, 1)

    def test_evaluation_at_root(self):
        R = SRing(E3, 1, 10)
        assert R.u * R.u == 9

    def test_ramified_reduction(self):
        R = SRing(E_ram, 1, 10)
        assert R.u * R.u == 3

    def test_frobenius_of_lambda(self):
        R = SRing(E3, 2, 10)
        lam = R.lam()
        assert R.frobenius(lam) == R.from_poly([24 - 27 * 3, 27])  # 24 + 27*lambda in the u-basis

    def test_frobenius_of_one(self):
        R = SRing(E_ram, 2, 10)
        assert R.frobenius(R.one()) == 1

    def test_frobenius_multiplicative_without_reduction(self):
        R = SRing(E3, 7, 10)
        assert R.frobenius(R.u * R.u) == R.frobenius(R.u) * R.frobenius(R.u)

    def test_frobenius_only_defined_on_representatives(self):
        # u*u reduces to 6u - 9 modulo (u - 3)^2, so the lift is not multiplicative here
        R = SRing(E3, 2, 10)
        assert R.frobenius(R.u * R.u) != R.frobenius(R.u) * R.frobenius(R.u)

    def test_ring_mismatch(self):
        with pytest.raises(RingMismatch):
            SRing(E3, 2, 10).u + SRing(E3, 3, 10).u

    def test_inverse_not_unit(self):
        R = SRing(E_ram, 2, 8)
        with pytest.raises(NotAUnit):
            R.u.inverse()

    def test_descriptor_roundtrip(self):
        R = SRing(E_ram, 2, 8)
        a = R.from_poly([1, 2, 3, 4])
        R2 = ring_from_descriptor(R.descriptor())
        assert R2 == R
        assert R.decode(R.encode(a)) == a


class TestPolynomials:
    def test_h1_unramified(self):
        assert h_poly(E3, 1) == H1_UNRAMIFIED_3

    def test_t1_unramified(self):
        assert t_poly(E3, 1) == T1_UNRAMIFIED_3

    def test_h1_ramified(self):
        assert h_poly(E_ram, 1) == H1_RAMIFIED_3
        assert t_poly(E_ram, 1) == T1_RAMIFIED_3

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_h1_constant_unramified(self, p):
        assert h_poly(Eisenstein.unramified(p), 1)[0] == -1 + p ** (p - 1)

    @pytest.mark.parametrize("E", EISENSTEINS, ids=str)
    @pytest.mark.parametrize("n", [1, 2])
    def test_h_unit_and_t_integral(self, E, n):
        R = SRing(E, 3, 12)
        h = compute_h_n(E, n, R)
        assert h.c[0] % E.p != 0
        t = compute_t_n(E, n, R)
        assert t * E.p**n == R.from_poly(P.derivative(h_poly(E, n)))

    def test_phi_n(self):
        assert phi_n_poly(E3, 1) == [-3, 0, 0, 1]


class TestDigitRing:
    def test_x_nilpotent(self):
        D = DigitRing(E3, 2, 10)
        assert (D.x * D.x).is_zero()

    def test_E_is_p_times_x(self):
        D = DigitRing(E3, 2, 10)
        assert D.digits(D.E_elem) == [[0], [3]]
        assert D.E_elem == D.x * 3

    def test_u_times_x(self):
        D = DigitRing(E3, 3, 10)
        assert D.digits(D.u * D.x) == [[0], [3], [3]]

    def test_geometric_inverse(self):
        D = DigitRing(E3, 2, 10)
        assert (D.one() + D.x).inverse() == D.one() - D.x

    def test_from_sring_needs_enough_E(self):
        D = DigitRing(E3, 3, 10)
        with pytest.raises(RingMismatch):
            D.from_sring(SRing(E3, 1, 10).u)

    def test_from_sring_is_a_ring_map(self):
        S = SRing(E_ram, 3, 12)
        D = DigitRing(E_ram, 3, 12)
        a, b = S.from_poly([1, 4, 2, 7, 1, 3]), S.from_poly([5, 0, 1, 1, 2, 2])
        assert D.from_sring(a * b) == D.from_sring(a) * D.from_sring(b)


@st.composite
def digit_elems(draw, count=2):
    E = draw(st.sampled_from(EISENSTEINS))
    n = draw(st.integers(1, 4))
    D = DigitRing(E, n, 10)
    seed = draw(st.integers(0, 10**6))
    rng = random.Random(seed)
    return D, [D.random(rng) for _ in range(count)]


@given(digit_elems(3))
def test_digit_ring_axioms(data):
    D, (a, b, c) = data
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(digit_elems(1))
def test_digit_inverse(data):
    D, (a,) = data
    if a.c[0] % D.p == 0 and D.E.e == 1:
        return
    try:
        inv = a.inverse()
    except NotAUnit:
        return
    assert a * inv == 1


@given(st.sampled_from(EISENSTEINS), st.integers(1, 3), st.integers(0, 10**6))
def test_sring_inverse_of_units(E, m, seed):
    R = SRing(E, m, 8)
    rng = random.Random(seed)
    a = R.random(rng) + 0
    a = a + (1 - a.c[0] % E.p) if a.c[0] % E.p == 0 else a
    assert a * a.inverse() == 1


@given(st.sampled_from(EISENSTEINS), st.integers(1, 3), st.integers(0, 10**6))
def test_derivative_leibniz(E, m, seed):
    R = SRing(E, m + 1, 12)
    rng = random.Random(seed)
    # degree small enough that the product is not reduced
    half = (R.rank - 1) // 2
    a = R.from_poly([rng.randrange(100) for _ in range(half + 1)])
    b = R.from_poly([rng.randrange(100) for _ in range(half + 1)])
    assert R.derivative(a * b) == R.derivative(a) * b + a * R.derivative(b)


class TestDualRing:
    def test_eps_squared(self):
        R = DualRing(SRing(E3, 2, 8))
        assert (R.eps * R.eps).is_zero()

    def test_inverse(self):
        R = DualRing(SRing(E_ram, 2, 8))
        a = R.make(R.base.from_poly([1, 2]), R.base.from_poly([3, 1, 4]))
        assert a * a.inverse() == 1

    def test_frobenius_kills_eps(self):
        R = DualRing(SRing(E3, 2, 8))
        assert R.frobenius(R.one() + R.eps) == 1

    def test_roundtrip(self):
        R = DualRing(DigitRing(E_ram, 2, 8))
        a = R.make(R.base.x + 2, R.base.u)
        assert ring_from_descriptor(R.descriptor()) == R
        assert R.decode(R.encode(a)) == a
