import pytest
from hypothesis import given
from hypothesis import strategies as st

from prismsen import InsufficientValuation, NotAUnit, PAdic, PAdicRing, PrecisionExhausted
from prismsen.padic import is_prime, padic_arith, padic_div_p_power, padic_invert, vp

primes = st.sampled_from([2, 3, 5, 7])


@st.composite
def padics(draw, p=None, N=None):
    p = p or draw(primes)
    N = N or draw(st.integers(1, 12))
    return PAdic(p, N, draw(st.integers(0, p**N - 1)))


class TestExamples:
    def test_sum_wraps_to_zero(self):
        z = PAdic(3, 4, 5) + PAdic(3, 4, 76)
        assert z.residue == 0 and z.val_known == 4

    def test_p_times_p_cubed(self):
        z = PAdic(3, 4, 3) * PAdic(3, 4, 27)
        assert z.residue == 0 and z.val_known == 4

    def test_divide_by_p_power(self):
        q = PAdic(3, 5, 54).div_p_power(2)
        assert q.residue == 6 and q.N == 3

    def test_divide_zero(self):
        q = PAdic(3, 5, 0).div_p_power(1)
        assert q.residue == 0 and q.N == 4

    def test_divide_unit_fails(self):
        with pytest.raises(InsufficientValuation):
            PAdic(3, 5, 5).div_p_power(1)

    def test_inverse_of_two(self):
        assert PAdic(3, 4, 2).invert().residue == 41

    def test_inverse_of_one(self):
        assert PAdic(3, 4, 1).invert().residue == 1

    def test_inverse_of_p(self):
        with pytest.raises(NotAUnit):
            PAdic(3, 4, 3).invert()


def test_min_precision_rule():
    a, b = PAdic(3, 4, 10), PAdic(3, 6, 100)
    assert (a + b).N == 4
    assert (a * b).N == 4


def test_ring_constructor_and_descriptor():
    R = PAdicRing(5, 3)
    assert R(-1).residue == 124
    assert R.one() * R(7) == R(7)
    assert R.descriptor()["kind"] == "padic"


def test_signed_representative():
    assert PAdic(3, 2, 8).signed() == -1


def test_json_roundtrip():
    x = PAdic(7, 9, 12345)
    assert PAdic.from_json(x.to_json()) == x
    assert isinstance(x.to_json()["residue"], str)


def test_vp_and_is_prime():
    assert vp(54, 3) == 3
    assert vp(0, 3, cap=5) == 5
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_functional_aliases():
    a, b = PAdic(3, 4, 7), PAdic(3, 4, 5)
    assert padic_arith(a, b, "add") == a + b
    assert padic_arith(a, b, "mul") == a * b
    assert padic_div_p_power(PAdic(3, 4, 9), 2) == PAdic(3, 2, 1)
    assert padic_invert(b) * b == 1


@given(padics(), st.data())
def test_ring_axioms(x, data):
    y = data.draw(padics(x.p, x.N))
    z = data.draw(padics(x.p, x.N))
    assert x + y == y + x
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x - x == 0


@given(padics())
def test_identity_element(x):
    assert PAdic(x.p, x.N, 1) * x == x


@given(padics(), st.integers(0, 4))
def test_div_mul_roundtrip(x, k):
    y = x * x.p**k
    if k >= x.N:
        with pytest.raises(PrecisionExhausted):
            y.div_p_power(k)
        return
    q = y.div_p_power(k)
    assert q.N == x.N - k
    assert q == x


@given(padics())
def test_inverse_property(x):
    if x.residue % x.p == 0:
        with pytest.raises(NotAUnit):
            x.invert()
    else:
        assert x * x.invert() == 1


@given(padics())
def test_val_known_is_exact_or_capped(x):
    if x.residue == 0:
        assert x.val_known == x.N
    else:
        assert x.residue % x.p**x.val_known == 0
        assert x.residue % x.p ** (x.val_known + 1) != 0
