import sympy
from hypothesis import given
from hypothesis import strategies as st

from prismsen import poly as P

polys = st.lists(st.integers(-50, 50), min_size=0, max_size=6)
U = sympy.Symbol("u")


def to_sympy(a):
    return sympy.sympify(sum(c * U**i for i, c in enumerate(a)))


def from_sympy(e):
    return P.trim([int(c) for c in reversed(sympy.Poly(e, U).all_coeffs())]) if e != 0 else []


@given(polys, polys)
def test_mul_matches_sympy(a, b):
    assert P.mul(a, b) == from_sympy(sympy.expand(to_sympy(a) * to_sympy(b)))


@given(polys, st.integers(1, 4))
def test_compose_power(a, k):
    assert P.compose_power(a, k) == from_sympy(sympy.expand(to_sympy(a).subs(U, U**k)))


@given(polys)
def test_derivative(a):
    assert P.derivative(a) == from_sympy(sympy.diff(to_sympy(a), U))


@given(polys, st.lists(st.integers(-9, 9), min_size=1, max_size=3))
def test_divmod_monic(a, m):
    m = P.trim(m + [1])
    q, r = P.divmod_monic(a, m)
    assert len(P.trim(r)) < len(m)
    assert P.add(P.mul(q, m), r) == P.trim(a)


def test_binomial():
    assert [P.binomial(5, k) for k in range(6)] == [1, 5, 10, 10, 5, 1]


def test_evaluate_and_power():
    assert P.evaluate([8, -9, 3], 2) == 8 - 18 + 12
    assert P.power([-3, 1], 3) == [-27, 27, -9, 1]
