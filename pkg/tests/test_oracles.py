"""Recompute the frozen constants used elsewhere with an independent CAS."""

from fractions import Fraction

import sympy
from test_constructions import D1_P3
from test_rings import H1_RAMIFIED_3, H1_UNRAMIFIED_3, T1_RAMIFIED_3, T1_UNRAMIFIED_3

from prismsen import Eisenstein
from prismsen.constructions import claimed_x_valuation, construct_b_unramified, solve_v_f
from prismsen.rings import h_poly, t_poly

u, lam = sympy.symbols("u lambda")


def coeffs(expr, var=u):
    return [int(c) for c in reversed(sympy.Poly(sympy.expand(expr), var).all_coeffs())]


def h1_t1(E):
    p = 3
    h = sympy.expand((E.subs(u, u**p) - E**p) / p)
    t = sympy.expand(sympy.diff(h, u) / p)
    return coeffs(h), coeffs(t)


def test_h1_t1_unramified():
    h, t = h1_t1(u - 3)
    assert h == H1_UNRAMIFIED_3 and t == T1_UNRAMIFIED_3


def test_h1_t1_ramified():
    h, t = h1_t1(u**2 - 3)
    assert h == H1_RAMIFIED_3 and t == T1_RAMIFIED_3


def test_h_t_general_agree_with_cas():
    for p, E in [(3, u**2 + 3 * u + 3), (5, u - 5), (5, u**2 + 5 * u + 5)]:
        Ep = Eisenstein(p, tuple(coeffs(E)))
        for n in (1, 2):
            phiE = E.subs(u, u ** (p**n))
            h = sympy.expand((phiE - E ** (p**n)) / p)
            assert h_poly(Ep, n) == coeffs(h)
            assert t_poly(Ep, n) == coeffs(sympy.diff(h, u) / p**n)


def test_frobenius_of_lambda():
    # phi(lambda) with lambda = u - 3, phi(u) = u^3, modulo lambda^2
    expr = sympy.expand((lam + 3) ** 3 - 3)
    assert sympy.Poly(expr, lam).all_coeffs()[-2:] == [27, 24]


def test_first_recursion_row():
    # level-1 ghost identity: d(lambda) = lambda (lambda+3)^2 / ((lambda+3)^3 - 3) - 1 mod lambda^3
    series = sympy.series(lam * (lam + 3) ** 2 / ((lam + 3) ** 3 - 3) - 1, lam, 0, 3).removeO()
    got = [Fraction(str(series.coeff(lam, i))) for i in range(3)]
    assert got == D1_P3
    _, table = construct_b_unramified(3, 3, 2, 12)
    for i, q in enumerate(got):
        assert table.entries[(1, i)] * q.denominator == q.numerator


def test_x_lambda_exact_rationals():
    # unghost (-1, p^{p^n - 1} - 1, ...) over Q and read off valuations
    for p, L in [(3, 4), (5, 4)]:
        ws = [Fraction(-1)] + [Fraction(p ** (p**n - 1) - 1) for n in range(1, L)]
        xs = []
        for m, w in enumerate(ws):
            rest = w - sum(Fraction(p**i) * xs[i] ** (p ** (m - i)) for i in range(m))
            xs.append(rest / p**m)
        assert all(x.denominator % p != 0 for x in xs)
        vals = [sympy.multiplicity(p, x.numerator) for x in xs[1:]]
        assert vals == [claimed_x_valuation(p, n) for n in range(1, L)]
        report = solve_v_f(p, L, 30)
        for x, q in zip(report.witt_result.comps, xs):
            assert x * q.denominator == q.numerator
