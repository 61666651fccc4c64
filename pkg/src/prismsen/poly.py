"""Dense integer polynomials as lists of coefficients, lowest degree first."""

from __future__ import annotations

from functools import lru_cache

Poly = list[int]


def trim(a: Poly) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a: Poly, b: Poly) -> Poly:
    return add(a, scale(b, -1))


def scale(a: Poly, k: int) -> Poly:
    return trim([k * c for c in a])


def mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def power(a: Poly, k: int) -> Poly:
    result: Poly = [1]
    base = list(a)
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def compose_power(a: Poly, k: int) -> Poly:
    """a(u^k)."""
    if not a:
        return []
    out = [0] * ((len(a) - 1) * k + 1)
    for i, c in enumerate(a):
        out[i * k] = c
    return trim(out)


def compose(a: Poly, b: Poly) -> Poly:
    """a(b(u)) by Horner."""
    out: Poly = []
    for c in reversed(a):
        out = add(mul(out, b), [c])
    return out


def derivative(a: Poly) -> Poly:
    return trim([i * a[i] for i in range(1, len(a))])


def divmod_monic(a: Poly, m: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder of a by the monic polynomial m, over Z."""
    d = len(m) - 1
    if m[-1] != 1:
        raise ValueError("divisor must be monic")
    r = list(a)
    if len(r) <= d:
        return [], trim(r)
    q = [0] * (len(r) - d)
    for i in range(len(r) - 1, d - 1, -1):
        c = r[i]
        if c:
            q[i - d] = c
            for j in range(d + 1):
                r[i - d + j] -= c * m[j]
    return trim(q), trim(r[:d])


def evaluate(a: Poly, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


@lru_cache(maxsize=None)
def _binom_row(n: int) -> tuple[int, ...]:
    row = [1]
    for k in range(n):
        row.append(row[-1] * (n - k) // (k + 1))
    return tuple(row)


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return _binom_row(n)[k]
