"""Truncated p-typical Witt vectors over the rings of this package.

Arithmetic goes through the ghost map by default, which is valid for the
p-torsion-free bases used here. Universal Witt polynomials over Z are kept
as an independent backend for differential testing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import InsufficientValuation, LengthCap, PrecisionExhausted, RingMismatch
from .padic import PAdic, PAdicRing

UNIVERSAL_MAX_LENGTH = 4


def _ring_of(x):
    return x.ring


def _family(x):
    # scalars of different precision still belong to the same base
    if isinstance(x, PAdic):
        return ("padic", x.p)
    return x.ring


def _prime_of(x) -> int:
    return x.ring.p


@dataclass(frozen=True)
class WittVec:
    comps: tuple

    def __post_init__(self):
        comps = tuple(self.comps)
        if not comps:
            raise ValueError("a Witt vector needs at least one component")
        r = _family(comps[0])
        for c in comps[1:]:
            if _family(c) != r:
                raise RingMismatch("Witt components must live in one ring")
        object.__setattr__(self, "comps", comps)

    @property
    def L(self) -> int:
        return len(self.comps)

    @property
    def base(self):
        if isinstance(self.comps[0], PAdic):
            return PAdicRing(self.p, max(c.N for c in self.comps))
        return _ring_of(self.comps[0])

    @property
    def p(self) -> int:
        return _prime_of(self.comps[0])

    def __getitem__(self, i):
        return self.comps[i]

    def __len__(self):
        return len(self.comps)

    def __iter__(self):
        return iter(self.comps)

    def truncate(self, L: int) -> "WittVec":
        if L > self.L:
            raise ValueError("cannot lengthen by truncation")
        return WittVec(self.comps[:L])

    def replace(self, i: int, value) -> "WittVec":
        c = list(self.comps)
        c[i] = value
        return WittVec(tuple(c))

    def __add__(self, other):
        return witt_arith(self, other, "add")

    def __sub__(self, other):
        return witt_arith(self, other, "sub")

    def __mul__(self, other):
        if isinstance(other, int):
            return witt_arith(self, witt_int(self.base, other, self.L), "mul")
        return witt_arith(self, other, "mul")

    def __neg__(self):
        return witt_int(self.base, 0, self.L) - self

    def __pow__(self, k: int):
        ws = ghost(self)
        return unghost([w**k for w in ws], self.base)

    def __eq__(self, other):
        if not isinstance(other, WittVec) or self.L != other.L:
            return NotImplemented
        return all(a == b for a, b in zip(self.comps, other.comps))

    __hash__ = None

    def to_json(self) -> dict:
        from .jsonio import encode_element

        return {
            "base": self.base.descriptor(),
            "L": self.L,
            "comps": [encode_element(c) for c in self.comps],
        }


# ---------------------------------------------------------------- ghost map


def ghost_component(comps, m: int):
    p = _prime_of(comps[0])
    acc = None
    for i in range(m + 1):
        term = comps[i] ** (p ** (m - i))
        if i:
            term = term * (p**i)
        acc = term if acc is None else acc + term
    return acc


def ghost(x: WittVec) -> list:
    """(w_0(x), ..., w_{L-1}(x)) with w_m = sum_i p^i x_i^{p^(m-i)}."""
    return [ghost_component(x.comps, m) for m in range(x.L)]


def unghost(ws, base=None) -> WittVec:
    """Invert the ghost map; raises InsufficientValuation at the first bad index."""
    ws = list(ws)
    p = _prime_of(ws[0])
    comps: list = []
    for m, w in enumerate(ws):
        rest = w
        for i, xi in enumerate(comps):
            rest = rest - (xi ** (p ** (m - i))) * (p**i)
        try:
            comps.append(rest.div_p_power(m))
        except InsufficientValuation as exc:
            raise InsufficientValuation(
                f"ghost component {m} is not congruent to the lower components: {exc}",
                index=m,
            ) from None
        except PrecisionExhausted as exc:
            raise PrecisionExhausted(f"ghost level {m}: {exc}") from None
    return WittVec(tuple(comps))


def _check_compatible(x: WittVec, y: WittVec):
    if x.L != y.L:
        raise ValueError(f"length mismatch {x.L} vs {y.L}")
    if _family(x.comps[0]) != _family(y.comps[0]):
        raise RingMismatch(f"{x.base!r} vs {y.base!r}")


def witt_arith(x: WittVec, y: WittVec, op: str) -> WittVec:
    _check_compatible(x, y)
    gx, gy = ghost(x), ghost(y)
    if op == "add":
        ws = [a + b for a, b in zip(gx, gy)]
    elif op == "sub":
        ws = [a - b for a, b in zip(gx, gy)]
    elif op == "mul":
        ws = [a * b for a, b in zip(gx, gy)]
    else:
        raise ValueError(f"unknown op {op!r}")
    return unghost(ws)


# ---------------------------------------------------------------- constructors


def teichmuller(a, L: int) -> WittVec:
    z = a.ring.zero()
    return WittVec((a,) + (z,) * (L - 1))


def witt_zero(base, L: int) -> WittVec:
    return WittVec((base.zero(),) * L)


def witt_one(base, L: int) -> WittVec:
    return teichmuller(base.one(), L)


def witt_int(base, k: int, L: int) -> WittVec:
    """The image of the integer k in W_L(base)."""
    return unghost([base(k)] * L)


# ---------------------------------------------------------------- F, V, phi, delta


def witt_F(x: WittVec) -> WittVec:
    """Frobenius; the result is one component shorter."""
    if x.L < 2:
        raise ValueError("F needs length at least 2")
    return unghost(ghost(x)[1:])


def witt_V(x: WittVec) -> WittVec:
    """Verschiebung; the result is one component longer."""
    return WittVec((x.base.zero(),) + x.comps)


def witt_phi(x: WittVec) -> WittVec:
    """The Frobenius lift of the delta-structure on W; same as F."""
    return witt_F(x)


def witt_delta(x: WittVec) -> WittVec:
    """delta(x) with w_m(delta x) = (w_{m+1}(x) - w_m(x)^p) / p."""
    if x.L < 2:
        raise ValueError("delta needs length at least 2")
    p = x.p
    ws = ghost(x)
    dws = []
    for m in range(x.L - 1):
        diff = ws[m + 1] - ws[m] ** p
        try:
            dws.append(diff.div_p_power(1))
        except InsufficientValuation as exc:
            raise InsufficientValuation(str(exc), index=m) from None
    return unghost(dws)


# ---------------------------------------------------------------- universal polynomials
#
# Sparse polynomials over Z in 2L variables X_0..X_{L-1}, Y_0..Y_{L-1};
# monomials are exponent tuples of length 2L.


def _padd(a: dict, b: dict, k: int = 1) -> dict:
    out = dict(a)
    for mono, c in b.items():
        v = out.get(mono, 0) + k * c
        if v:
            out[mono] = v
        else:
            out.pop(mono, None)
    return out


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            mono = tuple(i + j for i, j in zip(ma, mb))
            v = out.get(mono, 0) + ca * cb
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
    return out


def _ppow(a: dict, k: int, nvars: int) -> dict:
    result = {(0,) * nvars: 1}
    base = a
    while k:
        if k & 1:
            result = _pmul(result, base)
        k >>= 1
        if k:
            base = _pmul(base, base)
    return result


def _var(i: int, nvars: int) -> dict:
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): 1}


@lru_cache(maxsize=None)
def universal_polynomials(p: int, L: int, op: str) -> tuple[dict, ...]:
    """Witt addition or multiplication polynomials S_0..S_{L-1} / P_0..P_{L-1}."""
    if L > UNIVERSAL_MAX_LENGTH:
        raise LengthCap(f"universal polynomials are capped at length {UNIVERSAL_MAX_LENGTH}")
    nv = 2 * L
    X = [_var(i, nv) for i in range(L)]
    Y = [_var(L + i, nv) for i in range(L)]

    def w(vs, m):
        acc: dict = {}
        for i in range(m + 1):
            acc = _padd(acc, _ppow(vs[i], p ** (m - i), nv), p**i)
        return acc

    polys: list[dict] = []
    for m in range(L):
        if op == "add":
            target = _padd(w(X, m), w(Y, m))
        elif op == "mul":
            target = _pmul(w(X, m), w(Y, m))
        else:
            raise ValueError(f"unknown op {op!r}")
        for i in range(m):
            target = _padd(target, _ppow(polys[i], p ** (m - i), nv), -(p**i))
        q = p**m
        out = {}
        for mono, c in target.items():
            if c % q:
                raise AssertionError("universal polynomial is not integral")
            out[mono] = c // q
        polys.append(out)
    return tuple(polys)


def _evaluate(poly: dict, values: list, powers: dict):
    ring = values[0].ring
    acc = ring.zero()
    for mono, c in poly.items():
        term = None
        for idx, k in enumerate(mono):
            if k:
                key = (idx, k)
                pw = powers.get(key)
                if pw is None:
                    pw = values[idx] ** k
                    powers[key] = pw
                term = pw if term is None else term * pw
        term = ring.one() if term is None else term
        acc = acc + term * c
    return acc


def witt_universal(x: WittVec, y: WittVec, op: str) -> WittVec:
    _check_compatible(x, y)
    polys = universal_polynomials(x.p, x.L, op)
    values = list(x.comps) + list(y.comps)
    powers: dict = {}
    return WittVec(tuple(_evaluate(poly, values, powers) for poly in polys))


def witt_universal_mul(x: WittVec, y: WittVec) -> WittVec:
    return witt_universal(x, y, "mul")


# ---------------------------------------------------------------- self-test


@dataclass
class SelfTestResult:
    name: str
    trials: int
    failures: int
    first_failure: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "failures": self.failures,
            "first_failure": self.first_failure,
            "pass": self.passed,
        }


def _random_witt(rng, p: int, N: int, L: int) -> WittVec:
    return WittVec(tuple(PAdic(p, N, rng.randrange(p**N)) for _ in range(L)))


def witt_selftest(p: int = 3, max_length: int = 4, trials: int = 200, seed: int = 0, N: int = 30) -> list[SelfTestResult]:
    """Seeded differential and identity checks over W_L(Z/p^N)."""
    import random

    rng = random.Random(seed)
    results = {k: SelfTestResult(k, 0, 0) for k in ("ghost=universal add", "ghost=universal mul", "F(V(x)) = p x", "V(x) y = V(x F(y))", "delta Leibniz")}

    def record(name, ok, info):
        r = results[name]
        r.trials += 1
        if not ok:
            r.failures += 1
            if r.first_failure is None:
                r.first_failure = info

    for t in range(trials):
        L = 1 + t % min(max_length, UNIVERSAL_MAX_LENGTH)
        x, y = _random_witt(rng, p, N, L), _random_witt(rng, p, N, L)
        info = {"trial": t, "L": L}
        record("ghost=universal add", witt_arith(x, y, "add") == witt_universal(x, y, "add"), info)
        record("ghost=universal mul", witt_arith(x, y, "mul") == witt_universal(x, y, "mul"), info)
        record("F(V(x)) = p x", witt_F(witt_V(x)) == x * p, info)
        y1 = _random_witt(rng, p, N, L + 1)
        record("V(x) y = V(x F(y))", witt_V(x) * y1 == witt_V(x * witt_F(y1)), info)
        a, b = _random_witt(rng, p, N, L + 1), _random_witt(rng, p, N, L + 1)
        da, db = witt_delta(a), witt_delta(b)
        at, bt = a.truncate(L), b.truncate(L)
        rhs = (at**p) * db + (bt**p) * da + da * db * p
        record("delta Leibniz", witt_delta(a * b) == rhs, info)
    return list(results.values())
