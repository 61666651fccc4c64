"""Truncated Breuil-Kisin rings, the E/p digit ring and dual numbers.

Every ring here is a free Z/p^N-module of finite rank with a fixed basis.
Elements store integer coordinates together with their own absolute
precision ``prec`` (at most the ring cap ``N``). Products follow the capped
absolute rule ``min(prec_a + v(b), prec_b + v(a), N)``, so multiplying by
something divisible by p gains back digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import poly as P
from .errors import (
    InsufficientValuation,
    NotAUnit,
    PrecisionExhausted,
    RingMismatch,
)
from .padic import PAdic, is_prime, vp

# ---------------------------------------------------------------- Eisenstein


@dataclass(frozen=True)
class Eisenstein:
    """Monic Eisenstein polynomial a_0 + a_1 u + ... + u^e over Z."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if len(c) < 2 or c[-1] != 1:
            raise ValueError("Eisenstein polynomial must be monic of degree >= 1")
        if any(x % self.p for x in c[:-1]):
            raise ValueError("non-leading coefficients must be divisible by p")
        if c[0] % (self.p * self.p) == 0:
            raise ValueError("constant term must have valuation exactly 1")

    @classmethod
    def unramified(cls, p: int) -> "Eisenstein":
        return cls(p, (-p, 1))

    @classmethod
    def parse(cls, p: int, text: str) -> "Eisenstein":
        return cls(p, tuple(int(t) for t in text.replace(" ", "").split(",")))

    @property
    def e(self) -> int:
        return len(self.coeffs) - 1

    @property
    def poly(self) -> list[int]:
        return list(self.coeffs)

    @property
    def dpoly(self) -> list[int]:
        return P.derivative(self.poly)

    @property
    def is_unramified(self) -> bool:
        return self.e == 1

    def __str__(self):
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("u" if i == 1 else f"u^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' if mono else ''}{mono}")
        return " + ".join(terms).replace("+ -", "- ")

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


# ---------------------------------------------------------------- h_n and t_n


def phi_n_poly(E: Eisenstein, n: int) -> list[int]:
    """phi^n(E) = E(u^{p^n}) for the lift u -> u^p."""
    return P.compose_power(E.poly, E.p**n)


def h_poly(E: Eisenstein, n: int) -> list[int]:
    """(phi^n(E) - E^{p^n}) / p over Z, with the divisibility checked."""
    diff = P.sub(phi_n_poly(E, n), P.power(E.poly, E.p**n))
    for i, c in enumerate(diff):
        if c % E.p:
            raise InsufficientValuation(
                f"coefficient of u^{i} in phi^{n}(E) - E^(p^{n}) is not divisible by p",
                index=i,
            )
    return [c // E.p for c in diff]


def t_poly(E: Eisenstein, n: int) -> list[int]:
    """h_n' / p^n over Z, with the divisibility checked."""
    d = P.derivative(h_poly(E, n))
    q = E.p**n
    for i, c in enumerate(d):
        if c % q:
            raise InsufficientValuation(
                f"coefficient of u^{i} in h_{n}' has valuation {vp(c, E.p)} < {n}", index=i
            )
    return [c // q for c in d]


# ---------------------------------------------------------------- generic


class FreeRing:
    """Common behaviour for the finite free Z/p^N-algebras below."""

    p: int
    N: int
    rank: int

    def key(self) -> tuple:
        raise NotImplementedError

    def _mul_raw(self, a: tuple[int, ...], b: tuple[int, ...]) -> list[int]:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, FreeRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def elem(self, coords, prec: int | None = None) -> "Elem":
        coords = list(coords)
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return Elem(self, coords, self.N if prec is None else prec)

    def zero(self) -> "Elem":
        return Elem(self, [0] * self.rank, self.N)

    def one(self) -> "Elem":
        return self(1)

    def __call__(self, k: int) -> "Elem":
        c = [0] * self.rank
        c[0] = int(k)
        return Elem(self, c, self.N)

    def random(self, rng, prec: int | None = None) -> "Elem":
        m = self.p**self.N
        return self.elem([rng.randrange(m) for _ in range(self.rank)], prec)


class Elem:
    """An element of a FreeRing with absolute precision ``prec``."""

    __slots__ = ("ring", "c", "prec")

    def __init__(self, ring: FreeRing, coords, prec: int):
        if prec > ring.N:
            prec = ring.N
        if prec < 0:
            raise PrecisionExhausted(f"negative precision {prec}")
        m = ring.p**prec
        self.ring = ring
        self.c = tuple(int(x) % m for x in coords)
        self.prec = prec

    # ----- structure
    def _check(self, other: "Elem"):
        if self.ring is not other.ring and self.ring != other.ring:
            raise RingMismatch(f"{self.ring!r} vs {other.ring!r}")

    def _lift(self, other):
        if isinstance(other, Elem):
            self._check(other)
            return other
        if isinstance(other, PAdic):
            if other.p != self.ring.p:
                raise RingMismatch("prime mismatch")
            c = [0] * self.ring.rank
            c[0] = other.residue
            return Elem(self.ring, c, other.N)
        return None

    def valuation(self) -> int:
        p, cap = self.ring.p, self.prec
        v = cap
        for x in self.c:
            if x:
                v = min(v, vp(x, p, cap))
                if v == 0:
                    return 0
        return v

    def is_zero(self) -> bool:
        return not any(self.c)

    # ----- arithmetic
    def __add__(self, other):
        if isinstance(other, int):
            c = list(self.c)
            c[0] += other
            return Elem(self.ring, c, self.prec)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Elem(self.ring, [a + b for a, b in zip(self.c, o.c)], min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return Elem(self.ring, [-a for a in self.c], self.prec)

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Elem(self.ring, [a - b for a, b in zip(self.c, o.c)], min(self.prec, o.prec))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self.ring.zero()
            return Elem(self.ring, [a * other for a in self.c], self.prec + vp(other, self.ring.p))
        o = self._lift(other)
        if o is None:
            return NotImplemented
        prec = min(self.prec + o.valuation(), o.prec + self.valuation(), self.ring.N)
        return Elem(self.ring, self.ring._mul_raw(self.c, o.c), prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        if not isinstance(other, Elem) or self.ring != other.ring:
            return NotImplemented
        m = self.ring.p ** min(self.prec, other.prec)
        return all((a - b) % m == 0 for a, b in zip(self.c, other.c))

    __hash__ = None

    def __repr__(self):
        return f"{type(self.ring).__name__}Elem({list(self.c)}, prec={self.prec})"

    def div_p_power(self, k: int) -> "Elem":
        if k == 0:
            return self
        v = self.valuation()
        if v < k:
            raise InsufficientValuation(f"element valuation {v} < {k}")
        if self.prec - k < 1:
            raise PrecisionExhausted(f"dividing by p^{k} exhausts precision {self.prec}")
        q = self.ring.p**k
        return Elem(self.ring, [a // q for a in self.c], self.prec - k)

    def with_precision(self, prec: int) -> "Elem":
        return Elem(self.ring, self.c, min(prec, self.prec))

    def perturb(self, delta: int) -> "Elem":
        """Add an integer to the constant coordinate (fault injection helper)."""
        return self + delta

    def inverse(self) -> "Elem":
        return self.ring.invert(self)

    @property
    def coeffs(self) -> list[PAdic]:
        if self.prec < 1:
            raise PrecisionExhausted("element carries no digits")
        return [PAdic(self.ring.p, self.prec, x) for x in self.c]

    def signed(self) -> list[int]:
        m = self.ring.p**self.prec
        return [x - m if x > m // 2 else x for x in self.c]

    def to_json(self) -> dict:
        return self.ring.encode(self)


def _newton_inverse(a: Elem) -> Elem:
    ring = a.ring
    p = ring.p
    if a.c[0] % p == 0:
        raise NotAUnit(f"constant coordinate of {a!r} is not a unit")
    x = ring(pow(a.c[0] % p, -1, p))
    for _ in range(128):
        err = 1 - a * x
        if err.is_zero():
            return x.with_precision(a.prec)
        x = x + x * err
    raise NotAUnit("Newton iteration did not converge")


# ---------------------------------------------------------------- S / E^m


class SRing(FreeRing):
    """Z_p[u]/(E^m, p^N) with basis 1, u, ..., u^{em-1}."""

    def __init__(self, E: Eisenstein, m: int, N: int):
        if m < 1 or N < 1:
            raise ValueError("m and N must be positive")
        self.E = E
        self.p = E.p
        self.m = m
        self.N = N
        self.rank = E.e * m
        self.modulus = P.power(E.poly, m)

    def key(self):
        return ("sring", self.E.coeffs, self.p, self.m, self.N)

    def __repr__(self):
        return f"SRing(E={self.E}, m={self.m}, N={self.N})"

    def reduce_poly(self, f) -> list[int]:
        _, r = P.divmod_monic(list(f), self.modulus)
        return r + [0] * (self.rank - len(r))

    def _mul_raw(self, a, b):
        return self.reduce_poly(P.mul(list(a), list(b)))

    def from_poly(self, f, prec: int | None = None) -> Elem:
        return self.elem(self.reduce_poly(f), prec)

    @cached_property
    def u(self) -> Elem:
        return self.from_poly([0, 1])

    @cached_property
    def E_elem(self) -> Elem:
        return self.from_poly(self.E.poly)

    @cached_property
    def dE(self) -> Elem:
        return self.from_poly(self.E.dpoly)

    def lam(self) -> Elem:
        return self.u - self.p

    def invert(self, a: Elem) -> Elem:
        return _newton_inverse(a)

    def derivative(self, a: Elem) -> Elem:
        return self.from_poly(P.derivative(list(a.c)), a.prec)

    def frobenius(self, a: Elem) -> Elem:
        return self.from_poly(P.compose_power(list(a.c), self.p), a.prec)

    def descriptor(self) -> dict:
        return {"kind": "sring", "p": self.p, "E": self.E.to_json(), "m": self.m, "N": self.N}

    def encode(self, a: Elem) -> dict:
        return {
            "p": self.p,
            "E": self.E.to_json(),
            "m": self.m,
            "N": self.N,
            "prec": a.prec,
            "coeffs": [str(x) for x in a.c],
        }

    def decode(self, d: dict) -> Elem:
        return self.elem([int(x) for x in d["coeffs"]], int(d.get("prec", self.N)))


def OK(E: Eisenstein, N: int) -> SRing:
    """O_K = S/E."""
    return SRing(E, 1, N)


def sring_mul(a: Elem, b: Elem) -> Elem:
    return a * b


def frobenius_lift(a: Elem) -> Elem:
    return a.ring.frobenius(a)


def derivative(a: Elem) -> Elem:
    return a.ring.derivative(a)


# ---------------------------------------------------------------- digit ring


class DigitRing(FreeRing):
    """S[[E/p]]/((E/p)^n, p^N) in base-(E/p) digits with digits in O_K.

    Coordinates are flattened digit-major: coordinate j*e + i is the
    coefficient of u^i in digit j.
    """

    def __init__(self, E: Eisenstein, n: int, N: int):
        if n < 1 or N < 1:
            raise ValueError("n and N must be positive")
        self.E = E
        self.p = E.p
        self.n = n
        self.N = N
        self.rank = E.e * n

    def key(self):
        return ("digit", self.E.coeffs, self.p, self.n, self.N)

    def __repr__(self):
        return f"DigitRing(E={self.E}, n={self.n}, N={self.N})"

    def normalize(self, digits: list[list[int]]) -> list[int]:
        """Reduce each digit mod E, carrying p*q into the next digit."""
        e, n, p = self.E.e, self.n, self.p
        ds = [list(d) for d in digits[:n]] + [[] for _ in range(n - len(digits))]
        out: list[int] = []
        for j in range(n):
            q, r = P.divmod_monic(ds[j], self.E.poly)
            out.extend(r + [0] * (e - len(r)))
            if j + 1 < n and q:
                ds[j + 1] = P.add(ds[j + 1], P.scale(q, p))
        return out

    def digits(self, a: Elem) -> list[list[int]]:
        e = self.E.e
        return [list(a.c[j * e : (j + 1) * e]) for j in range(self.n)]

    def _mul_raw(self, a, b):
        e, n = self.E.e, self.n
        da = [list(a[j * e : (j + 1) * e]) for j in range(n)]
        db = [list(b[j * e : (j + 1) * e]) for j in range(n)]
        prod: list[list[int]] = [[] for _ in range(n)]
        for i in range(n):
            if not any(da[i]):
                continue
            for j in range(n - i):
                if any(db[j]):
                    prod[i + j] = P.add(prod[i + j], P.mul(da[i], db[j]))
        return self.normalize(prod)

    def from_digits(self, digits, prec: int | None = None) -> Elem:
        return self.elem(self.normalize([list(d) for d in digits]), prec)

    def from_poly(self, f, prec: int | None = None) -> Elem:
        """Image of a polynomial in u (any degree) under S -> S[[E/p]]."""
        return self.from_digits([list(f)], prec)

    def from_sring(self, a: Elem) -> Elem:
        ring = a.ring
        if not isinstance(ring, SRing) or ring.E != self.E:
            raise RingMismatch("expected an element of S/E^m with the same E")
        if ring.m < self.n and ring.m < self.N:
            raise RingMismatch("S/E^m maps to the digit ring only when E^m dies there")
        return self.from_poly(list(a.c), min(a.prec, self.N))

    @cached_property
    def x(self) -> Elem:
        """The digit generator E/p."""
        if self.n == 1:
            return self.zero()
        return self.from_digits([[], [1]])

    @cached_property
    def u(self) -> Elem:
        return self.from_poly([0, 1])

    @cached_property
    def E_elem(self) -> Elem:
        return self.from_poly(self.E.poly)

    @cached_property
    def dE(self) -> Elem:
        return self.from_poly(self.E.dpoly)

    def project(self, a: Elem, n: int) -> Elem:
        """Image under S[[E/p]]/(E/p)^{n'} -> S[[E/p]]/(E/p)^n."""
        target = DigitRing(self.E, n, self.N)
        return target.elem(a.c[: self.E.e * n], a.prec)

    def shift(self, a: Elem) -> Elem:
        """Multiplication by E/p done as a digit shift."""
        return self.from_digits([[]] + self.digits(a)[:-1], a.prec)

    def invert(self, a: Elem) -> Elem:
        digits = self.digits(a)
        ok = OK(self.E, self.N)
        d0 = ok.elem(digits[0], a.prec)
        if d0.c[0] % self.p == 0:
            raise NotAUnit("digit 0 is not a unit in O_K")
        g = self.from_poly(list(_newton_inverse(d0).c), a.prec)
        z = a * g - 1
        acc = self.one()
        term = self.one()
        for _ in range(self.n):
            term = term * (-z)
            acc = acc + term
        return (g * acc).with_precision(a.prec)

    def descriptor(self) -> dict:
        return {"kind": "digit", "p": self.p, "E": self.E.to_json(), "n": self.n, "N": self.N}

    def encode(self, a: Elem) -> dict:
        return {
            "p": self.p,
            "E": self.E.to_json(),
            "n": self.n,
            "N": self.N,
            "prec": a.prec,
            "digits": [[str(x) for x in d] for d in self.digits(a)],
        }

    def decode(self, d: dict) -> Elem:
        flat = [int(x) for dig in d["digits"] for x in dig]
        return self.elem(flat, int(d.get("prec", self.N)))


def digit_mul(a: Elem, b: Elem) -> Elem:
    return a * b


def digit_invert(a: Elem) -> Elem:
    return a.ring.invert(a)


# ---------------------------------------------------------------- dual numbers


class DualRing(FreeRing):
    """R[eps]/eps^2 over one of the rings above; coordinates are (base, eps)."""

    def __init__(self, base: FreeRing):
        self.base = base
        self.p = base.p
        self.N = base.N
        self.rank = 2 * base.rank

    def key(self):
        return ("dual", self.base.key())

    def __repr__(self):
        return f"DualRing({self.base!r})"

    def _mul_raw(self, a, b):
        r = self.base.rank
        a0, a1, b0, b1 = a[:r], a[r:], b[:r], b[r:]
        head = self.base._mul_raw(a0, b0)
        t1 = self.base._mul_raw(a0, b1) if any(b1) else [0] * r
        t2 = self.base._mul_raw(a1, b0) if any(a1) else [0] * r
        return list(head) + [x + y for x, y in zip(t1, t2)]

    def make(self, base: Elem, eps: Elem | None = None) -> Elem:
        if eps is None:
            eps = self.base.zero()
        return self.elem(list(base.c) + list(eps.c), min(base.prec, eps.prec))

    def embed(self, a: Elem) -> Elem:
        return self.make(a)

    @cached_property
    def eps(self) -> Elem:
        return self.make(self.base.zero(), self.base.one())

    def base_part(self, a: Elem) -> Elem:
        return self.base.elem(a.c[: self.base.rank], a.prec)

    def eps_part(self, a: Elem) -> Elem:
        return self.base.elem(a.c[self.base.rank :], a.prec)

    def invert(self, a: Elem) -> Elem:
        b0 = self.base_part(a)
        inv = self.base.invert(b0)
        return self.make(inv, -(self.eps_part(a) * inv * inv))

    def frobenius(self, a: Elem) -> Elem:
        return self.make(self.base.frobenius(self.base_part(a)))

    def project(self, a: Elem, n: int) -> Elem:
        target = DualRing(DigitRing(self.base.E, n, self.N))
        b = self.base.project(self.base_part(a), n)
        e = self.base.project(self.eps_part(a), n)
        return target.make(b, e)

    def descriptor(self) -> dict:
        return {"kind": "dual", "base": self.base.descriptor()}

    def encode(self, a: Elem) -> dict:
        return {"base": self.base.encode(self.base_part(a)), "eps": self.base.encode(self.eps_part(a))}

    def decode(self, d: dict) -> Elem:
        return self.make(self.base.decode(d["base"]), self.base.decode(d["eps"]))


# ---------------------------------------------------------------- h_n, t_n as elements


def compute_h_n(E: Eisenstein, n: int, ring: FreeRing) -> Elem:
    """h_n in ``ring`` (an SRing or DigitRing over E); checks it is a unit."""
    h = h_poly(E, n)
    if not h or h[0] % E.p == 0:
        raise NotAUnit(f"h_{n} is not a unit mod (p, u)")
    return ring.from_poly(h)


def compute_t_n(E: Eisenstein, n: int, ring: FreeRing) -> Elem:
    t = t_poly(E, n)
    # checked on integer polynomials: u-derivatives do not descend to S/E^m
    assert P.trim(P.scale(t, E.p**n)) == P.trim(P.derivative(h_poly(E, n)))
    return ring.from_poly(t)


def ring_from_descriptor(d: dict):
    from .padic import PAdicRing

    kind = d["kind"]
    if kind == "padic":
        return PAdicRing(int(d["p"]), int(d["N"]))
    if kind == "dual":
        return DualRing(ring_from_descriptor(d["base"]))
    p = int(d["p"]) if "p" in d else None
    coeffs = [int(x) for x in d["E"]]
    if p is None:
        p = _prime_of(coeffs)
    E = Eisenstein(p, tuple(coeffs))
    if kind == "sring":
        return SRing(E, int(d["m"]), int(d["N"]))
    if kind == "digit":
        return DigitRing(E, int(d["n"]), int(d["N"]))
    raise ValueError(f"unknown ring kind {kind!r}")


def _prime_of(coeffs: list[int]) -> int:
    a0 = abs(coeffs[0])
    q = 2
    while q <= a0:
        if a0 % q == 0 and is_prime(q):
            return q
        q += 1
    raise ValueError("cannot infer p from the constant term")
