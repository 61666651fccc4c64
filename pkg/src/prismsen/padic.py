"""Residues modulo p^N with tracked valuation (capped absolute precision)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InsufficientValuation, NotAUnit, PrecisionExhausted, PrimeMismatch


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp(n: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an integer; ``cap`` (or a large sentinel) for zero."""
    if n == 0:
        return cap if cap is not None else 10**9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


@dataclass(frozen=True)
class PAdicRing:
    """Descriptor for the scalar ring Z/p^N, used as a Witt vector base."""

    p: int
    N: int

    def __call__(self, value: int) -> "PAdic":
        return PAdic(self.p, self.N, value)

    def zero(self) -> "PAdic":
        return PAdic(self.p, self.N, 0)

    def one(self) -> "PAdic":
        return PAdic(self.p, self.N, 1)

    def descriptor(self) -> dict:
        return {"kind": "padic", "p": self.p, "N": self.N}


@dataclass(frozen=True, eq=False)
class PAdic:
    p: int
    N: int
    residue: int
    val_known: int = field(init=False)

    def __post_init__(self):
        if self.N < 1:
            raise PrecisionExhausted(f"precision must be at least 1, got {self.N}")
        if self.p < 2:
            raise ValueError("p must be at least 2")
        r = self.residue % self.p**self.N
        object.__setattr__(self, "residue", r)
        object.__setattr__(self, "val_known", vp(r, self.p, self.N))

    # -- helpers
    @property
    def ring(self) -> PAdicRing:
        return PAdicRing(self.p, self.N)

    @property
    def prec(self) -> int:
        return self.N

    def _coerce(self, other) -> "PAdic":
        if isinstance(other, PAdic):
            if other.p != self.p:
                raise PrimeMismatch(f"cannot combine p={self.p} with p={other.p}")
            return other
        if isinstance(other, int):
            return PAdic(self.p, self.N, other)
        return NotImplemented

    def _binary(self, other, fn):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return PAdic(self.p, min(self.N, o.N), fn(self.residue, o.residue))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return PAdic(self.p, self.N, -self.residue)

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        return PAdic(self.p, self.N, pow(self.residue, k, self.p**self.N))

    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (PAdic, int)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        n = min(self.N, o.N)
        return (self.residue - o.residue) % self.p**n == 0

    def __hash__(self):
        return hash((self.p, self.N, self.residue))

    def __repr__(self):
        return f"PAdic({self.residue} mod {self.p}^{self.N})"

    def __int__(self):
        return self.residue

    # -- valuation-aware operations
    def is_zero(self) -> bool:
        return self.residue == 0

    def valuation(self) -> int:
        return self.val_known

    def signed(self) -> int:
        """Representative in (-p^N/2, p^N/2]."""
        m = self.p**self.N
        r = self.residue
        return r - m if r > m // 2 else r

    def div_p_power(self, k: int) -> "PAdic":
        if k < 0:
            raise ValueError("k must be nonnegative")
        if self.residue == 0 and k >= self.N:
            raise PrecisionExhausted(f"dividing by {self.p}^{k} leaves no digits of {self.N}")
        if self.val_known < k:
            raise InsufficientValuation(
                f"valuation {self.val_known} < {k} (residue {self.residue} mod {self.p}^{self.N})"
            )
        if self.N - k < 1:
            raise PrecisionExhausted(f"dividing by {self.p}^{k} leaves no digits of {self.N}")
        return PAdic(self.p, self.N - k, self.residue // self.p**k)

    def invert(self) -> "PAdic":
        if self.val_known > 0:
            raise NotAUnit(f"{self!r} is not a unit")
        x = pow(self.residue % self.p, -1, self.p)
        prec = 1
        mod = self.p**self.N
        while prec < self.N:
            prec *= 2
            x = (x * (2 - self.residue * x)) % mod
        return PAdic(self.p, self.N, x)

    def with_precision(self, N: int) -> "PAdic":
        if N > self.N:
            raise PrecisionExhausted("cannot raise precision of a residue")
        return PAdic(self.p, N, self.residue)

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "residue": str(self.residue)}

    @classmethod
    def from_json(cls, d: dict) -> "PAdic":
        return cls(int(d["p"]), int(d["N"]), int(d["residue"]))


def padic_arith(a: PAdic, b: PAdic, op: str) -> PAdic:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def padic_div_p_power(a: PAdic, k: int) -> PAdic:
    return a.div_p_power(k)


def padic_invert(a: PAdic) -> PAdic:
    return a.invert()
