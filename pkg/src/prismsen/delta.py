"""A truncated free delta-ring Z[u][t_0, ..., t_D][eps]/eps^2.

Here t_i stands for delta^i(t). The Frobenius lift is phi(u) = u^p,
phi(t_i) = t_i^p + p t_{i+1}, phi(eps) = 0, and delta(x) = (phi(x) - x^p)/p.
Coefficients are exact integers; no p-adic truncation is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import poly as P
from .errors import CapExceeded, InexactDivision
from .rings import Eisenstein

Key = tuple  # (eps, udeg, texps)


class DeltaRing:
    def __init__(self, p: int, D: int = 4, degree_cap: int | None = None):
        self.p = p
        self.D = D
        self.degree_cap = 3 * p if degree_cap is None else degree_cap
        self._phi_pow: dict = {}

    def __repr__(self):
        return f"DeltaRing(p={self.p}, D={self.D}, degree_cap={self.degree_cap})"

    def _zero_t(self):
        return (0,) * (self.D + 1)

    def poly(self, terms: dict) -> "DeltaPoly":
        return DeltaPoly(self, {k: v for k, v in terms.items() if v})

    def const(self, c: int) -> "DeltaPoly":
        return self.poly({(0, 0, self._zero_t()): c})

    def t(self, i: int = 0) -> "DeltaPoly":
        if not 0 <= i <= self.D:
            raise CapExceeded(f"delta order {i} exceeds cap {self.D}")
        e = list(self._zero_t())
        e[i] = 1
        return self.poly({(0, 0, tuple(e)): 1})

    def u(self) -> "DeltaPoly":
        return self.poly({(0, 1, self._zero_t()): 1})

    def eps(self) -> "DeltaPoly":
        return self.poly({(1, 0, self._zero_t()): 1})

    def upoly(self, f) -> "DeltaPoly":
        z = self._zero_t()
        return self.poly({(0, i, z): c for i, c in enumerate(f) if c})

    # --------------------------------------------------------- phi and delta
    def _phi_t_power(self, i: int, k: int) -> "DeltaPoly":
        key = (i, k)
        if key not in self._phi_pow:
            if i >= self.D:
                raise CapExceeded(f"phi(t_{i}) needs t_{i + 1}, beyond the cap D={self.D}")
            img = self.t(i) ** self.p + self.t(i + 1) * self.p
            self._phi_pow[key] = img**k
        return self._phi_pow[key]

    def phi(self, x: "DeltaPoly") -> "DeltaPoly":
        out = self.poly({})
        z = self._zero_t()
        for (eps, ud, te), c in x.terms.items():
            if eps:
                continue
            term = self.poly({(0, ud * self.p, z): c})
            for i, k in enumerate(te):
                if k:
                    term = term * self._phi_t_power(i, k)
            out = out + term
        return out

    def delta(self, x: "DeltaPoly") -> "DeltaPoly":
        num = self.phi(x) - x**self.p
        terms = {}
        for key, c in num.terms.items():
            if c % self.p:
                raise InexactDivision(f"coefficient {c} of {key} is not divisible by {self.p}")
            terms[key] = c // self.p
        out = self.poly(terms)
        self.check_caps(out)
        return out

    def check_caps(self, x: "DeltaPoly"):
        for (_, _, te) in x.terms:
            if sum(te) > self.degree_cap:
                raise CapExceeded(f"t-degree {sum(te)} exceeds cap {self.degree_cap}")


@dataclass
class DeltaPoly:
    ring: DeltaRing
    terms: dict = field(default_factory=dict)

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return DeltaPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return DeltaPoly(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return DeltaPoly(self.ring, {})
            return DeltaPoly(self.ring, {k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (e1, u1, t1), c1 in self.terms.items():
            for (e2, u2, t2), c2 in other.terms.items():
                if e1 and e2:
                    continue
                key = (e1 + e2, u1 + u2, tuple(a + b for a, b in zip(t1, t2)))
                s = out.get(key, 0) + c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return DeltaPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = self.ring.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, DeltaPoly):
            return NotImplemented
        return self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def eps_part(self) -> "DeltaPoly":
        """The coefficient of eps, as an eps-free polynomial."""
        return DeltaPoly(self.ring, {(0, u, t): c for (e, u, t), c in self.terms.items() if e})

    def base_part(self) -> "DeltaPoly":
        return DeltaPoly(self.ring, {k: c for k, c in self.terms.items() if not k[0]})

    def at_eps_zero(self) -> "DeltaPoly":
        return self.base_part()

    def divisible_by_t(self, i: int = 0) -> bool:
        return all(t[i] >= 1 for (_, _, t) in self.terms)

    def u_content_divisible_by(self, f) -> bool:
        """Does the polynomial f(u) divide this, viewed in Q(t)[u]?"""
        groups: dict = {}
        for (e, u, t), c in self.terms.items():
            g = groups.setdefault((e, t), {})
            g[u] = c
        for g in groups.values():
            q = [g.get(i, 0) for i in range(max(g) + 1)]
            if not _poly_divisible(q, list(f)):
                return False
        return True

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e, u, t), c in sorted(self.terms.items()):
            mono = []
            if e:
                mono.append("eps")
            if u:
                mono.append("u" if u == 1 else f"u^{u}")
            for i, k in enumerate(t):
                if k:
                    name = "t" if i == 0 else f"d{i}t"
                    mono.append(name if k == 1 else f"{name}^{k}")
            parts.append(f"{c}*" + "*".join(mono) if mono else str(c))
        return " + ".join(parts)

    def to_json(self) -> list:
        return [
            {"eps": e, "u": u, "t": list(t), "coeff": str(c)}
            for (e, u, t), c in sorted(self.terms.items())
        ]


def _poly_divisible(a, b) -> bool:
    from fractions import Fraction

    a = [Fraction(x) for x in a]
    while a and a[-1] == 0:
        a.pop()
    if not a:
        return True
    lead = Fraction(b[-1])
    d = len(b) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i] / lead
        for j in range(d + 1):
            a[i - d + j] -= c * b[j]
    return not any(a[:d])


def delta_apply(x: DeltaPoly) -> DeltaPoly:
    return x.ring.delta(x)


# ---------------------------------------------------------------- eta


class EtaMap:
    """u -> u + eps E(u), t -> t (1 - eps E'(u)), extended to delta^i(t) by delta."""

    def __init__(self, ring: DeltaRing, E: Eisenstein):
        if ring.p != E.p:
            raise ValueError("prime mismatch")
        self.ring = ring
        self.E = E
        self._t_images: list[DeltaPoly] = []

    @property
    def Eu(self) -> DeltaPoly:
        return self.ring.upoly(self.E.poly)

    @property
    def dEu(self) -> DeltaPoly:
        return self.ring.upoly(self.E.dpoly)

    def image_u(self) -> DeltaPoly:
        return self.ring.u() + self.ring.eps() * self.Eu

    def image_t(self, i: int) -> DeltaPoly:
        """eta(delta^i t), defined by eta(delta x) = delta(eta x)."""
        R = self.ring
        while len(self._t_images) <= i:
            j = len(self._t_images)
            if j == 0:
                img = R.t(0) * (1 - R.eps() * self.dEu)
            else:
                if j > R.D:
                    raise CapExceeded(f"delta order {j} exceeds cap {R.D}")
                img = R.delta(self._t_images[j - 1])
            self._t_images.append(img)
        return self._t_images[i]

    def __call__(self, x: DeltaPoly) -> DeltaPoly:
        R = self.ring
        out = R.poly({})
        z = R._zero_t()
        eu = self.image_u()
        for (e, ud, te), c in x.terms.items():
            if e:
                # eps * eta(m) = eps * m since eps^2 = 0
                out = out + R.poly({(e, ud, te): c})
                continue
            term = eu**ud * c if ud else R.poly({(0, 0, z): c})
            for i, k in enumerate(te):
                if k:
                    term = term * self.image_t(i) ** k
            out = out + term
        R.check_caps(out)
        return out


def eta_apply(x: DeltaPoly, E: Eisenstein) -> DeltaPoly:
    return EtaMap(x.ring, E)(x)


def closed_form_eta_t(ring: DeltaRing, E: Eisenstein, i: int) -> DeltaPoly:
    """delta^i t + (-1)^{i-1} (prod_{j<i} delta^j t)^{p-1} t E'(u) eps."""
    if i == 0:
        return ring.t(0) * (1 - ring.eps() * ring.upoly(E.dpoly))
    prod = ring.const(1)
    for j in range(i):
        prod = prod * ring.t(j)
    sign = 1 if (i - 1) % 2 == 0 else -1
    return ring.t(i) + prod ** (ring.p - 1) * ring.t(0) * ring.upoly(E.dpoly) * ring.eps() * sign


@dataclass
class EtaCheck:
    i: int
    passed: bool
    shape_ok: bool
    diff: DeltaPoly

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "pass": self.passed,
            "shape_ok": self.shape_ok,
            "diff": self.diff.to_json(),
        }


@dataclass
class EtaReport:
    p: int
    E: list
    checks: list[EtaCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed and c.shape_ok for c in self.checks)

    def to_json(self) -> dict:
        return {"p": self.p, "E": self.E, "checks": [c.to_json() for c in self.checks], "pass": self.passed}


def verify_eta_on_delta_powers(E: Eisenstein, i_max: int, D: int = 4, degree_cap: int | None = None) -> EtaReport:
    """Compare eta(delta^i t) from delta-commutation with the closed formula."""
    R = DeltaRing(E.p, D, degree_cap)
    eta = EtaMap(R, E)
    checks = []
    for i in range(1, i_max + 1):
        a = eta.image_t(i)
        b = closed_form_eta_t(R, E, i)
        diff = a - b
        tail = (a - R.t(i)).eps_part()
        shape = tail.divisible_by_t(0) and tail.u_content_divisible_by(E.dpoly)
        checks.append(EtaCheck(i, diff.is_zero(), shape, diff))
    return EtaReport(E.p, list(E.coeffs), checks)


@dataclass
class ThetaReport:
    p: int
    generator_checks: list[dict]
    power_checks: list[dict]

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.generator_checks + self.power_checks)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "generators": self.generator_checks,
            "lambda_powers": self.power_checks,
            "pass": self.passed,
        }


def theta_of(x: DeltaPoly, eta: EtaMap) -> DeltaPoly:
    """Theta(x) = eps-coefficient of eta(x) (x eps-free)."""
    return eta(x).eps_part()


def theta_on_envelope_generators(p: int, i_max: int, k_max: int = 5, D: int = 4, degree_cap: int | None = None) -> ThetaReport:
    """Theta on delta^i t and on lambda^k for E = u - p."""
    E = Eisenstein.unramified(p)
    R = DeltaRing(p, D, degree_cap)
    eta = EtaMap(R, E)
    gens = []
    for i in range(0, i_max + 1):
        got = theta_of(R.t(i), eta)
        prod = R.const(1)
        for j in range(i):
            prod = prod * R.t(j)
        sign = 1 if (i - 1) % 2 == 0 else -1
        want = prod ** (p - 1) * R.t(0) * sign
        gens.append({"i": i, "pass": got == want, "theta": got.to_json()})
    lam = R.upoly([-p, 1])
    powers = []
    for k in range(0, k_max + 1):
        got = theta_of(lam**k, eta)
        want = lam**k * k
        powers.append({"k": k, "pass": got == want})
    return ThetaReport(p, gens, powers)


def delta_residual_on_u(ring: DeltaRing, E: Eisenstein) -> DeltaPoly:
    """delta(eta(u)) - eta(delta(u)); nonzero because phi(eps) = 0 while eta moves u by eps E."""
    eta = EtaMap(ring, E)
    return ring.delta(eta(ring.u())) - eta(ring.delta(ring.u()))


def theta_ring_via_eta(E: Eisenstein, f) -> list[int]:
    """eps-coefficient of eta(f(u)) as an integer polynomial in u."""
    R = DeltaRing(E.p, 1)
    got = theta_of(R.upoly(list(f)), EtaMap(R, E))
    out: dict = {}
    for (_, u, _), c in got.terms.items():
        out[u] = out.get(u, 0) + c
    return P.trim([out.get(i, 0) for i in range(max(out, default=-1) + 1)])
