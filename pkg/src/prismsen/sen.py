"""Sen modules over S/E^n: Leibniz check, nilpotence, cohomology and weights."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import poly as P
from .errors import NonFreeModule
from .padic import vp
from .rings import Eisenstein, Elem, SRing

# ---------------------------------------------------------------- rings and modules


class SenRing:
    """S/E^n at precision p^N together with the derivation f -> f'E."""

    def __init__(self, E: Eisenstein, n: int, N: int):
        self.E = E
        self.n = n
        self.N = N
        self.p = E.p
        self.ring = SRing(E, n, N)

    def __eq__(self, other):
        return isinstance(other, SenRing) and self.ring == other.ring

    def __hash__(self):
        return hash(self.ring)

    @property
    def dim(self) -> int:
        """Rank of S/E^n over Z_p."""
        return self.ring.rank

    def theta(self, f: Elem) -> Elem:
        return self.ring.derivative(f) * self.ring.E_elem

    def to_json(self) -> dict:
        return {"p": self.p, "E": self.E.to_json(), "n": self.n, "N": self.N}


@dataclass
class SenModule:
    """Free module with basis e_1..e_r; theta[i][j] is the e_i-coordinate of Theta(e_j)."""

    ring: SenRing
    theta: list[list[Elem]]
    operator: list[list[int]] | None = field(default=None, repr=False)

    def __post_init__(self):
        r = len(self.theta)
        if any(len(row) != r for row in self.theta):
            raise ValueError("theta must be square")
        if self.operator is None:
            self.operator = self._leibniz_operator()

    @property
    def rank(self) -> int:
        return len(self.theta)

    @property
    def dim(self) -> int:
        return self.rank * self.ring.dim

    def _leibniz_operator(self) -> list[list[int]]:
        """Matrix of Theta on the Z/p^N-basis u^a e_j (index j*dim + a), extended by Leibniz."""
        R = self.ring.ring
        d = self.ring.dim
        D = self.dim
        mod = self.ring.p**self.ring.N
        cols = []
        for j in range(self.rank):
            for a in range(d):
                f = R.from_poly([0] * a + [1])
                col = [0] * D
                tf = self.ring.theta(f)
                for t in range(d):
                    col[j * d + t] += tf.c[t]
                for i in range(self.rank):
                    g = f * self.theta[i][j]
                    for t in range(d):
                        col[i * d + t] += g.c[t]
                cols.append([x % mod for x in col])
        return [[cols[c][r] for c in range(D)] for r in range(D)]

    def apply(self, x: list[Elem]) -> list[Elem]:
        R = self.ring.ring
        d = self.ring.dim
        flat = [c for v in x for c in v.c]
        out = [sum(row[k] * flat[k] for k in range(len(flat))) for row in self.operator]
        return [R.elem(out[i * d : (i + 1) * d]) for i in range(self.rank)]

    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_json(),
            "rank": self.rank,
            "theta": [[[str(c) for c in e.c] for e in row] for row in self.theta],
        }

    @classmethod
    def from_json(cls, d: dict) -> "SenModule":
        if d.get("relations"):
            raise NonFreeModule("modules with relations are not supported; supply a free module")
        rd = d["ring"]
        coeffs = [int(x) for x in rd["E"]]
        p = int(rd["p"]) if "p" in rd else _guess_p(coeffs)
        ring = SenRing(Eisenstein(p, tuple(coeffs)), int(rd["n"]), int(rd["N"]))
        r = int(d["rank"])
        theta = [[_entry(ring, e) for e in row] for row in d["theta"]]
        if len(theta) != r:
            raise ValueError("rank does not match theta")
        return cls(ring, theta)


def _entry(ring: SenRing, e) -> Elem:
    if isinstance(e, (int, str)):
        return ring.ring(int(e))
    return ring.ring.from_poly([int(x) for x in e])


def _guess_p(coeffs: list[int]) -> int:
    from .rings import _prime_of

    return _prime_of(coeffs)


def make_twist(ring: SenRing, k: int, variant: str = "ideal-power") -> SenModule:
    R = ring.ring
    if variant == "ideal-power":
        entry = R(k)
    elif variant == "ideal-over-p-power":
        entry = R.dE * k
    else:
        raise ValueError(f"unknown twist variant {variant!r}")
    return SenModule(ring, [[entry]])


def structure_sheaf(ring: SenRing) -> SenModule:
    return make_twist(ring, 0)


def direct_sum(*mods: SenModule) -> SenModule:
    ring = mods[0].ring
    r = sum(m.rank for m in mods)
    theta = [[ring.ring.zero() for _ in range(r)] for _ in range(r)]
    off = 0
    for m in mods:
        if m.ring != ring:
            raise ValueError("direct sum needs a common ring")
        for i in range(m.rank):
            for j in range(m.rank):
                theta[off + i][off + j] = m.theta[i][j]
        off += m.rank
    return SenModule(ring, theta)


# ---------------------------------------------------------------- Leibniz


@dataclass
class LeibnizReport:
    passed: bool
    trials: int
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"pass": self.passed, "trials": self.trials, "witness": self.witness}


def check_leibniz(M: SenModule, trials: int = 20, seed: int = 0) -> LeibnizReport:
    """Test Theta(a x) = a Theta(x) + Theta(a) x on random scalars and vectors."""
    if M.rank == 0:
        return LeibnizReport(True, 0)
    rng = random.Random(seed)
    R = M.ring.ring
    for t in range(trials):
        a = R.random(rng)
        x = [R.random(rng) for _ in range(M.rank)]
        lhs = M.apply([a * xi for xi in x])
        tx = M.apply(x)
        ta = M.ring.theta(a)
        rhs = [a * yi + ta * xi for yi, xi in zip(tx, x)]
        if any(l != r for l, r in zip(lhs, rhs)):
            return LeibnizReport(
                False,
                t + 1,
                {
                    "a": [str(c) for c in a.c],
                    "x": [[str(c) for c in v.c] for v in x],
                    "lhs": [[str(c) for c in v.c] for v in lhs],
                    "rhs": [[str(c) for c in v.c] for v in rhs],
                },
            )
    return LeibnizReport(True, trials)


# ---------------------------------------------------------------- linear algebra mod p

def matmul_mod(A, B, m: int):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) % m for col in Bt] for row in A]


def _is_zero(A) -> bool:
    return all(not any(row) for row in A)


def multiplication_matrix(M: SenModule, f: Elem) -> list[list[int]]:
    """Matrix of x -> f x on the flattened basis (no Theta involved)."""
    R = M.ring.ring
    d = M.ring.dim
    D = M.dim
    cols = []
    for j in range(M.rank):
        for a in range(d):
            g = R.from_poly([0] * a + [1]) * f
            col = [0] * D
            for t in range(d):
                col[j * d + t] = g.c[t]
            cols.append(col)
    return [[cols[c][r] for c in range(D)] for r in range(D)]


def phi_operator(theta_mod_p, dE_mod_p, p: int):
    """Theta^p - E'^{p-1} Theta over F_p."""
    D = len(theta_mod_p)
    ident = [[int(i == j) for j in range(D)] for i in range(D)]
    tp = ident
    for _ in range(p):
        tp = matmul_mod(tp, theta_mod_p, p)
    ep = ident
    for _ in range(p - 1):
        ep = matmul_mod(ep, dE_mod_p, p)
    second = matmul_mod(ep, theta_mod_p, p)
    return [[(a - b) % p for a, b in zip(r1, r2)] for r1, r2 in zip(tp, second)]


@dataclass
class NilpotenceReport:
    nilpotent: bool
    index: int | None
    dimension: int
    certificate: list[int] | None = None

    @property
    def passed(self) -> bool:
        return self.nilpotent

    def to_json(self) -> dict:
        return {
            "pass": self.nilpotent,
            "nilpotency_index": self.index,
            "dimension": self.dimension,
            "certificate": self.certificate,
        }


def nilpotence_of(Phi, p: int) -> NilpotenceReport:
    D = len(Phi)
    if D == 0:
        return NilpotenceReport(True, 0, 0)
    power = Phi
    for K in range(1, D + 1):
        if _is_zero(power):
            return NilpotenceReport(True, K, D)
        if K < D:
            power = matmul_mod(power, Phi, p)
    # power = Phi^D: its image is the stable image, on which Phi is invertible
    for j in range(D):
        col = [power[i][j] for i in range(D)]
        if any(col):
            image = [sum(Phi[i][k] * col[k] for k in range(D)) % p for i in range(D)]
            assert any(image)
            return NilpotenceReport(False, None, D, col)
    raise AssertionError("unreachable")


def check_nilpotence(M: SenModule) -> NilpotenceReport:
    """Is Theta^p - E'^{p-1} Theta nilpotent on M/p?"""
    p = M.ring.p
    theta = [[x % p for x in row] for row in M.operator]
    dE = [[x % p for x in row] for row in multiplication_matrix(M, M.ring.ring.dE)]
    return nilpotence_of(phi_operator(theta, dE, p), p)


# ---------------------------------------------------------------- Smith normal form


def smith_valuations(A: list[list[int]], p: int, N: int) -> list[int]:
    """Valuations d_i of the Smith form of A over Z/p^N (d_i = N for zero divisors).

    Pivots are chosen by minimal valuation, which is all a local ring needs.
    """
    m = p**N
    A = [[x % m for x in row] for row in A]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    out: list[int] = []
    r0 = 0
    for _ in range(min(rows, cols)):
        best = None
        for i in range(r0, rows):
            for j in range(r0, cols):
                if A[i][j]:
                    v = vp(A[i][j], p, N)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        A[r0], A[i] = A[i], A[r0]
        for row in A:
            row[r0], row[j] = row[j], row[r0]
        unit = A[r0][r0] // p**v
        inv = pow(unit, -1, m)
        A[r0] = [(x * inv) % m for x in A[r0]]
        for i2 in range(r0 + 1, rows):
            f = A[i2][r0] // p**v
            if f:
                A[i2] = [(a - f * b) % m for a, b in zip(A[i2], A[r0])]
        for j2 in range(r0 + 1, cols):
            f = A[r0][j2] // p**v
            if f:
                for row in A:
                    row[j2] = (row[j2] - f * row[r0]) % m
        out.append(v)
        r0 += 1
    out.extend([N] * (min(rows, cols) - len(out)))
    return out


@dataclass
class Cohomology:
    """H0 = ker Theta, H1 = coker Theta, read as Z_p-modules at precision N."""

    N: int
    divisors: list[int]

    @property
    def H0(self) -> list[str]:
        return [f"p^{self.N}" for d in self.divisors if d >= self.N]

    @property
    def H1(self) -> list[str]:
        return [f"p^{d}" for d in self.divisors if d > 0]

    @property
    def h0_rank(self) -> int:
        return sum(1 for d in self.divisors if d >= self.N)

    @property
    def h1_torsion(self) -> list[int]:
        return [d for d in self.divisors if 0 < d < self.N]

    def kernel_order_exponent(self) -> int:
        """log_p of |ker| for the matrix acting on (Z/p^N)^D."""
        return sum(self.divisors)

    def to_json(self) -> dict:
        return {"H0": self.H0, "H1": self.H1, "divisors": self.divisors, "N": self.N}


def sen_cohomology(M: SenModule) -> Cohomology:
    return Cohomology(M.ring.N, smith_valuations(M.operator, M.ring.p, M.ring.N))


# ---------------------------------------------------------------- weights


def _pmod(a, p):
    a = [x % p for x in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _det_poly(A, p):
    """det of a matrix with entries in F_p[x] by cofactor expansion (small sizes)."""
    n = len(A)
    memo = {}

    def rec(row, cols):
        if row == n:
            return [1]
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc: list[int] = []
        sign = 1
        for j in range(n):
            if cols & (1 << j):
                continue
            if A[row][j]:
                sub = rec(row + 1, cols | (1 << j))
                acc = P.add(acc, P.scale(P.mul(A[row][j], sub), sign))
            sign = -sign
        acc = _pmod(acc, p)
        memo[key] = acc
        return acc

    return rec(0, 0)


def charpoly_mod_p(A: list[list[int]], p: int) -> list[int]:
    n = len(A)
    X = [[_pmod(([-A[i][j]] if i != j else [-A[i][j], 1]), p) for j in range(n)] for i in range(n)]
    return _det_poly(X, p)


@dataclass
class WeightsReport:
    split: bool
    weights: list[int]
    charpoly: list[int]
    leftover: list[int]

    def to_json(self) -> dict:
        return {
            "verdict": "split" if self.split else "NonSplit",
            "weights": self.weights,
            "charpoly": self.charpoly,
            "leftover": self.leftover,
        }


def sen_weights(M: SenModule) -> WeightsReport:
    """Eigenvalues of Theta mod (p, u) with multiplicity, or a NonSplit verdict."""
    p = M.ring.p
    A = [[e.c[0] % p for e in row] for row in M.theta]
    cp = charpoly_mod_p(A, p)
    rest = list(cp)
    roots: list[int] = []
    for a in range(p):
        while len(rest) > 1 and P.evaluate(rest, a) % p == 0:
            q, r = P.divmod_monic(rest, [-a % p, 1])
            rest = _pmod(q, p)
            roots.append(a)
    return WeightsReport(len(rest) <= 1, sorted(roots), cp, rest)
