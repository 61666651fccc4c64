"""Theta-stable S[[E/p]]/(E/p)^n-lattices in Sen modules over (S/E^n)[1/p].

Vectors live in E-adic coordinates: the Q_p-basis u^j E^k e_i (j < e, k < n)
of M, flattened as i*(e*n) + k*e + j. In these coordinates the submodule
E^k M is spanned by the coordinates of level >= k, so lifting from a graded
piece is just padding with zeros.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import poly as P
from .errors import NonFreeModule, Unbounded
from .rings import Eisenstein
from .sen import NilpotenceReport, nilpotence_of, phi_operator

INF = 10**9


def fval(q: Fraction, p: int) -> int:
    if q == 0:
        return INF
    v = 0
    a, b = q.numerator, q.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def frac(s) -> Fraction:
    return s if isinstance(s, Fraction) else Fraction(s)


# ---------------------------------------------------------------- lattices


class Lattice:
    """A Z_(p)-lattice given by generators; stored in echelon form."""

    def __init__(self, p: int, dim: int, gens):
        self.p = p
        self.dim = dim
        self.basis, self.pivots = self._echelon([list(map(frac, g)) for g in gens])

    def _echelon(self, cols):
        p = self.p
        basis, pivots = [], []
        cols = [c for c in cols if any(c)]
        for row in range(self.dim):
            cand = [k for k, c in enumerate(cols) if c[row] != 0]
            if not cand:
                continue
            k = min(cand, key=lambda k: fval(cols[k][row], p))
            piv = cols.pop(k)
            scale = Fraction(p) ** fval(piv[row], p) / piv[row]
            piv = [x * scale for x in piv]
            rest = []
            for c in cols:
                if c[row] != 0:
                    f = c[row] / piv[row]
                    c = [a - f * b for a, b in zip(c, piv)]
                if any(c):
                    rest.append(c)
            cols = rest
            basis.append(piv)
            pivots.append(row)
        return basis, pivots

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coords(self, v) -> list[Fraction] | None:
        """Coefficients of v in the basis, or None if v is outside the Q-span."""
        v = list(map(frac, v))
        out = []
        for b, row in zip(self.basis, self.pivots):
            a = v[row] / b[row]
            out.append(a)
            if a:
                v = [x - a * y for x, y in zip(v, b)]
        if any(v):
            return None
        return out

    def contains(self, v) -> bool:
        c = self.coords(v)
        return c is not None and all(fval(a, self.p) >= 0 for a in c)

    def contains_all(self, vs) -> bool:
        return all(self.contains(v) for v in vs)

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice(self.p, self.dim, self.basis + other.basis)

    def scaled(self, a: int) -> "Lattice":
        """p^{-a} times this lattice."""
        f = Fraction(1, self.p**a) if a >= 0 else Fraction(self.p ** (-a))
        return Lattice(self.p, self.dim, [[x * f for x in b] for b in self.basis])

    def matrix_of(self, op) -> list[list[Fraction]]:
        """Matrix of a linear map (given as a function on vectors) in this basis."""
        cols = []
        for b in self.basis:
            c = self.coords(op(b))
            if c is None:
                raise ValueError("image leaves the span of the lattice")
            cols.append(c)
        n = len(cols)
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def _apply(mat, v):
    return [sum(r[k] * v[k] for k in range(len(v)) if v[k]) for r in mat]


# ---------------------------------------------------------------- rational modules


@dataclass
class RationalSenModule:
    """Free (S/E^n)[1/p]-module with rational Theta entries in the u-basis."""

    E: Eisenstein
    n: int
    theta: list[list[list[Fraction]]]

    @property
    def p(self) -> int:
        return self.E.p

    @property
    def rank(self) -> int:
        return len(self.theta)

    @property
    def ring_dim(self) -> int:
        return self.E.e * self.n

    @property
    def dim(self) -> int:
        return self.rank * self.ring_dim

    def to_json(self) -> dict:
        return {
            "ring": {"p": self.p, "E": self.E.to_json(), "n": self.n},
            "rank": self.rank,
            "theta": [[[str(c) for c in e] for e in row] for row in self.theta],
        }

    @classmethod
    def from_json(cls, d: dict) -> "RationalSenModule":
        if d.get("relations"):
            raise NonFreeModule("modules with relations are not supported")
        rd = d["ring"]
        coeffs = [int(x) for x in rd["E"]]
        from .rings import _prime_of

        p = int(rd["p"]) if "p" in rd else _prime_of(coeffs)
        E = Eisenstein(p, tuple(coeffs))
        theta = [[[Fraction(c) for c in e] for e in row] for row in d["theta"]]
        if len(theta) != int(d["rank"]):
            raise ValueError("rank does not match theta")
        return cls(E, int(rd["n"]), theta)


class _Geometry:
    """Coordinate changes and the basic operators for a RationalSenModule."""

    def __init__(self, M: RationalSenModule):
        self.M = M
        self.p = M.p
        self.e = M.E.e
        self.n = M.n
        self.d = M.ring_dim
        self.D = M.dim
        self.mod = P.power(M.E.poly, self.n)
        # columns: u-basis coefficients of u^j E^k, index k*e + j
        self.P = []
        for k in range(self.n):
            Ek = P.power(M.E.poly, k)
            for j in range(self.e):
                f = P.mul([0] * j + [1], Ek)
                self.P.append(f + [0] * (self.d - len(f)))
        self.theta_op = self._theta_matrix()
        self.u_op = self._mult_matrix([0, 1], Fraction(1))
        self.x_op = self._mult_matrix(M.E.poly, Fraction(1, self.p))
        self.dE_op = self._mult_matrix(M.E.dpoly, Fraction(1))

    # u-basis poly (list of Fractions, length d) -> E-adic coordinates
    def to_eadic(self, f) -> list[Fraction]:
        f = [frac(x) for x in f] + [Fraction(0)] * (self.d - len(f))
        out = [Fraction(0)] * self.d
        # P is unitriangular with respect to degree k*e + j
        for idx in range(self.d - 1, -1, -1):
            a = f[idx]
            if a:
                out[idx] = a
                col = self.P[idx]
                f = [x - a * y for x, y in zip(f, col)]
        return out

    def from_eadic(self, v) -> list[Fraction]:
        out = [Fraction(0)] * self.d
        for idx, a in enumerate(v):
            if a:
                out = [x + a * y for x, y in zip(out, self.P[idx])]
        return out

    def reduce(self, f) -> list[Fraction]:
        f = list(f)
        deg = len(self.mod) - 1
        for i in range(len(f) - 1, deg - 1, -1):
            c = f[i]
            if c:
                for j in range(deg + 1):
                    f[i - deg + j] -= c * self.mod[j]
        f = f[:deg] + [Fraction(0)] * max(0, deg - len(f))
        return f

    def _mul_poly(self, a, b):
        return self.reduce(P.mul([frac(x) for x in a], [frac(x) for x in b]) or [Fraction(0)])

    def _theta_ring(self, f):
        return self._mul_poly(P.derivative(list(f)) or [Fraction(0)], self.M.E.poly)

    def _columns_to_matrix(self, cols):
        return [[cols[c][r] for c in range(self.D)] for r in range(self.D)]

    def _theta_matrix(self):
        M = self.M
        cols = []
        for i in range(M.rank):
            for idx in range(self.d):
                f = self.P[idx]
                col = [Fraction(0)] * self.D
                tf = self.to_eadic(self._theta_ring(f))
                for t in range(self.d):
                    col[i * self.d + t] += tf[t]
                for l in range(M.rank):
                    g = self.to_eadic(self._mul_poly(f, M.theta[l][i]))
                    for t in range(self.d):
                        col[l * self.d + t] += g[t]
                cols.append(col)
        return self._columns_to_matrix(cols)

    def _mult_matrix(self, g, scale):
        cols = []
        for i in range(self.M.rank):
            for idx in range(self.d):
                h = self.to_eadic(self._mul_poly(self.P[idx], g))
                col = [Fraction(0)] * self.D
                for t in range(self.d):
                    col[i * self.d + t] = h[t] * scale
                cols.append(col)
        return self._columns_to_matrix(cols)

    def level_indices(self, k):
        e, d = self.e, self.d
        return [i * d + k * e + j for i in range(self.M.rank) for j in range(e)]

    def theta(self, v):
        return _apply(self.theta_op, v)

    def u(self, v):
        return _apply(self.u_op, v)

    def x(self, v):
        return _apply(self.x_op, v)


# ---------------------------------------------------------------- the algorithm


@dataclass
class StableLattice:
    p: int
    E: Eisenstein
    n: int
    rank: int
    basis: list[list[Fraction]]  # E-adic coordinates
    basis_u: list[list[Fraction]]  # u-basis coordinates, module-flattened
    theta: list[list[Fraction]]  # Theta in the lattice basis
    unchanged: bool
    min_theta_valuation: int
    full_rank: bool
    stable: bool
    nilpotence: NilpotenceReport

    @property
    def passed(self) -> bool:
        return self.stable and self.full_rank and self.min_theta_valuation >= 0

    def to_json(self) -> dict:
        def enc(rows):
            return [[str(x) for x in r] for r in rows]

        return {
            "p": self.p,
            "E": self.E.to_json(),
            "n": self.n,
            "rank": self.rank,
            "basis_eadic": enc(self.basis),
            "basis_u": enc(self.basis_u),
            "theta": enc(self.theta),
            "unchanged": self.unchanged,
            "min_theta_valuation": self.min_theta_valuation,
            "full_rank": self.full_rank,
            "stable": self.stable,
            "nilpotence": self.nilpotence.to_json(),
            "pass": self.passed,
        }


def _t_span(G: _Geometry, vecs) -> Lattice:
    gens = []
    for v in vecs:
        xv = v
        for _ in range(G.n):
            uv = xv
            for _ in range(G.e):
                gens.append(uv)
                uv = G.u(uv)
            xv = G.x(xv)
    return Lattice(G.p, G.D, gens)


def _is_stable(G: _Geometry, L: Lattice) -> bool:
    return all(L.contains(G.theta(b)) and L.contains(G.u(b)) and L.contains(G.x(b)) for b in L.basis)


def _graded_lattice(G: _Geometry, k: int, max_iter: int) -> Lattice:
    """Saturate the unit lattice of the graded piece E^k M / E^{k+1} M under Theta."""
    idx = G.level_indices(k)
    keep = set(idx)

    def unit(i):
        v = [Fraction(0)] * G.D
        v[i] = Fraction(1)
        return v

    def trunc(v):
        return [a if i in keep else Fraction(0) for i, a in enumerate(v)]

    L = Lattice(G.p, G.D, [unit(i) for i in idx])
    for _ in range(max_iter):
        images = [trunc(G.theta(b)) for b in L.basis]
        if L.contains_all(images):
            return L
        L = Lattice(G.p, G.D, L.basis + images)
    raise Unbounded(f"Theta has unbounded denominators on the graded piece of level {k}")


def _lattice_from(G: _Geometry, k: int, max_iter: int) -> Lattice:
    """A Theta- and T-stable lattice inside E^k M."""
    M2 = _graded_lattice(G, k, max_iter)
    if k == G.n - 1:
        return M2
    M1 = _lattice_from(G, k + 1, max_iter)
    keep = set(G.level_indices(k))
    lifts = M2.basis  # graded coordinates already are canonical lifts
    Mp = _t_span(G, lifts)
    corrections = []
    for ell in lifts:
        th = G.theta(ell)
        bar = [a if i in keep else Fraction(0) for i, a in enumerate(th)]
        alpha = M2.coords(bar)
        if alpha is None or any(fval(a, G.p) < 0 for a in alpha):
            raise Unbounded("graded lattice is not Theta-stable")
        d = [Fraction(0)] * G.D
        for a, b in zip(alpha, lifts):
            if a:
                d = [x + a * y for x, y in zip(d, b)]
        corrections.append([x - y for x, y in zip(th, d)])
    need = 0
    for c in corrections:
        co = M1.coords(c)
        if co is None:
            raise AssertionError("correction term left E^{k+1} M")
        need = max([need] + [-fval(a, G.p) for a in co if a])
    if need > 0:
        M1 = M1.scaled(need)
    return M1 + Mp


def construct_stable_lattice(M: RationalSenModule, max_iter: int | None = None) -> StableLattice:
    G = _Geometry(M)
    max_iter = max_iter or (G.D + 2)
    p = G.p

    def unit(i):
        v = [Fraction(0)] * G.D
        v[i] = Fraction(1)
        return v

    start = _t_span(G, [unit(i * G.d) for i in range(M.rank)])
    if _is_stable(G, start):
        L, unchanged = start, True
    else:
        L, unchanged = _lattice_from(G, 0, max_iter), False
    stable = _is_stable(G, L)
    theta = L.matrix_of(G.theta)
    minval = min((fval(x, p) for row in theta for x in row), default=INF)
    theta_p = [[_mod_p(x, p) for x in row] for row in theta]
    dE = L.matrix_of(lambda v: _apply(G.dE_op, v))
    dE_p = [[_mod_p(x, p) for x in row] for row in dE]
    nil = nilpotence_of(phi_operator(theta_p, dE_p, p), p) if minval >= 0 else NilpotenceReport(False, None, G.D)
    basis_u = []
    for b in L.basis:
        row = []
        for i in range(M.rank):
            row.extend(G.from_eadic(b[i * G.d : (i + 1) * G.d]))
        basis_u.append(row)
    return StableLattice(
        p=p,
        E=M.E,
        n=M.n,
        rank=M.rank,
        basis=L.basis,
        basis_u=basis_u,
        theta=theta,
        unchanged=unchanged,
        min_theta_valuation=minval,
        full_rank=L.rank == G.D,
        stable=stable,
        nilpotence=nil,
    )


def _mod_p(x: Fraction, p: int) -> int:
    if fval(x, p) < 0:
        raise ValueError("entry is not p-integral")
    return (x.numerator * pow(x.denominator, -1, p)) % p


# ---------------------------------------------------------------- inputs


def _poly_frac(f, d):
    f = [Fraction(x) for x in f]
    return f + [Fraction(0)] * (d - len(f))


def conjugate(M: RationalSenModule, g, ginv) -> RationalSenModule:
    """Theta in the basis e'_j = sum_i g_ij e_i: g^{-1} (Theta g + Theta_ring(g))."""
    G = _Geometry(M)
    r = M.rank

    def mm(A, B):
        return [
            [
                _sum_polys([G._mul_poly(A[i][k], B[k][j]) for k in range(r)], G.d)
                for j in range(r)
            ]
            for i in range(r)
        ]

    tg = mm(M.theta, g)
    dg = [[G._theta_ring(g[i][j]) for j in range(r)] for i in range(r)]
    inner = [[[a + b for a, b in zip(tg[i][j], dg[i][j])] for j in range(r)] for i in range(r)]
    new = mm(ginv, inner)
    return RationalSenModule(M.E, M.n, new)


def _sum_polys(ps, d):
    out = [Fraction(0)] * d
    for q in ps:
        out = [a + b for a, b in zip(out, q)]
    return out


def random_rational_module(
    E: Eisenstein, n: int, rank: int, rng: random.Random, max_shift: int = 2
) -> tuple[RationalSenModule, RationalSenModule]:
    """An integral upper-triangular twist module and a conjugate with denominators.

    Returns (integral, conjugated). The conjugating matrix is D(I + U)(I + W)
    with D diagonal in powers of p, U strictly upper triangular and W a
    multiple of p^{-s} E, so both unipotent factors invert by finite series.
    """
    p = E.p
    d = E.e * n
    G = _Geometry(RationalSenModule(E, n, [[[Fraction(0)] * d]]))

    def rand_poly(lo=-p, hi=p):
        return [Fraction(rng.randint(lo, hi)) for _ in range(d)]

    theta0 = []
    for i in range(rank):
        row = []
        for j in range(rank):
            if i == j:
                k = rng.randint(-2, 3)
                row.append(_poly_frac(P.scale(E.dpoly, k), d))
            elif i < j:
                row.append(rand_poly())
            else:
                row.append([Fraction(0)] * d)
        theta0.append(row)
    base = RationalSenModule(E, n, theta0)

    shifts = [rng.randint(0, max_shift) for _ in range(rank)]
    s_e = rng.randint(1, max_shift)
    zero = [Fraction(0)] * d
    one = _poly_frac([1], d)

    def mm(A, B):
        return [
            [_sum_polys([G._mul_poly(A[i][k], B[k][j]) for k in range(rank)], d) for j in range(rank)]
            for i in range(rank)
        ]

    def ident():
        return [[one if i == j else zero for j in range(rank)] for i in range(rank)]

    def inverse_unipotent(N):
        # (I + N)^{-1} for nilpotent N
        inv, term = ident(), ident()
        negN = [[[-x for x in N[i][j]] for j in range(rank)] for i in range(rank)]
        for _ in range(rank * n + 1):
            term = mm(term, negN)
            inv = [[_add(inv[i][j], term[i][j]) for j in range(rank)] for i in range(rank)]
        return inv

    # strictly upper triangular U, and p^{-s} E W with W arbitrary (E is nilpotent)
    U = [[rand_poly() if i < j else zero for j in range(rank)] for i in range(rank)]
    Ef = [Fraction(c, p**s_e) for c in E.poly]
    W = [[G._mul_poly(Ef, rand_poly()) for j in range(rank)] for i in range(rank)]
    Dm = [[_poly_frac([Fraction(1, p ** shifts[i])], d) if i == j else zero for j in range(rank)] for i in range(rank)]
    Dinv = [[_poly_frac([p ** shifts[i]], d) if i == j else zero for j in range(rank)] for i in range(rank)]
    IU = [[_add(one if i == j else zero, U[i][j]) for j in range(rank)] for i in range(rank)]
    IW = [[_add(one if i == j else zero, W[i][j]) for j in range(rank)] for i in range(rank)]
    g = mm(mm(Dm, IU), IW)
    ginv = mm(mm(inverse_unipotent(W), inverse_unipotent(U)), Dinv)
    assert mm(g, ginv) == ident()
    return base, conjugate(base, g, ginv)


def _add(a, b):
    return [x + y for x, y in zip(a, b)]


def rank_one_example(E: Eisenstein, k: int, s: int) -> RationalSenModule:
    """n = 2, Theta(e) = (k + p^{-s} E) e."""
    d = 2 * E.e
    entry = [Fraction(k)] + [Fraction(0)] * (d - 1)
    entry = [a + Fraction(b, E.p**s) for a, b in zip(entry, _poly_frac(E.poly, d))]
    return RationalSenModule(E, 2, [[entry]])
