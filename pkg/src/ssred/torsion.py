"""Level-n torsion modules with an inertia generator and a perfect pairing.

X_n and X_n^* are modelled as (Z/n)^{2d}; the pairing is x, y -> x^T E y
mod n; inertia acts through a single tame generator, given by one matrix
on each side.  Subgroups are stored as the Hermite normal form of their
preimage lattice in Z^{2d} (which always contains n Z^{2d}), so two
subgroups are equal exactly when their stored bases are equal.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

from .errors import DomainError
from .linalg import Matrix, hnf

Side = Literal["X", "Xstar"]


# ---------------------------------------------------------------------------
# Subgroups of (Z/n)^k
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Submodule:
    n: int
    rank: int
    basis: Matrix  # rank x rank upper triangular HNF of the preimage lattice

    @classmethod
    def from_generators(cls, n: int, rank: int, gens: Iterable[Sequence[int]]) -> Submodule:
        rows = [list(g) for g in gens]
        rows += [[n if i == j else 0 for j in range(rank)] for i in range(rank)]
        H, _ = hnf(Matrix(rows, rank), transform=False)
        return cls(n, rank, Matrix(H.rows[:rank], rank))

    @classmethod
    def whole(cls, n: int, rank: int) -> Submodule:
        return cls(n, rank, Matrix.identity(rank))

    @classmethod
    def zero(cls, n: int, rank: int) -> Submodule:
        return cls(n, rank, Matrix.identity(rank) * n)

    def generators(self) -> list[tuple[int, ...]]:
        out = []
        for r in self.basis.rows:
            g = tuple(x % self.n for x in r)
            if any(g):
                out.append(g)
        return out

    @property
    def order(self) -> int:
        return self.n ** self.rank // math.prod(self.basis[i, i] for i in range(self.rank))

    def contains(self, v: Sequence[int]) -> bool:
        r = list(v)
        for i, row in enumerate(self.basis.rows):
            p = row[i]
            if r[i] % p:
                return False
            q = r[i] // p
            if q:
                r = [a - q * b for a, b in zip(r, row)]
        return True

    def __le__(self, other: Submodule) -> bool:
        return all(other.contains(g) for g in self.basis.rows)

    def is_killed_by(self, A: Matrix) -> bool:
        n = self.n
        return all(not any(x % n for x in A.apply(g)) for g in self.generators())

    def image(self, A: Matrix) -> Submodule:
        return Submodule.from_generators(self.n, self.rank, (A.apply(g) for g in self.generators()))

    def elements(self) -> set[tuple[int, ...]]:
        """All members; only for small ambient groups."""
        return {v for v in itertools.product(range(self.n), repeat=self.rank) if self.contains(v)}

    def describe(self) -> dict:
        return {"order": self.order, "generators": [list(g) for g in self.generators()]}


def kernel_mod(A: Matrix, n: int) -> Submodule:
    """{x in (Z/n)^k : A x = 0 mod n} for an r x k integer matrix A."""
    r, k = A.shape
    rows = [list(A.col(i)) + [int(i == j) for j in range(k)] for i in range(k)]
    rows += [[n if i == j else 0 for j in range(r)] + [0] * k for i in range(r)]
    H, _ = hnf(Matrix(rows, r + k), transform=False)
    gens = [row[r:] for row in H.rows if not any(row[:r])]
    return Submodule.from_generators(n, k, gens)


# ---------------------------------------------------------------------------
# Pairing data
# ---------------------------------------------------------------------------

def standard_form(d: int) -> Matrix:
    """Standard symplectic form [[0, I], [-I, 0]] of size 2d."""
    rows = [[0] * (2 * d) for _ in range(2 * d)]
    for i in range(d):
        rows[i][d + i] = 1
        rows[d + i][i] = -1
    return Matrix(rows, 2 * d)


def _unit_mod(a: int, n: int) -> bool:
    return math.gcd(a % n, n) == 1


@dataclass(frozen=True)
class TorsionPairData:
    n: int
    d: int
    gammaX: Matrix
    gammaXstar: Matrix
    E: Matrix

    def __post_init__(self):
        n, k = self.n, 2 * self.d
        if n < 2 or self.d < 1:
            raise DomainError("need n >= 2 and d >= 1")
        for name in ("gammaX", "gammaXstar", "E"):
            M = getattr(self, name)
            if M.shape != (k, k) or not M.is_integral:
                raise DomainError(f"{name} must be an integer {k}x{k} matrix")
            object.__setattr__(self, name, M.mod(n))
        if not _unit_mod(self.E.det(), n):
            raise DomainError("pairing is not perfect: det(E) is not a unit mod n")
        for name in ("gammaX", "gammaXstar"):
            if not _unit_mod(getattr(self, name).det(), n):
                raise DomainError(f"{name} is not invertible mod n")
        if not (self.gammaX.T @ self.E @ self.gammaXstar - self.E).is_zero_mod(n):
            raise DomainError("pairing is not inertia-invariant: gammaX^T E gammaXstar != E mod n")

    @property
    def rank(self) -> int:
        return 2 * self.d

    def gamma(self, side: Side) -> Matrix:
        if side == "X":
            return self.gammaX
        if side == "Xstar":
            return self.gammaXstar
        raise ValueError(f"unknown side {side!r}")

    def power_minus_one(self, side: Side, m: int = 1) -> Matrix:
        g = self.gamma(side)
        return (_pow_mod(g, m, self.n) - Matrix.identity(self.rank)).mod(self.n)


def _pow_mod(A: Matrix, e: int, n: int) -> Matrix:
    result = Matrix.identity(A.nrows)
    base = A.mod(n)
    while e:
        if e & 1:
            result = (result @ base).mod(n)
        e >>= 1
        if e:
            base = (base @ base).mod(n)
    return result


def standard_principal(n: int, d: int, gamma: Matrix) -> TorsionPairData:
    """Principally polarized model: X_n^* = X_n, E the standard symplectic form."""
    J = standard_form(d)
    if gamma.shape != J.shape:
        raise DomainError(f"gamma must be {2 * d}x{2 * d}")
    if not (gamma.T @ J @ gamma - J).is_zero_mod(n):
        raise DomainError("gamma is not symplectic mod n")
    return TorsionPairData(n, d, gamma, gamma, J)


def dual_pair(n: int, d: int, gamma: Matrix, E: Matrix, gammaXstar: Matrix | None = None) -> TorsionPairData:
    """General model; the X^* action defaults to the one making E invariant."""
    if gammaXstar is None:
        try:
            gammaXstar = E.inverse_mod(n) @ gamma.T.inverse_mod(n) @ E
        except ZeroDivisionError as exc:
            raise DomainError(str(exc)) from None
    return TorsionPairData(n, d, gamma, gammaXstar, E)


# ---------------------------------------------------------------------------
# Submodules attached to the action
# ---------------------------------------------------------------------------

def fixed_submodule(P: TorsionPairData, side: Side = "X", m: int = 1) -> Submodule:
    """ker(gamma^m - 1) on the chosen side."""
    return kernel_mod(P.power_minus_one(side, m), P.n)


def moved_submodule(P: TorsionPairData, side: Side = "X", m: int = 1) -> Submodule:
    """(gamma^m - 1) applied to the whole module."""
    A = P.power_minus_one(side, m)
    return Submodule.from_generators(P.n, P.rank, A.columns())


def orthogonal_complement(P: TorsionPairData, S: Submodule, side: Side = "X") -> Submodule:
    """Annihilator of S under the pairing, on the opposite side."""
    if side == "X":
        rows = [(Matrix([g]) @ P.E).rows[0] for g in S.generators()]
    else:
        rows = [P.E.apply(g) for g in S.generators()]
    if not rows:
        return Submodule.whole(P.n, P.rank)
    return kernel_mod(Matrix(rows, P.rank), P.n)


@dataclass(frozen=True)
class Verdict:
    hyp: bool
    concl: bool

    @property
    def consistent(self) -> bool:
        return self.concl or not self.hyp


def ssprelem_check(P: TorsionPairData, S: Submodule, m: int = 1) -> Verdict:
    """Trivial action of gamma^m on S and on its complement vs (gamma^m - 1)^2 = 0."""
    Sperp = orthogonal_complement(P, S, "X")
    hyp = S.is_killed_by(P.power_minus_one("X", m)) and Sperp.is_killed_by(P.power_minus_one("Xstar", m))
    A = P.power_minus_one("X", m)
    concl = (A @ A).is_zero_mod(P.n)
    return Verdict(hyp, concl)


@dataclass(frozen=True)
class Equivalence:
    lhs: bool
    rhs: bool

    @property
    def agree(self) -> bool:
        return self.lhs == self.rhs


def sslem_equivalence(P: TorsionPairData) -> Equivalence:
    """S = X_n^I: trivial action on S^perp versus (gamma - 1)^2 = 0 on X_n."""
    S = fixed_submodule(P, "X")
    lhs = orthogonal_complement(P, S, "X").is_killed_by(P.power_minus_one("Xstar"))
    A = P.power_minus_one("X")
    return Equivalence(lhs, (A @ A).is_zero_mod(P.n))


@dataclass(frozen=True)
class CountingReport:
    values: dict = field(default_factory=dict)
    failures: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures


def counting_identities(P: TorsionPairData) -> CountingReport:
    total = P.n ** P.rank
    S = fixed_submodule(P, "X")
    Sperp = orthogonal_complement(P, S, "X")
    moved = moved_submodule(P, "X")
    fixed_star = fixed_submodule(P, "Xstar")
    moved_star = moved_submodule(P, "Xstar")
    values = {
        "#S": S.order,
        "#S_perp": Sperp.order,
        "#(g-1)X": moved.order,
        "#Xstar^I": fixed_star.order,
        "#(g-1)Xstar": moved_star.order,
        "#X": total,
    }
    checks = {
        "#S*#(g-1)X = #X": S.order * moved.order == total,
        "#S*#S_perp = #X": S.order * Sperp.order == total,
        "#Xstar^I*#(g-1)Xstar = #Xstar": fixed_star.order * moved_star.order == total,
    }
    if sslem_equivalence(P).rhs:
        checks["S_perp = (g-1)Xstar"] = Sperp == moved_star
    values.update(checks)
    return CountingReport(values, tuple(k for k, ok in checks.items() if not ok))


def unipotence_exponent_check(P: TorsionPairData) -> bool:
    """Given (gamma - 1)^2 = 0 on X_n, confirm gamma^n = 1 on X_n."""
    A = P.power_minus_one("X")
    if not (A @ A).is_zero_mod(P.n):
        raise DomainError("(gamma - 1)^2 does not vanish on X_n")
    return (_pow_mod(P.gammaX, P.n, P.n) - Matrix.identity(P.rank)).is_zero_mod(P.n)


# ---------------------------------------------------------------------------
# Group elements
# ---------------------------------------------------------------------------

def sl2_elements(n: int) -> list[Matrix]:
    """All of SL_2(Z/n) = Sp_2(Z/n), by enumeration."""
    out = []
    for a, b, c, e in itertools.product(range(n), repeat=4):
        if (a * e - b * c) % n == 1:
            out.append(Matrix([[a, b], [c, e]]))
    return out


def symplectic_elements(n: int, d: int) -> list[Matrix]:
    """Closure of the elementary symplectic transvections of Sp_{2d}(Z/n)."""
    gens = [_transvection(n, v, 1) for v in _unit_vectors_and_sums(2 * d)]
    seen = {Matrix.identity(2 * d)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for t in gens:
                h = (g @ t).mod(n)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return sorted(seen, key=lambda M: M.rows)


def _unit_vectors_and_sums(k: int) -> list[tuple[int, ...]]:
    vecs = []
    for i in range(k):
        vecs.append(tuple(int(j == i) for j in range(k)))
    for i in range(k):
        for j in range(i + 1, k):
            vecs.append(tuple(int(t in (i, j)) for t in range(k)))
    return vecs


def _transvection(n: int, v: Sequence[int], c: int) -> Matrix:
    """x -> x + c <x, v> v with <x, v> = x^T J v."""
    k = len(v)
    J = standard_form(k // 2)
    Jv = J.apply(v)
    # <x, v> = sum_i x_i (Jv)_i, so the matrix is I + c v (Jv)^T
    return Matrix([[int(i == j) + c * v[i] * Jv[j] for j in range(k)] for i in range(k)], k).mod(n)


def random_symplectic(n: int, d: int, rng: random.Random, steps: int = 24) -> Matrix:
    """Random product of symplectic transvections x -> x + c <x, v> v."""
    k = 2 * d
    g = Matrix.identity(k)
    for _ in range(steps):
        v = [rng.randrange(n) for _ in range(k)]
        if not any(v):
            continue
        g = (g @ _transvection(n, v, rng.randrange(1, n))).mod(n)
    return g


def is_symplectic(g: Matrix, n: int) -> bool:
    J = standard_form(g.nrows // 2)
    return (g.T @ J @ g - J).is_zero_mod(n)


def all_submodules(n: int, k: int) -> list[Submodule]:
    """Every subgroup of (Z/n)^k, grown one generator at a time (small cases only)."""
    vectors = [v for v in itertools.product(range(n), repeat=k) if any(v)]
    zero = Submodule.zero(n, k)
    seen = {zero.basis: zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for S in frontier:
            for v in vectors:
                if S.contains(v):
                    continue
                U = Submodule.from_generators(n, k, S.generators() + [v])
                if U.basis not in seen:
                    seen[U.basis] = U
                    nxt.append(U)
        frontier = nxt
    return sorted(seen.values(), key=lambda S: (S.order, S.basis.rows))
