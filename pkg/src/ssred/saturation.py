"""l-adic lattices with an operator, and their saturation under (gamma-1)^2/n.

A Z_l-lattice of full rank in Q^k is stored through its canonical integral
representative: scale by a power of l until the generators are integral,
take the Z-span, discard the prime-to-l part of the index in Z^k, and take
the row Hermite normal form.  Dividing back by the scale gives a basis that
depends only on the Z_l-lattice, so equal lattices have equal bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import r_of
from .errors import DomainError, NotSemistableError
from .linalg import (
    Matrix,
    ell_part,
    ell_valuation,
    hnf,
    is_ell_power_denominator,
    is_prime,
    smith_form,
    snf,
)

KERNEL_BOUND = {2: 8, 3: 9, 4: 4}
POTGOOD_KERNEL_BOUND = {2: 2, 3: 3, 4: 2}


@dataclass(frozen=True)
class Lattice:
    ell: int
    basis: Matrix  # columns span the lattice

    @classmethod
    def span(cls, ell: int, gens: Matrix) -> Lattice:
        """Z_ell-span of the columns of ``gens`` (must have full row rank)."""
        if not is_ell_power_denominator(gens, ell):
            raise DomainError("generators have denominators prime to ell")
        k = gens.nrows
        D = gens.denominator()
        M = (gens * D).T
        H, _ = hnf(M, transform=False)
        if H.nrows < k or any(H[i, i] == 0 for i in range(k)):
            raise DomainError("generators do not span a full-rank lattice")
        top = Matrix(H.rows[:k], k)
        exponent = snf(top)[-1]
        e = ell_part(exponent, ell)
        H2, _ = hnf(Matrix.vstack(top, Matrix.identity(k) * e), transform=False)
        return cls(ell, Matrix(H2.rows[:k], k).T / D)

    @property
    def rank(self) -> int:
        return self.basis.nrows

    def coordinates(self, vectors: Matrix) -> Matrix:
        return self.basis.solve(vectors)

    def contains_vectors(self, vectors: Matrix) -> bool:
        X = self.coordinates(vectors)
        return all(ell_valuation(x, self.ell) >= 0 for x in X.entries())

    def contains(self, other: Lattice) -> bool:
        return self.contains_vectors(other.basis)

    def __le__(self, other: Lattice) -> bool:
        return other.contains(self)

    def __add__(self, other: Lattice) -> Lattice:
        return Lattice.span(self.ell, Matrix.hstack(self.basis, other.basis))

    def scaled(self, c) -> Lattice:
        return Lattice.span(self.ell, self.basis * Fraction(c))

    def is_stable(self, A: Matrix) -> bool:
        return self.contains_vectors(A @ self.basis)

    def operator_in_basis(self, A: Matrix) -> Matrix:
        """Matrix of A restricted to this lattice, in its basis."""
        return self.coordinates(A @ self.basis)

    def quotient(self, sub: Lattice) -> FiniteQuotient:
        return FiniteQuotient.of(self, sub)


@dataclass(frozen=True)
class FiniteQuotient:
    """Finite group big/small as a product of cyclic l-groups, with an induced operator."""

    divisors: tuple[int, ...]
    exponent: int
    induced_action: Matrix | None = None

    @classmethod
    def of(cls, big: Lattice, small: Lattice, action: Matrix | None = None) -> FiniteQuotient:
        C = big.coordinates(small.basis)
        if not C.is_integral:
            raise DomainError("sublattice is not contained in the lattice")
        D, U, V = smith_form(C)
        divs = [D[i, i] for i in range(D.nrows)]
        keep = [i for i, x in enumerate(divs) if x != 1]
        induced = None
        if action is not None and keep:
            G = big.operator_in_basis(action)
            G2 = U @ G @ U.inverse()
            induced = Matrix([[G2[i, j] % divs[i] for j in keep] for i in keep], len(keep))
        elif action is not None:
            induced = Matrix([], 0)
        return cls(tuple(divs[i] for i in keep), max((divs[i] for i in keep), default=1), induced)

    @property
    def order(self) -> int:
        out = 1
        for d in self.divisors:
            out *= d
        return out

    @property
    def trivial(self) -> bool:
        return not self.divisors

    def killed_by(self, k: int) -> bool:
        return k % self.exponent == 0


@dataclass(frozen=True)
class OperatorLattice:
    ell: int
    n: int
    d: int
    t: int
    gamma0: Matrix
    basis: Matrix

    def __post_init__(self):
        if self.n not in (2, 3, 4):
            raise DomainError("level n must be 2, 3 or 4")
        if not is_prime(self.ell) or self.n % self.ell or ell_part(self.n, self.ell) != self.n:
            raise DomainError("ell must be the prime dividing n")
        if self.t < 0:
            raise DomainError("t must be non-negative")
        k = 2 * self.d
        if self.gamma0.shape != (k, k) or self.basis.shape != (k, k):
            raise DomainError(f"gamma0 and basis must be {k}x{k}")
        if self.basis.det() == 0:
            raise DomainError("basis is singular")
        for name in ("gamma0", "basis"):
            if not is_ell_power_denominator(getattr(self, name), self.ell):
                raise DomainError(f"{name} has denominators prime to ell")
        G = self.basis.solve(self.gamma0 @ self.basis)
        if any(ell_valuation(x, self.ell) < 0 for x in G.entries()):
            raise DomainError("gamma0 does not stabilize the lattice")
        if ell_valuation(G.det(), self.ell) != 0:
            raise DomainError("gamma0 is not invertible on the lattice")

    @classmethod
    def standard(cls, n: int, gamma0: Matrix, t: int = 0) -> OperatorLattice:
        """T_0 = Z^{2d} with the given operator."""
        ell = 2 if n in (2, 4) else 3
        return cls(ell, n, gamma0.nrows // 2, t, gamma0, Matrix.identity(gamma0.nrows))

    @property
    def R(self) -> int:
        return r_of(self.n)

    @property
    def T0(self) -> Lattice:
        return Lattice.span(self.ell, self.basis)

    @property
    def rank(self) -> int:
        return 2 * self.d


def build_gamma_lambda(L: OperatorLattice) -> tuple[Matrix, Matrix]:
    """gamma = gamma0^(R^t) and lambda = (gamma - 1)^2 / n, after checking (gamma^R - 1)^2 = 0."""
    R = L.R
    gamma = L.gamma0 ** (R ** L.t)
    eye = Matrix.identity(L.rank)
    u = gamma ** R - eye
    if not (u @ u).is_zero():
        raise NotSemistableError(f"not semistable over degree R(n)^(t+1) = {R ** (L.t + 1)}")
    g1 = gamma - eye
    return gamma, (g1 @ g1) / L.n


def saturate(L: OperatorLattice) -> tuple[Lattice, FiniteQuotient]:
    """T = T0 + lambda T0 + ... + lambda^(R-1) T0 and C = T / T0."""
    gamma, lam = build_gamma_lambda(L)
    gens = [L.basis]
    for _ in range(L.R - 1):
        gens.append(lam @ gens[-1])
    T = Lattice.span(L.ell, Matrix.hstack(*gens))
    return T, FiniteQuotient.of(T, L.T0, gamma)


def saturate_by_iteration(L: OperatorLattice) -> Lattice:
    """Smallest lambda-stable lattice containing T0, by iterating M -> M + lambda M."""
    _, lam = build_gamma_lambda(L)
    M = L.T0
    while True:
        nxt = Lattice.span(L.ell, Matrix.hstack(M.basis, lam @ M.basis))
        if nxt == M:
            return M
        M = nxt


def minimality_check(L: OperatorLattice, T: Lattice, probe: Lattice) -> bool:
    """T lies in every lambda-stable lattice containing T0; checked against ``probe``."""
    _, lam = build_gamma_lambda(L)
    if not probe.is_stable(lam):
        raise DomainError("probe lattice is not lambda-stable")
    if not probe.contains(L.T0):
        raise DomainError("probe lattice does not contain T0")
    return probe.contains(T)


@dataclass(frozen=True)
class EquivalenceRow:
    name: str
    lhs_statement: str
    lhs: bool
    rhs_statement: str
    rhs: bool

    @property
    def agree(self) -> bool:
        return self.lhs == self.rhs


def efg_equivalences(L: OperatorLattice, T: Lattice | None = None) -> list[EquivalenceRow]:
    """Kernel-exponent tests on T/T0 against powers of (gamma - 1) on T0."""
    gamma, _ = build_gamma_lambda(L)
    if T is None:
        T, _ = saturate(L)
    T0 = L.T0
    g1 = gamma - Matrix.identity(L.rank)

    def kernel_killed_by(k):
        return T0.contains_vectors(T.basis * k)

    def power_divisible(e, k):
        return T0.contains_vectors((g1 ** e) @ T0.basis / k)

    rows = []
    n = L.n
    if n in (2, 3):
        rows.append(EquivalenceRow("e", f"{n}T in T0", kernel_killed_by(n),
                                   f"(g-1)^4 T0 in {n}T0", power_divisible(4, n)))
    if n == 2:
        rows.append(EquivalenceRow("f", "4T in T0", kernel_killed_by(4),
                                   "(g-1)^6 T0 in 2T0", power_divisible(6, 2)))
    if n == 4:
        rows.append(EquivalenceRow("g", "2T in T0", kernel_killed_by(2),
                                   "(g-1)^2 T0 in 2T0", power_divisible(2, 2)))
    return rows


@dataclass(frozen=True)
class IsogenyQuotient:
    n: int
    T: Lattice
    gamma_on_Yn: Matrix  # gamma on T/nT, in the basis of T, entries mod n
    tau_on_Yn: Matrix  # gamma0 on T/nT
    semistable_on_Yn: bool  # (gamma - 1)^2 = 0 on Y_n
    C: FiniteQuotient

    @property
    def within_bound(self) -> bool:
        return self.C.killed_by(KERNEL_BOUND[self.n])


def isogeny_quotient(L: OperatorLattice) -> IsogenyQuotient:
    """Y with T_l(Y) = T: the level-n action on Y_n and the kernel C = T / T0."""
    gamma, _ = build_gamma_lambda(L)
    T, C = saturate(L)
    n = L.n
    G = T.operator_in_basis(gamma)
    tau = T.operator_in_basis(L.gamma0)
    if not (G.is_integral and tau.is_integral):
        raise AssertionError("T is not stable under the inertia operator")
    g1 = G - Matrix.identity(L.rank)
    return IsogenyQuotient(n, T, G.mod(n), tau.mod(n), (g1 @ g1).is_zero_mod(n), C)


def potgood_mu_quotient(L: OperatorLattice) -> FiniteQuotient:
    """Potentially good case gamma^R = 1: T = T0 + mu T0 with mu = lambda + gamma idempotent."""
    gamma, lam = build_gamma_lambda(L)
    n, R = L.n, L.R
    eye = Matrix.identity(L.rank)
    if gamma ** R != eye:
        raise DomainError("gamma^R(n) != 1: not potentially good")
    if n == 2:
        mu = (gamma @ gamma + eye) / 2
    elif n == 3:
        mu = (gamma @ gamma + gamma + eye) / 3
    else:
        mu = (gamma + eye) / 2
    if mu != lam + gamma:
        raise AssertionError("mu differs from lambda + gamma")
    if mu @ mu != mu:
        raise AssertionError("mu is not idempotent")
    T, _ = saturate(L)
    T_mu = Lattice.span(L.ell, Matrix.hstack(L.basis, mu @ L.basis))
    if T_mu != T:
        raise AssertionError("T0 + mu T0 differs from the saturation")
    C = FiniteQuotient.of(T, L.T0, gamma)
    if not C.killed_by(POTGOOD_KERNEL_BOUND[n]):
        raise AssertionError(f"kernel not killed by {POTGOOD_KERNEL_BOUND[n]}")
    return C
