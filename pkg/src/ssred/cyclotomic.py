"""Arithmetic in Z[zeta_m] and the root-of-unity integrality checks.

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(m)-1).  That
basis is a Z-basis of Z[zeta_m], so membership in a scalar ideal nZ[zeta_m]
is plain coordinate divisibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .errors import DomainError
from .linalg import Matrix, Poly, charpoly, is_prime


def r_of(n: int) -> int:
    """Degree over which level-n unramified data forces semistability."""
    if n <= 1:
        raise DomainError(f"R(n) is undefined for n = {n}")
    return {2: 4, 3: 3, 4: 2}.get(n, 1)


def euler_phi(m: int) -> int:
    result, k, p = m, m, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> Poly:
    if m < 1:
        raise DomainError("conductor must be positive")
    p = Poly([-1] + [0] * (m - 1) + [1])
    for d in range(1, m):
        if m % d == 0:
            p, r = divmod(p, cyclotomic_poly(d))
            assert r == Poly()
    return p


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of zeta^k for 0 <= k < m."""
    phi = cyclotomic_poly(m)
    deg = phi.degree
    out = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(m):
        out.append(tuple(cur))
        # multiply by zeta: shift up, then reduce the overflow with phi
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(out)


@dataclass(frozen=True)
class CycloElt:
    m: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != euler_phi(self.m):
            raise ValueError(f"expected {euler_phi(self.m)} coordinates, got {len(self.coords)}")

    @classmethod
    def from_poly(cls, m: int, p: Poly) -> CycloElt:
        if not p.is_integral:
            raise ValueError("Z[zeta] elements need integer coefficients")
        phi = cyclotomic_poly(m)
        r = p % phi
        return cls(m, tuple(r[i] for i in range(phi.degree)))

    @classmethod
    def integer(cls, m: int, a: int) -> CycloElt:
        return cls(m, (a,) + (0,) * (euler_phi(m) - 1))

    @classmethod
    def zeta(cls, m: int, j: int = 1) -> CycloElt:
        return cls(m, _power_table(m)[j % m])

    def poly(self) -> Poly:
        return Poly(self.coords)

    def _check(self, other: CycloElt):
        if self.m != other.m:
            raise ValueError("elements live in different cyclotomic rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = CycloElt.integer(self.m, other)
        self._check(other)
        return CycloElt(self.m, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CycloElt(self.m, tuple(-a for a in self.coords))

    def __sub__(self, other):
        if isinstance(other, int):
            other = CycloElt.integer(self.m, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycloElt(self.m, tuple(a * other for a in self.coords))
        self._check(other)
        phi = cyclotomic_poly(self.m)
        deg = phi.degree
        prod = [0] * (2 * deg - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        prod[i + j] += a * b
        # phi is monic: fold the high coefficients down
        for k in range(len(prod) - 1, deg - 1, -1):
            c = prod[k]
            if c:
                for i in range(deg):
                    prod[k - deg + i] -= c * phi[i]
        return CycloElt(self.m, tuple(prod[:deg]))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = CycloElt.integer(self.m, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def is_one(self) -> bool:
        return self.coords == CycloElt.integer(self.m, 1).coords

    def divide_by_integer(self, q: int) -> CycloElt | None:
        """self / q if it lies in Z[zeta], else None."""
        if any(a % q for a in self.coords):
            return None
        return CycloElt(self.m, tuple(a // q for a in self.coords))

    def norm(self) -> int:
        """Field norm to Q, computed as Res(Phi_m, representative polynomial)."""
        return resultant(cyclotomic_poly(self.m), self.poly())

    def multiplication_matrix(self) -> Matrix:
        cols = [(self * CycloElt.zeta(self.m, k)).coords for k in range(euler_phi(self.m))]
        return Matrix.from_columns(cols)


def resultant(f: Poly, g: Poly) -> int:
    """Resultant of two integer polynomials via the Sylvester determinant."""
    m, n = f.degree, g.degree
    if n < 0 or m < 0:
        return 0
    if m == 0:
        return f[0] ** n
    if n == 0:
        return g[0] ** m
    size = m + n
    rows = []
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        rows.append([0] * i + fc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gc + [0] * (size - n - 1 - i))
    return Matrix(rows, size).det()


def ideal_membership(beta: CycloElt, n: int) -> bool:
    """True iff beta lies in n * Z[zeta_m]."""
    if n < 1:
        raise DomainError("n must be positive")
    return all(a % n == 0 for a in beta.coords)


@lru_cache(maxsize=4096)
def _alpha_minus_one_squared(m: int, j: int) -> CycloElt:
    d = CycloElt.zeta(m, j) - 1
    return d * d


@dataclass(frozen=True)
class QuasiVerdict:
    hypothesis_holds: bool
    conclusion_holds: bool

    @property
    def consistent(self) -> bool:
        return self.conclusion_holds or not self.hypothesis_holds


def check_quasithm(m: int, j: int, n: int) -> QuasiVerdict:
    """For alpha = zeta_m^j: does (alpha-1)^2 in nO force alpha^R(n) = 1?"""
    R = r_of(n)
    hyp = ideal_membership(_alpha_minus_one_squared(m, j % m), n)
    concl = (CycloElt.zeta(m, j) ** R).is_one()
    return QuasiVerdict(hyp, concl)


def exact_order(m: int, j: int) -> int:
    return m // gcd(j % m, m) if j % m else 1


def primroot_unit_check(ell: int, s: int) -> bool:
    """(zeta - 1)^phi(ell^s) / ell is an integral unit, zeta of order ell^s."""
    if not is_prime(ell) or s < 1:
        raise DomainError("need a prime ell and s >= 1")
    m = ell ** s
    u = (CycloElt.zeta(m) - 1) ** euler_phi(m)
    q = u.divide_by_integer(ell)
    if q is None:
        return False
    return abs(q.norm()) == 1


def algprop_check(ell: int, r: int, k: int, mexp: int, j: int) -> bool:
    """(alpha - 1)^k in ell^mexp Z[alpha] for alpha = zeta_{ell^r}^j, given k >= mexp*phi(ell^r)."""
    if not is_prime(ell) or r < 1 or k < 1 or mexp < 1:
        raise DomainError("need prime ell and positive r, k, mexp")
    if k < mexp * euler_phi(ell ** r):
        raise DomainError(f"k = {k} < mexp * phi(ell^r) = {mexp * euler_phi(ell ** r)}")
    N = ell ** r
    c = exact_order(N, j)
    if c == 1:
        return True  # alpha = 1
    # alpha = (zeta_N^{N/c})^{j/(N/c)} is a primitive c-th root; Z[alpha] = Z[zeta_c]
    g = N // c
    alpha = CycloElt.zeta(c, (j % N) // g)
    return ideal_membership((alpha - 1) ** k, ell ** mexp)


@dataclass(frozen=True)
class LocalGlobalVerdict:
    hypotheses: bool
    lambda_charpoly: Poly | None = None
    integral_witness: Poly | None = None

    @property
    def integral(self) -> bool:
        return self.integral_witness is not None and self.integral_witness.is_integral


def localglobal_check(As: list[Matrix], n: int) -> LocalGlobalVerdict:
    """Integer polynomial annihilating every (alpha - 1)/sqrt(n), alpha an eigenvalue.

    With P the characteristic polynomial of (A - 1)^2 / n, the square of
    (alpha - 1)/sqrt(n) is a root of P, so P(x^2) is the witness.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    if not As:
        raise DomainError("need at least one matrix")
    size = As[0].nrows
    if any(not A.is_square or A.nrows != size for A in As):
        raise DomainError("matrices must be square of equal size")
    cps = [charpoly(A) for A in As]
    eye = Matrix.identity(size)
    ok = all(cp == cps[0] and cp.is_integral for cp in cps)
    for A in As:
        N = (A - eye) @ (A - eye)
        ok = ok and N.is_zero_mod(n)
    if not ok:
        return LocalGlobalVerdict(False)
    A = As[0]
    P = charpoly(((A - eye) @ (A - eye)) / n)
    return LocalGlobalVerdict(True, P, P.compose(Poly([0, 0, 1])))
