"""Exact dense linear algebra over Z and Q.

Matrices hold Python ints wherever an entry is integral and
:class:`fractions.Fraction` otherwise, so integer matrices never pay for
rational arithmetic.  Everything here is immutable and exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


def _norm(x) -> Scalar:
    if type(x) is int:
        return x
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, float):
        raise TypeError("floating point entries are not allowed")
    return _norm(Fraction(x))


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class Matrix:
    """Immutable dense matrix with exact integer or rational entries."""

    __slots__ = ("rows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(_norm(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        self.rows = rows
        self.ncols = ncols
        self._hash = None

    @classmethod
    def _trusted(cls, rows: tuple, ncols: int) -> Matrix:
        """Wrap rows already normalized to tuples of int/Fraction; skips all checks."""
        M = cls.__new__(cls)
        M.rows = rows
        M.ncols = ncols
        M._hash = None
        return M

    # construction

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int | None = None) -> Matrix:
        n = m if n is None else n
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def diag(cls, entries: Sequence) -> Matrix:
        k = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(k)] for i in range(k)], k)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> Matrix:
        if not cols:
            raise ValueError("need at least one column")
        return cls(list(zip(*cols)), len(cols))

    @classmethod
    def block_diag(cls, *blocks: Matrix) -> Matrix:
        size = sum(b.nrows for b in blocks)
        width = sum(b.ncols for b in blocks)
        out = [[0] * width for _ in range(size)]
        r = c = 0
        for b in blocks:
            for i, row in enumerate(b.rows):
                out[r + i][c:c + b.ncols] = row
            r += b.nrows
            c += b.ncols
        return cls(out, width)

    @classmethod
    def hstack(cls, *mats: Matrix) -> Matrix:
        return cls([sum((m.rows[i] for m in mats), ()) for i in range(mats[0].nrows)])

    @classmethod
    def vstack(cls, *mats: Matrix) -> Matrix:
        return cls([r for m in mats for r in m.rows], mats[0].ncols)

    # basic protocol

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @property
    def is_square(self) -> bool:
        return len(self.rows) == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        if not self.rows:
            return [() for _ in range(self.ncols)]
        return list(zip(*self.rows))

    def entries(self):
        for r in self.rows:
            yield from r

    def __eq__(self, other):
        if isinstance(other, Matrix):
            return self.ncols == other.ncols and self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ncols, self.rows))
        return self._hash

    def __repr__(self):
        return f"Matrix({self.tolist()!r})"

    def tolist(self) -> list[list]:
        return [[x if isinstance(x, int) else str(x) for x in r] for r in self.rows]

    # arithmetic

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> Matrix:
        return Matrix([[-a for a in r] for r in self.rows], self.ncols)

    def __mul__(self, c) -> Matrix:
        if isinstance(c, Matrix):
            return self @ c
        c = _norm(c)
        return Matrix([[a * c for a in r] for r in self.rows], self.ncols)

    __rmul__ = __mul__

    def __truediv__(self, c) -> Matrix:
        c = Fraction(c)
        return Matrix([[Fraction(a) / c for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        if self.is_integral and other.is_integral:
            return Matrix._trusted(
                tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows),
                other.ncols,
            )
        return Matrix(
            [[sum(a * b for a, b in zip(r, c) if a and b) for c in cols] for r in self.rows],
            other.ncols,
        )

    def __pow__(self, e: int) -> Matrix:
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        if e < 0:
            return self.inverse() ** (-e)
        result = Matrix.identity(self.nrows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    def apply(self, v: Sequence) -> tuple:
        return tuple(_norm(sum(a * b for a, b in zip(r, v))) for r in self.rows)

    @property
    def T(self) -> Matrix:
        return Matrix(list(zip(*self.rows)) if self.rows else [], self.nrows)

    def trace(self):
        return _norm(sum(self.rows[i][i] for i in range(self.nrows)))

    def is_zero(self) -> bool:
        return not any(self.entries())

    @property
    def is_integral(self) -> bool:
        return all(type(x) is int for r in self.rows for x in r)

    def denominator(self) -> int:
        return reduce(_lcm, (Fraction(x).denominator for x in self.entries()), 1)

    def content(self) -> int:
        """gcd of the entries of an integer matrix."""
        return reduce(math.gcd, self.entries(), 0)

    def mod(self, n: int) -> Matrix:
        if not self.is_integral:
            raise ValueError("reduction mod n needs an integer matrix")
        return Matrix._trusted(tuple(tuple(a % n for a in r) for r in self.rows), self.ncols)

    def is_zero_mod(self, n: int) -> bool:
        return self.is_integral and all(a % n == 0 for a in self.entries())

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    # determinants and inverses

    def det(self) -> Scalar:
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        if self.is_integral:
            return _bareiss_det([list(r) for r in self.rows])
        d = self.denominator()
        return _norm(Fraction(_bareiss_det([[int(a * d) for a in r] for r in self.rows]), d ** self.nrows))

    def rank(self) -> int:
        return len(_rref([[Fraction(a) for a in r] for r in self.rows])[1])

    def inverse(self) -> Matrix:
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        aug = [[Fraction(a) for a in r] + [Fraction(int(i == j)) for j in range(n)]
               for i, r in enumerate(self.rows)]
        red, pivots = _rref(aug, ncols=n)
        if len(pivots) < n:
            raise ZeroDivisionError("matrix is singular")
        return Matrix([r[n:] for r in red], n)

    def solve(self, rhs: Matrix) -> Matrix:
        """Return X with self @ X == rhs for square nonsingular self."""
        return self.inverse() @ rhs

    def inverse_mod(self, n: int) -> Matrix:
        """Inverse over Z/nZ of an integer matrix whose determinant is a unit mod n."""
        d = self.det()
        if math.gcd(d % n, n) != 1:
            raise ZeroDivisionError("matrix is not invertible mod n")
        return (adjugate(self) * pow(d, -1, n)).mod(n)


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _rref(a: list[list[Fraction]], ncols: int | None = None):
    """Row-reduce ``a`` in place over Q, pivoting only among the first ``ncols`` columns."""
    m = len(a)
    ncols = len(a[0]) if ncols is None and a else (ncols or 0)
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def adjugate(M: Matrix) -> Matrix:
    n = M.nrows
    if n == 1:
        return Matrix([[1]])
    cof = [[(-1) ** (i + j) * M.submatrix([r for r in range(n) if r != i],
                                          [c for c in range(n) if c != j]).det()
            for j in range(n)] for i in range(n)]
    return Matrix(cof).T


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------

def hnf(M: Matrix, transform: bool = True) -> tuple[Matrix, Matrix | None]:
    """Row Hermite normal form of an integer matrix.

    Returns ``(H, U)`` with ``H == U @ M``, ``U`` unimodular, ``H`` upper
    echelon with positive pivots and entries above each pivot reduced into
    ``[0, pivot)``.  Zero rows are collected at the bottom.  With
    ``transform=False`` the second item is None and U is never built.
    """
    if not M.is_integral:
        raise ValueError("hnf needs an integer matrix")
    A = [list(r) for r in M.rows]
    m, n = M.nrows, M.ncols
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transform else [[]] * m

    def sub(i, k, q):
        # row_i -= q * row_k
        A[i] = [x - q * y for x, y in zip(A[i], A[k])]
        if transform:
            U[i] = [x - q * y for x, y in zip(U[i], U[k])]

    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            U[r], U[p] = U[p], U[r]
            clean = True
            for i in range(r + 1, m):
                if A[i][c]:
                    sub(i, r, A[i][c] // A[r][c])
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            if A[i][c]:
                sub(i, r, A[i][c] // A[r][c])
        r += 1
    H = Matrix._trusted(tuple(map(tuple, A)), n)
    return H, (Matrix._trusted(tuple(map(tuple, U)), m) if transform else None)


def is_hnf(H: Matrix) -> bool:
    last = -1
    seen_zero = False
    for i, row in enumerate(H.rows):
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            seen_zero = True
            continue
        if seen_zero or piv <= last or row[piv] <= 0:
            return False
        if any(not 0 <= H.rows[k][piv] < row[piv] for k in range(i)):
            return False
        last = piv
    return True


def smith_form(M: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(D, U, V)`` with ``D == U @ M @ V`` diagonal and d1 | d2 | ...

    ``U`` and ``V`` are unimodular; diagonal entries are non-negative.
    """
    if not M.is_integral:
        raise ValueError("smith_form needs an integer matrix")
    A = [list(r) for r in M.rows]
    m, n = M.nrows, M.ncols
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def row_sub(i, k, q):
        A[i] = [x - q * y for x, y in zip(A[i], A[k])]
        U[i] = [x - q * y for x, y in zip(U[i], U[k])]

    def col_sub(j, k, q):
        for row in A:
            row[j] -= q * row[k]
        for row in V:
            row[j] -= q * row[k]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return Matrix(A, n), Matrix(U, m), Matrix(V, n)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_sub(i, t, A[i][t] // p)
                    dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    col_sub(j, t, A[t][j] // p)
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            # fold the offending row in so the next pass sees a smaller remainder
            row_sub(t, bad[0], -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return Matrix(A, n), Matrix(U, m), Matrix(V, n)


def snf(M: Matrix) -> list[int]:
    """Nonzero elementary divisors d1 | d2 | ... | dr of an integer matrix (r = rank)."""
    D, _, _ = smith_form(M)
    return [D[i, i] for i in range(min(D.shape)) if D[i, i]]


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Univariate polynomial with exact coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_norm(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def x(cls) -> Poly:
        return cls((0, 1))

    @classmethod
    def const(cls, a) -> Poly:
        return cls((a,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def is_monic(self) -> bool:
        return self.lead == 1

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other) -> Poly:
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> Poly:
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> Poly:
        return _as_poly(other) - self

    def __mul__(self, other) -> Poly:
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        result = Poly((1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            base = base * base
        return result

    def __divmod__(self, other) -> tuple[Poly, Poly]:
        other = _as_poly(other)
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        q = [0] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if not c:
                continue
            f = c if lead == 1 else Fraction(c) / lead
            q[k - dq] = f
            for i, b in enumerate(other.coeffs):
                rem[k - dq + i] -= f * b
        return Poly(q), Poly(rem[:dq] if dq > 0 else [])

    def __mod__(self, other) -> Poly:
        return divmod(self, other)[1]

    def __floordiv__(self, other) -> Poly:
        return divmod(self, other)[0]

    def __call__(self, x):
        if isinstance(x, Matrix):
            n = x.nrows
            acc = Matrix.zeros(n)
            eye = Matrix.identity(n)
            for c in reversed(self.coeffs):
                acc = acc @ x + eye * c
            return acc
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other: Poly) -> Poly:
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def monic(self) -> Poly:
        if self.lead == 1:
            return self
        return Poly(Fraction(c) / self.lead for c in self.coeffs)

    def mod(self, p: int) -> Poly:
        return Poly(c % p for c in self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            body = str(a) if (a != 1 or i == 0) else ""
            if body and mono:
                body += "*"
            parts.append((sign, body + mono))
        s = "".join(f" {sg} {t}" for sg, t in parts).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _as_poly(p) -> Poly:
    return p if isinstance(p, Poly) else Poly((p,))


def companion(p: Poly) -> Matrix:
    """Matrix of multiplication by x on Z[x]/(p) in the basis 1, x, ..., x^{k-1}."""
    if not p.is_monic:
        raise ValueError("companion matrix needs a monic polynomial")
    k = p.degree
    rows = [[0] * k for _ in range(k)]
    for i in range(1, k):
        rows[i][i - 1] = 1
    for i in range(k):
        rows[i][k - 1] = -p[i]
    return Matrix(rows, k)


def charpoly(M: Matrix) -> Poly:
    """Characteristic polynomial det(x - M) by Faddeev-LeVerrier."""
    if not M.is_square:
        raise ValueError("charpoly of a non-square matrix")
    n = M.nrows
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    eye = Matrix.identity(n)
    Mk = Matrix.zeros(n)
    for k in range(1, n + 1):
        Mk = M @ Mk + eye * coeffs[n - k + 1]
        tr = (M @ Mk).trace()
        if isinstance(tr, int) and tr % k == 0:
            coeffs[n - k] = -(tr // k)
        else:
            coeffs[n - k] = -Fraction(tr) / k
    return Poly(coeffs)


def minpoly(M: Matrix, modulus: int | None = None) -> Poly:
    """Minimal polynomial of a square matrix over Q, or over F_p when ``modulus=p``.

    Found as the first linear dependency among I, M, M^2, ... (Krylov on the
    flattened powers).  Over F_p the coefficients are returned in [0, p).
    """
    if not M.is_square:
        raise ValueError("minpoly of a non-square matrix")
    n = M.nrows
    p = modulus
    if p is not None:
        M = M.mod(p)

    def red(x):
        return x % p if p is not None else x

    def inv(x):
        return pow(x, -1, p) if p is not None else 1 / Fraction(x)

    # echelon rows: (pivot column, vector, combination of powers)
    basis: list[tuple[int, list, list]] = []
    power = Matrix.identity(n)
    for k in range(n + 1):
        vec = [red(x) for x in power.entries()]
        comb = [0] * (n + 1)
        comb[k] = 1
        for piv, bvec, bcomb in basis:
            f = vec[piv]
            if f:
                vec = [red(a - f * b) for a, b in zip(vec, bvec)]
                comb = [red(a - f * b) for a, b in zip(comb, bcomb)]
        piv = next((i for i, x in enumerate(vec) if x), None)
        if piv is None:
            # comb is a relation with leading power k and coefficient 1
            return Poly(comb[:k + 1])
        f = inv(vec[piv])
        basis.append((piv, [red(a * f) for a in vec], [red(a * f) for a in comb]))
        power = power @ M
        if p is not None:
            power = power.mod(p)
    raise AssertionError("Cayley-Hamilton violated")  # pragma: no cover


# ---------------------------------------------------------------------------
# l-adic bookkeeping
# ---------------------------------------------------------------------------

def ell_valuation(q, ell: int) -> float | int:
    """Exact ell-adic valuation of a rational; ``math.inf`` for zero."""
    q = Fraction(q)
    if q == 0:
        return math.inf
    v = 0
    num, den = q.numerator, q.denominator
    while num % ell == 0:
        num //= ell
        v += 1
    while den % ell == 0:
        den //= ell
        v -= 1
    return v


def ell_part(a: int, ell: int) -> int:
    """Largest power of ell dividing the nonzero integer a."""
    a = abs(a)
    out = 1
    while a % ell == 0:
        a //= ell
        out *= ell
    return out


def is_ell_power_denominator(M: Matrix, ell: int) -> bool:
    d = M.denominator()
    return d == ell_part(d, ell)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))
