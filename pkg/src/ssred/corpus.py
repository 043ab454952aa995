"""Seeded random inputs for the property suites."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from .cyclotomic import cyclotomic_poly, r_of
from .linalg import Matrix, Poly, companion
from .saturation import Lattice, OperatorLattice


def case_rng(seed: int, suite: str, index: int) -> random.Random:
    """Independent stream per (seed, suite, case) so sharding never changes a case."""
    return random.Random(f"{seed}/{suite}/{index}")


def random_unimodular(k: int, rng: random.Random, steps: int = 8) -> Matrix:
    rows = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(steps):
        i, j = rng.sample(range(k), 2) if k > 1 else (0, 0)
        if i == j:
            continue
        c = rng.choice((-2, -1, 1, 2))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    if k > 1 and rng.random() < 0.5:
        i, j = rng.sample(range(k), 2)
        rows[i], rows[j] = rows[j], rows[i]
    return Matrix(rows, k)


def random_int_matrix(k: int, rng: random.Random, bound: int = 5) -> Matrix:
    return Matrix([[rng.randint(-bound, bound) for _ in range(k)] for _ in range(k)], k)


@lru_cache(maxsize=None)
def block_polys(order: int, max_degree: int) -> tuple[Poly, ...]:
    """Monic divisors of (x^order - 1)^2 of degree at most ``max_degree``."""
    factors = [cyclotomic_poly(k) for k in range(1, order + 1) if order % k == 0]
    out = []
    for exps in itertools.product(range(3), repeat=len(factors)):
        p = Poly([1])
        for f, e in zip(factors, exps):
            p = p * f ** e
        if 1 <= p.degree <= max_degree:
            out.append(p)
    return tuple(sorted(out, key=lambda p: (p.degree, p.coeffs)))


def random_quasi_unipotent(n: int, d: int, t: int, rng: random.Random) -> Matrix:
    """Block sum of companions with (gamma0^(R^(t+1)) - 1)^2 = 0, rank 2d."""
    order = r_of(n) ** (t + 1)
    k = 2 * d
    while True:
        blocks, room = [], k
        while room:
            choices = block_polys(order, room)
            p = rng.choice(choices)
            blocks.append(companion(p))
            room -= p.degree
        B = Matrix.block_diag(*blocks)
        if d != 1 or B.det() == 1:
            return B


def random_operator_lattice(n: int, d: int, rng: random.Random, t: int | None = None) -> OperatorLattice:
    """Random gamma0-stable lattice T0, conjugated into general position.

    T0 is the Z[gamma0]-span of a few random vectors plus ell^s Z^2d.  For
    d = 1 the operator has determinant 1, as inertia does on a Tate module.
    """
    ell = 2 if n in (2, 4) else 3
    if t is None:
        t = rng.choice((0, 0, 0, 1))
    k = 2 * d
    B = random_quasi_unipotent(n, d, t, rng)
    gens = []
    for _ in range(rng.randint(1, 2)):
        v = Matrix.from_columns([[rng.randint(-4, 4) for _ in range(k)]])
        for _ in range(k):
            gens.append(v)
            v = B @ v
    s = rng.randint(0, 3)
    gens.append(Matrix.identity(k) * ell ** s)
    T0 = Lattice.span(ell, Matrix.hstack(*gens))
    U = random_unimodular(k, rng)
    gamma0 = U @ B @ U.inverse()
    basis = U @ T0.basis
    a = rng.randint(0, 2)
    if a:
        basis = basis / ell ** a
    return OperatorLattice(ell, n, d, t, gamma0, basis)


def random_localglobal(n: int, rng: random.Random, size: int = 2) -> list[Matrix]:
    """A = 1 + N B with n | N^2, plus a few integral conjugates of A."""
    N = next(m for m in range(1, n + 1) if (m * m) % n == 0) * rng.choice((1, 1, 2, 3))
    A = Matrix.identity(size) + random_int_matrix(size, rng, 3) * N
    out = [A]
    for _ in range(rng.randint(0, 2)):
        U = random_unimodular(size, rng)
        out.append(U @ A @ U.inverse())
    return out
