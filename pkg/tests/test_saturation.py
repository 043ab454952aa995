from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ssred.corpus import case_rng, random_operator_lattice
from ssred.errors import DomainError, NotSemistableError
from ssred.linalg import Matrix, Poly, companion
from ssred.saturation import (
    KERNEL_BOUND,
    FiniteQuotient,
    Lattice,
    OperatorLattice,
    build_gamma_lambda,
    efg_equivalences,
    isogeny_quotient,
    minimality_check,
    potgood_mu_quotient,
    saturate,
    saturate_by_iteration,
)

x = Poly.x()


def sharp(n):
    R = {2: 4, 3: 3, 4: 2}[n]
    return OperatorLattice.standard(n, companion((x ** R - 1) ** 2))


# --- lattices --------------------------------------------------------------

def test_lattice_canonical_form():
    a = Lattice.span(2, Matrix([[2, 0], [0, 1]]))
    b = Lattice.span(2, Matrix([[2, 2], [0, 1]]))
    assert a == b
    # prime-to-ell indices are invisible over Z_2
    assert Lattice.span(2, Matrix.diag([3, 5])) == Lattice.span(2, Matrix.identity(2))
    assert Lattice.span(3, Matrix.diag([Fraction(1, 3), 2])) == Lattice.span(3, Matrix.diag([Fraction(1, 3), 1]))


def test_lattice_rejects_bad_input():
    with pytest.raises(DomainError):
        Lattice.span(2, Matrix.diag([Fraction(1, 3), 1]))
    with pytest.raises(DomainError):
        Lattice.span(2, Matrix([[1, 1], [1, 1]]))


def test_lattice_order_and_quotient():
    big = Lattice.span(2, Matrix.identity(2))
    small = Lattice.span(2, Matrix.diag([2, 8]))
    assert small <= big and not big <= small
    q = big.quotient(small)
    assert q.divisors == (2, 8) and q.exponent == 8 and q.order == 16
    assert q.killed_by(8) and not q.killed_by(4)


def test_finite_quotient_induced_action():
    big = Lattice.span(2, Matrix.identity(2))
    small = Lattice.span(2, Matrix.diag([1, 4]))
    q = FiniteQuotient.of(big, small, Matrix([[1, 0], [0, 3]]))
    assert q.divisors == (4,)
    assert q.induced_action == Matrix([[3]])


# --- gamma, lambda ---------------------------------------------------------

def test_build_gamma_lambda_unipotent():
    L = OperatorLattice.standard(2, Matrix([[1, 1], [0, 1]]))
    gamma, lam = build_gamma_lambda(L)
    assert lam.is_integral and (lam @ lam).is_zero()


def test_build_gamma_lambda_rotation_fails():
    L = OperatorLattice.standard(4, Matrix([[0, -1], [1, 0]]))
    with pytest.raises(NotSemistableError, match=r"R\(n\)\^\(t\+1\) = 2"):
        build_gamma_lambda(L)


def test_build_gamma_lambda_companion():
    f = (x ** 2 - 1) ** 2
    L = OperatorLattice.standard(4, companion(f))
    gamma, lam = build_gamma_lambda(L)
    eye = Matrix.identity(4)
    assert ((gamma @ gamma - eye) @ (gamma @ gamma - eye)).is_zero()
    assert lam == ((gamma - eye) @ (gamma - eye)) / 4


def test_build_gamma_lambda_uses_t():
    # order 4 rotation: fails at n = 4, t = 0, passes with t = 1 (gamma = rot^2 = -1)
    rot = Matrix([[0, -1], [1, 0]])
    gamma, lam = build_gamma_lambda(OperatorLattice.standard(4, rot, t=1))
    assert gamma == -Matrix.identity(2)
    assert lam == Matrix.identity(2)


def test_operator_lattice_validation():
    with pytest.raises(DomainError):
        OperatorLattice(2, 6, 1, 0, Matrix.identity(2), Matrix.identity(2))
    with pytest.raises(DomainError):
        OperatorLattice(3, 4, 1, 0, Matrix.identity(2), Matrix.identity(2))
    with pytest.raises(DomainError, match="stabilize"):
        OperatorLattice(2, 2, 1, 0, Matrix([[1, 0], [1, 1]]), Matrix.diag([1, 2]))
    with pytest.raises(DomainError, match="invertible"):
        OperatorLattice(2, 2, 1, 0, Matrix.diag([2, 1]), Matrix.identity(2))


# --- saturation ------------------------------------------------------------

def test_saturate_trivial():
    L = OperatorLattice.standard(3, Matrix([[1, 3], [0, 1]]))
    T, C = saturate(L)
    assert T == L.T0 and C.trivial


@pytest.mark.parametrize("n,divisors", [
    (2, (2, 2, 4, 4, 8, 8)),
    (3, (3, 3, 9, 9)),
    (4, (4, 4)),
])
def test_sharp_kernels(n, divisors):
    # values frozen from the construction; the exponent is the tested claim
    L = sharp(n)
    T, C = saturate(L)
    assert C.divisors == divisors
    assert C.exponent == {2: 8, 3: 9, 4: 4}[n]
    assert saturate_by_iteration(L) == T
    assert all(r.agree for r in efg_equivalences(L, T))
    assert not any(r.lhs for r in efg_equivalences(L, T) if r.name in ("e", "g"))


def test_efg_rows_sharp_n2():
    rows = {r.name: r for r in efg_equivalences(sharp(2))}
    assert set(rows) == {"e", "f"}
    assert (rows["e"].lhs, rows["e"].rhs, rows["f"].lhs, rows["f"].rhs) == (False, False, False, False)


def test_efg_d3n2():
    L = OperatorLattice.standard(2, companion((x ** 3 + x ** 2 + x + 1) ** 2))
    rows = {r.name: r for r in efg_equivalences(L)}
    assert (rows["e"].lhs, rows["e"].rhs) == (False, False)
    assert (rows["f"].lhs, rows["f"].rhs) == (True, True)
    assert saturate(L)[1].exponent == 4


def test_efg_trivial_n3():
    rows = efg_equivalences(OperatorLattice.standard(3, Matrix.identity(2)))
    assert [(r.name, r.lhs, r.rhs) for r in rows] == [("e", True, True)]


def test_minimality_probes():
    L = sharp(3)
    T, _ = saturate(L)
    assert minimality_check(L, T, T)
    _, lam = build_gamma_lambda(L)
    bigger = Lattice.span(3, Matrix.hstack(T.basis, Matrix.identity(6) / 3))
    probe = bigger
    while not probe.is_stable(lam):
        probe = Lattice.span(3, Matrix.hstack(probe.basis, lam @ probe.basis))
    assert minimality_check(L, T, probe)
    with pytest.raises(DomainError):
        minimality_check(L, T, L.T0)


def test_isogeny_quotient_sharp():
    Y = isogeny_quotient(sharp(4))
    assert Y.semistable_on_Yn and Y.within_bound and Y.C.exponent == 4
    assert all(0 <= a < 4 for a in Y.gamma_on_Yn.entries())
    g1 = Y.gamma_on_Yn - Matrix.identity(4)
    assert (g1 @ g1).is_zero_mod(4)


def test_d1_keeps_lattice():
    for n in (2, 3, 4):
        for i in range(30):
            L = random_operator_lattice(n, 1, case_rng(5, "d1", i))
            assert saturate(L)[0] == L.T0


def test_potgood_examples():
    assert potgood_mu_quotient(OperatorLattice.standard(2, Matrix.identity(2))).trivial
    C = potgood_mu_quotient(OperatorLattice.standard(4, Matrix([[0, 1], [1, 0]])))
    assert C.killed_by(2)
    L = OperatorLattice.standard(3, companion(x ** 2 + x + 1))
    assert potgood_mu_quotient(L).trivial
    # mu = 0 here, so T = T0 + mu T0 = T0
    g = companion(x ** 2 + x + 1)
    assert (g @ g + g + Matrix.identity(2)).is_zero()


def test_potgood_rotation_rejected():
    # gamma^2 = -1 is not 1: not potentially good over the quadratic extension
    with pytest.raises(DomainError):
        potgood_mu_quotient(OperatorLattice.standard(4, Matrix([[0, -1], [1, 0]])))


def test_potgood_not_finite_order():
    with pytest.raises(DomainError):
        potgood_mu_quotient(OperatorLattice.standard(2, Matrix([[1, 1], [0, 1]])))


# --- properties on the random corpus ---------------------------------------

@given(st.integers(0, 10 ** 9), st.sampled_from([2, 3, 4]), st.integers(1, 3))
def test_saturation_properties(seed, n, d):
    L = random_operator_lattice(n, d, case_rng(seed, "hyp", 0))
    R = L.R
    gamma, lam = build_gamma_lambda(L)
    T, C = saturate(L)
    T0 = L.T0
    assert T.contains(T0)
    assert T0.contains_vectors(T.basis * n ** (R - 1))
    g1 = gamma - Matrix.identity(L.rank)
    assert T0.contains_vectors((g1 ** (2 * R)) @ T0.basis / n)
    assert T.is_stable(lam)
    assert saturate_by_iteration(L) == T
    assert all(r.agree for r in efg_equivalences(L, T))
    assert C.killed_by(KERNEL_BOUND[n])
    again = OperatorLattice(L.ell, n, d, L.t, L.gamma0, T.basis)
    assert saturate(again)[0] == T
    assert isogeny_quotient(L).semistable_on_Yn
    assert all(dv % L.ell == 0 for dv in C.divisors)


@given(st.integers(0, 10 ** 9))
def test_saturation_basis_independent(seed):
    # the same Z_ell-lattice in a different basis saturates to the same T
    rng = case_rng(seed, "basis", 0)
    L = random_operator_lattice(rng.choice([2, 3, 4]), 2, rng)
    from ssred.corpus import random_unimodular
    V = random_unimodular(4, rng)
    L2 = OperatorLattice(L.ell, L.n, L.d, L.t, L.gamma0, L.basis @ V)
    assert L2.T0 == L.T0
    assert saturate(L2)[0] == saturate(L)[0]
