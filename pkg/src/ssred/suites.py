"""Property suites behind ``verify-all``.

Every suite is a list of numbered cases; case ``i`` of suite ``s`` draws its
randomness from ``case_rng(seed, s, i)`` only, so the result of a run does
not depend on how cases are spread over worker processes.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from . import __version__
from .corpus import (
    case_rng,
    random_int_matrix,
    random_localglobal,
    random_operator_lattice,
    random_unimodular,
)
from .cyclotomic import (
    algprop_check,
    check_quasithm,
    cyclotomic_poly,
    euler_phi,
    exact_order,
    localglobal_check,
    primroot_unit_check,
    r_of,
)
from .errors import DomainError
from .linalg import (
    Matrix,
    Poly,
    charpoly,
    companion,
    hnf,
    is_hnf,
    is_prime,
    minpoly,
    smith_form,
    snf,
)
from .saturation import (
    KERNEL_BOUND,
    Lattice,
    OperatorLattice,
    build_gamma_lambda,
    efg_equivalences,
    isogeny_quotient,
    potgood_mu_quotient,
    saturate,
    saturate_by_iteration,
)
from .scenarios import (
    EXAMPLE_IDS,
    all_sl2_pairs,
    elliptic_degree_decision,
    ellcor_kernel_bound,
    padd_decision,
    run_example,
)
from .torsion import (
    Submodule,
    all_submodules,
    counting_identities,
    dual_pair,
    fixed_submodule,
    orthogonal_complement,
    random_symplectic,
    sl2_elements,
    sslem_equivalence,
    ssprelem_check,
    standard_form,
    standard_principal,
    symplectic_elements,
    unipotence_exponent_check,
)

DEFAULT_SEED = 42


@dataclass
class Tally:
    checks: int = 0
    failures: list = field(default_factory=list)

    def check(self, ok: bool, label: str):
        self.checks += 1
        if not ok:
            self.failures.append(label)


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------

def _linalg_case(seed: int, i: int, t: Tally):
    rng = case_rng(seed, "linalg", i)
    k = rng.randint(1, 6)
    M = random_int_matrix(k, rng, rng.choice((2, 5, 20)))
    cp = charpoly(M)
    t.check(cp(M).is_zero(), "cayley-hamilton")
    # independent route: charpoly(c) = det(c I - M) by fraction-free elimination
    for c in (-2, 0, 3):
        t.check(cp(c) == (Matrix.identity(k) * c - M).det(), f"charpoly at {c}")
    mp = minpoly(M)
    t.check(mp(M).is_zero(), "minpoly annihilates")
    t.check((cp % mp) == Poly(), "minpoly divides charpoly")
    H, U = hnf(M)
    t.check(U @ M == H and abs(U.det()) == 1, "hnf transform")
    t.check(is_hnf(H), "hnf shape")
    t.check(hnf(H)[0] == H, "hnf idempotent")
    if M.det() != 0:
        t.check(abs(H.det()) == abs(M.det()), "hnf |det|")
    D, U2, V2 = smith_form(M)
    t.check(U2 @ M @ V2 == D and abs(U2.det()) == 1 and abs(V2.det()) == 1, "smith transform")
    divs = snf(M)
    t.check(all(divs[j + 1] % divs[j] == 0 for j in range(len(divs) - 1)), "snf chain")
    t.check(len(divs) == M.rank(), "snf length = rank")


# ---------------------------------------------------------------------------
# cyclotomic integrality
# ---------------------------------------------------------------------------

def _rtable_case(seed: int, i: int, t: Tally):
    expected = {2: 4, 3: 3, 4: 2}
    for n in range(2, 50):
        t.check(r_of(n) == expected.get(n, 1), f"R({n})")
    # an alpha of exact order R(n) passing the hypothesis, so R(n) is needed
    for n, m in ((2, 4), (3, 3), (4, 2)):
        j = 1
        v = check_quasithm(m, j, n)
        t.check(v.hypothesis_holds and exact_order(m, j) == r_of(n), f"sharpness n={n}")


_QUASI_GRID = [(n, m) for n in range(2, 13) for m in range(1, 61)]


def _quasithm_case(seed: int, i: int, t: Tally):
    n, m = _QUASI_GRID[i]
    for j in range(m):
        t.check(check_quasithm(m, j, n).consistent, f"quasithm n={n} m={m} j={j}")


_PRIMROOT = [(ell, s) for ell in range(2, 65) if is_prime(ell) for s in range(1, 7) if ell ** s <= 64]


def _primroot_case(seed: int, i: int, t: Tally):
    ell, s = _PRIMROOT[i]
    t.check(primroot_unit_check(ell, s), f"primroot {ell}^{s}")


def _algprop_grid():
    out = []
    for ell in (2, 3, 5, 7, 11, 13, 17, 19, 23):
        for r in range(1, 6):
            if ell ** r > 27:
                break
            phi = euler_phi(ell ** r)
            for mexp in range(1, 13):
                for k in range(mexp * phi, 13):
                    out.append((ell, r, k, mexp))
    return out


_ALGPROP = _algprop_grid()


def _algprop_case(seed: int, i: int, t: Tally):
    ell, r, k, mexp = _ALGPROP[i]
    for j in range(ell ** r):
        t.check(algprop_check(ell, r, k, mexp, j), f"algprop {ell},{r},{k},{mexp},{j}")


def _localglobal_case(seed: int, i: int, t: Tally):
    rng = case_rng(seed, "localglobal", i)
    n = rng.randint(2, 12)
    As = random_localglobal(n, rng, rng.choice((2, 2, 4)))
    v = localglobal_check(As, n)
    t.check(v.hypotheses, f"localglobal hypotheses n={n}")
    t.check(v.integral and v.integral_witness.is_monic, f"localglobal integral n={n}")
    # the witness vanishes on the square root of lambda: P(x^2) at x with x^2 = lambda
    lam = ((As[0] - Matrix.identity(As[0].nrows)) @ (As[0] - Matrix.identity(As[0].nrows))) / n
    t.check(v.lambda_charpoly(lam).is_zero(), "lambda annihilated")


# ---------------------------------------------------------------------------
# torsion modules with pairing
# ---------------------------------------------------------------------------

def _brute_perp(P, S: Submodule) -> list[tuple[int, ...]]:
    n, k = P.n, P.rank
    elems = S.elements()
    return [y for y in itertools.product(range(n), repeat=k)
            if all(sum(x[a] * P.E[a, b] * y[b] for a in range(k) for b in range(k)) % n == 0 for x in elems)]


def _killed(A: Matrix, vectors, n: int) -> bool:
    return all(not any(x % n for x in A.apply(v)) for v in vectors)


def _s_search(P, subs) -> bool:
    """Brute-force oracle: some S has trivial action on S and on its brute-force annihilator."""
    A, Astar = P.power_minus_one("X"), P.power_minus_one("Xstar")
    for S in subs:
        if _killed(A, S.elements(), P.n) and _killed(Astar, _brute_perp(P, S), P.n):
            return True
    return False


def _torsion_checks(P, t: Tally, label: str, extra_subs=()):
    eq = sslem_equivalence(P)
    t.check(eq.agree, f"sslem {label}")
    S = fixed_submodule(P, "X")
    for T in (S, *extra_subs):
        t.check(ssprelem_check(P, T).consistent, f"ssprelem {label}")
        perp = orthogonal_complement(P, T, "X")
        t.check(orthogonal_complement(P, perp, "Xstar") == T, f"double complement {label}")
    rep = counting_identities(P)
    t.check(rep.ok, f"counting {label}: {rep.failures}")
    if eq.rhs:
        t.check(unipotence_exponent_check(P), f"gamma^n = 1 {label}")


def _sp2_elements():
    return [(n, g) for n in (2, 3, 4) for g in sl2_elements(n)]


_SP2 = _sp2_elements()


@lru_cache(maxsize=None)
def _subs(n: int, k: int):
    return tuple(all_submodules(n, k))


def _sp2_case(seed: int, i: int, t: Tally):
    n, g = _SP2[i]
    P = standard_principal(n, 1, g)
    subs = _subs(n, 2)
    _torsion_checks(P, t, f"Sp2(Z/{n}) #{i}", subs)
    t.check(_s_search(P, subs) == sslem_equivalence(P).rhs, f"S-search Sp2(Z/{n}) #{i}")
    # the same element against a non-standard invariant pairing (dual-pair model)
    Q = dual_pair(n, 1, g, Matrix([[1, 0], [0, 1]]))
    _torsion_checks(Q, t, f"dual Sp2(Z/{n}) #{i}")


@lru_cache(maxsize=65536)
def _sp4_checks(n: int, g: Matrix) -> tuple[int, tuple[str, ...]]:
    t = Tally()
    P = standard_principal(n, 2, g)
    _torsion_checks(P, t, f"Sp4(Z/{n})")
    return t.checks, tuple(t.failures)


def _sp4_case(n: int):
    def run(seed: int, i: int, t: Tally):
        rng = case_rng(seed, f"sp4-{n}", i)
        g = random_symplectic(n, 2, rng)
        c, f = _sp4_checks(n, g)
        t.checks += c
        t.failures.extend(f"{x} #{i}" for x in f)
        # one random subgroup per sample for the one-directional criterion
        gens = [[rng.randrange(n) for _ in range(4)] for _ in range(rng.randint(1, 2))]
        S = Submodule.from_generators(n, 4, gens)
        P = standard_principal(n, 2, g)
        t.check(ssprelem_check(P, S).consistent, f"ssprelem random S Sp4(Z/{n}) #{i}")
        t.check(orthogonal_complement(P, orthogonal_complement(P, S, "X"), "Xstar") == S,
                f"double complement random S Sp4(Z/{n}) #{i}")
    return run


@lru_cache(maxsize=None)
def _sp4_2_all():
    return tuple(symplectic_elements(2, 2))


def _s_search_case(seed: int, i: int, t: Tally):
    g = _sp4_2_all()[i]
    P = standard_principal(2, 2, g)
    t.check(_s_search(P, _subs(2, 4)) == sslem_equivalence(P).rhs, f"S-search Sp4(Z/2) #{i}")


# ---------------------------------------------------------------------------
# lattice saturation
# ---------------------------------------------------------------------------

def _saturation_checks(L: OperatorLattice, t: Tally, label: str):
    n, R = L.n, L.R
    gamma, lam = build_gamma_lambda(L)
    T, C = saturate(L)
    T0 = L.T0
    g1 = gamma - Matrix.identity(L.rank)
    t.check(T.contains(T0), f"T0 in T {label}")
    t.check(T0.contains_vectors(T.basis * n ** (R - 1)), f"(c) n^(R-1) T in T0 {label}")
    t.check(T0.contains_vectors((g1 ** (2 * R)) @ T0.basis / n), f"(d) {label}")
    t.check(T.is_stable(lam), f"lambda-stable {label}")
    t.check(T.is_stable(L.gamma0), f"gamma0-stable {label}")
    t.check(saturate_by_iteration(L) == T, f"minimality {label}")
    again = OperatorLattice(L.ell, n, L.d, L.t, L.gamma0, T.basis)
    t.check(saturate(again)[0] == T, f"idempotent {label}")
    for row in efg_equivalences(L, T):
        t.check(row.agree, f"({row.name}) {label}")
    t.check(C.killed_by(KERNEL_BOUND[n]), f"bound {KERNEL_BOUND[n]} {label}")
    t.check(C.order == abs(T0.basis.det() / T.basis.det()), f"|C| = index {label}")
    Y = isogeny_quotient(L)
    t.check(Y.semistable_on_Yn, f"(gamma-1)^2 Y_n = 0 {label}")
    if gamma ** R == Matrix.identity(L.rank):
        t.check(potgood_mu_quotient(L).killed_by({2: 2, 3: 3, 4: 2}[n]), f"potgood {label}")
    return C


def _saturation_case(n: int):
    def run(seed: int, i: int, t: Tally):
        rng = case_rng(seed, f"saturation-n{n}", i)
        d = rng.randint(1, 4)
        L = random_operator_lattice(n, d, rng)
        _saturation_checks(L, t, f"n={n} d={d} #{i}")
    return run


_ELLCOR_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (3, 2))
_ELLCOR_PER_PAIR = 150


def _ellcor_case(seed: int, i: int, t: Tally):
    d, n = _ELLCOR_PAIRS[i // _ELLCOR_PER_PAIR]
    rng = case_rng(seed, "ellcor", i)
    L = random_operator_lattice(n, d, rng)
    T, C = saturate(L)
    t.check(C.killed_by(ellcor_kernel_bound(d, n)), f"ellcor bound d={d} n={n} #{i}")
    if d == 1:
        t.check(T == L.T0, f"d=1 keeps T0 n={n} #{i}")


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def _examples_case(seed: int, i: int, t: Tally):
    eid = EXAMPLE_IDS[i]
    c = run_example(eid)
    for f in c.facts:
        t.check(f.ok, f"{eid}: {f.name}")
    t.check(run_example(eid).to_json() == c.to_json(), f"{eid}: deterministic")


_SL2_PAIRS = None


def _sl2_pairs():
    global _SL2_PAIRS
    if _SL2_PAIRS is None:
        _SL2_PAIRS = list(all_sl2_pairs())
    return _SL2_PAIRS


def _elliptic_oracle(g4: Matrix, g3: Matrix) -> int:
    """Degree from the existence of S at levels 4, 3, 2, in that order."""
    one = Matrix.identity(2)
    if ((g4 - one) @ (g4 - one)).is_zero_mod(4) and ((g3 - one) @ (g3 - one)).is_zero_mod(3):
        return 1
    for deg, n, g in ((2, 4, g4), (3, 3, g3), (4, 2, g4)):
        if sslem_equivalence(standard_principal(n, 1, g)).lhs:
            return deg
    return 6


def _elliptic_case(seed: int, i: int, t: Tally):
    g4, g3 = _sl2_pairs()[i]
    dec = elliptic_degree_decision(g4, g3)
    t.check(dec.degree == _elliptic_oracle(g4, g3), f"elliptic oracle #{i}")
    for k in range(2, 13):
        p = elliptic_degree_decision((g4 ** k).mod(4), (g3 ** k).mod(3))
        t.check(p.degree <= dec.degree, f"elliptic monotone #{i} power {k}")


_PADD_PER_CASE = 100


def _padd_case(seed: int, i: int, t: Tally):
    case = "abc"[i // _PADD_PER_CASE]
    rng = case_rng(seed, "padd", i)
    n = {"a": 4, "b": 3, "c": 2}[case]
    R = r_of(n)
    allowed = [cyclotomic_poly(k) for k in range(2, R + 1)
               if R % k == 0 and not (case == "c" and k == 2)]
    d = rng.randint(1, 2)
    blocks, room = [], 2 * d
    while room:
        p = rng.choice([q for q in allowed if q.degree <= room] or [None])
        if p is None:
            blocks, room = [], 2 * d
            continue
        blocks.append(companion(p))
        room -= p.degree
    U = random_unimodular(2 * d, rng)
    gamma = U @ Matrix.block_diag(*blocks) @ U.inverse()
    # an invariant pairing: J pulled back along U, which gamma preserves when each block does
    E = U.inverse().T @ _block_pairing(blocks) @ U.inverse()
    v = padd_decision(gamma, case, quadratic_still_additive=True, pairing=E)
    label = f"padd {case} #{i}"
    t.check(v.relation_holds, f"{label} relation")
    t.check(v.unipotent_at_level, f"{label} (gamma-1)^2 X_n = 0")
    t.check(v.unipotent_by_enumeration == v.unipotent_at_level, f"{label} enumeration")
    t.check(v.s_exists and v.equivalence_agrees, f"{label} S exists")


def _block_pairing(blocks) -> Matrix:
    """Sum of pairings each invariant under its block, for 1x1 blocks paired in twos."""
    mats, pending = [], None
    for B in blocks:
        if B.nrows == 2:
            # any 2x2 integer matrix of determinant 1 preserves J
            mats.append(standard_form(1))
        elif pending is None:
            pending = B
        else:
            mats.append(standard_form(1))
            pending = None
    return Matrix.block_diag(*mats)


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

SUITES = {
    "linalg": (200, _linalg_case),
    "cyclotomic-rtable": (1, _rtable_case),
    "cyclotomic-quasithm": (len(_QUASI_GRID), _quasithm_case),
    "cyclotomic-primroot": (len(_PRIMROOT), _primroot_case),
    "cyclotomic-algprop": (len(_ALGPROP), _algprop_case),
    "cyclotomic-localglobal": (500, _localglobal_case),
    "torsion-sp2-exhaustive": (len(_SP2), _sp2_case),
    "torsion-sp4-z2": (10_000, _sp4_case(2)),
    "torsion-sp4-z3": (10_000, _sp4_case(3)),
    "torsion-s-search-sp4-z2": (720, _s_search_case),
    "saturation-n2": (1000, _saturation_case(2)),
    "saturation-n3": (1000, _saturation_case(3)),
    "saturation-n4": (1000, _saturation_case(4)),
    "scenarios-ellcor": (len(_ELLCOR_PAIRS) * _ELLCOR_PER_PAIR, _ellcor_case),
    "scenarios-examples": (len(EXAMPLE_IDS), _examples_case),
    "scenarios-elliptic": (48 * 24, _elliptic_case),
    "scenarios-padd": (3 * _PADD_PER_CASE, _padd_case),
}


def _run_chunk(job) -> tuple[str, int, int, list, float]:
    name, seed, start, stop = job
    count, fn = SUITES[name]
    began = time.perf_counter()
    t = Tally()
    for i in range(start, stop):
        try:
            fn(seed, i, t)
        except Exception as exc:  # a crash is a falsification, not a harness error
            t.check(False, f"{name} #{i} raised {type(exc).__name__}: {exc}")
    return name, stop - start, t.checks, t.failures, time.perf_counter() - began


def _jobs(seed: int, names, chunk: int = 100):
    for name in names:
        count = SUITES[name][0]
        for start in range(0, count, chunk):
            yield name, seed, start, min(count, start + chunk)


def verify_all(seed: int = DEFAULT_SEED, shards: int = 1, names=None, timings: dict | None = None) -> dict:
    """Run the suites and return a summary that depends only on seed and version.

    Wall-clock seconds per suite (summed over chunks) go into ``timings`` if
    given; they are kept out of the summary so that it stays reproducible.
    """
    names = list(SUITES) if names is None else list(names)
    for name in names:
        if name not in SUITES:
            raise DomainError(f"unknown suite {name!r}")
    jobs = list(_jobs(seed, names))
    if shards <= 1:
        results = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=shards) as pool:
            results = list(pool.map(_run_chunk, jobs))
    summary = {name: {"cases": 0, "checks": 0, "exceptions": 0, "failures": []} for name in names}
    for name, cases, checks, failures, seconds in results:
        if timings is not None:
            timings[name] = timings.get(name, 0.0) + seconds
        s = summary[name]
        s["cases"] += cases
        s["checks"] += checks
        s["exceptions"] += len(failures)
        s["failures"].extend(failures)
    for s in summary.values():
        s["failures"] = sorted(s["failures"])[:20]
    return {
        "version": __version__,
        "seed": seed,
        "suites": summary,
        "total_cases": sum(s["cases"] for s in summary.values()),
        "total_checks": sum(s["checks"] for s in summary.values()),
        "total_exceptions": sum(s["exceptions"] for s in summary.values()),
    }
