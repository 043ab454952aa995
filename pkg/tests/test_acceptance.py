"""Acceptance gate: one test group per criterion, each recorded as PASS or FAIL.

Run with ``pytest tests/test_acceptance.py``; the per-criterion lines are
printed in the "acceptance criteria" section at the end of the run.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import math
import time
from fractions import Fraction

import pytest
import sympy

from ssred import Matrix, companion, minpoly, r_of, run_example
from ssred.cli import SENTINEL, main
from ssred.cyclotomic import check_quasithm, exact_order
from ssred.linalg import Poly, is_prime
from ssred.scenarios import elliptic_degree_decision, padd_decision
from ssred.suites import SUITES, verify_all
from ssred.torsion import sl2_elements

SEED = 42


def record(report, key, ok, detail):
    prev_ok, prev_detail = report.get(key, (True, ""))
    report[key] = (prev_ok and ok, f"{prev_detail}; {detail}" if prev_detail else detail)


def run_suites(names):
    timings = {}
    began = time.perf_counter()
    result = verify_all(SEED, 1, names, timings=timings)
    return result, time.perf_counter() - began


def suite_detail(result, seconds):
    parts = [f"{n}: {s['cases']} cases, {s['checks']} checks, {s['exceptions']} exceptions"
             for n, s in result["suites"].items()]
    return f"{'; '.join(parts)}; {seconds:.1f}s"


# --- 1. R-table and sharpness ----------------------------------------------

def test_criterion_1_rtable_and_sharpness(acceptance_report):
    began = time.perf_counter()
    table = {2: 4, 3: 3, 4: 2}
    table_ok = all(r_of(n) == table.get(n, 1) for n in range(2, 200))
    witnesses = {}
    for n in (2, 3, 4):
        R = r_of(n)
        for m, j in itertools.product(range(1, 61), range(60)):
            if j < m and exact_order(m, j) == R and check_quasithm(m, j, n).hypothesis_holds:
                witnesses[n] = (m, j)
                break
    seconds = time.perf_counter() - began
    ok = table_ok and set(witnesses) == {2, 3, 4} and seconds < 1.0
    record(acceptance_report, 1, ok,
           f"table {'ok' if table_ok else 'WRONG'}, witnesses (m, j) {witnesses}, {seconds:.2f}s (< 1s)")
    assert table_ok
    # i, zeta_3 and -1 are the first witnesses in (m, j) order
    assert witnesses == {2: (4, 1), 3: (3, 1), 4: (2, 1)}
    assert seconds < 1.0


# --- 2. integrality sweep ----------------------------------------------------

def test_criterion_2_quasithm_sweep(acceptance_report):
    result, seconds = run_suites(["cyclotomic-quasithm"])
    s = result["suites"]["cyclotomic-quasithm"]
    expected_checks = sum(m for n in range(2, 13) for m in range(1, 61))
    ok = s["exceptions"] == 0 and s["checks"] == expected_checks and seconds < 60
    record(acceptance_report, 2, ok, suite_detail(result, seconds) + " (< 60s)")
    assert s["checks"] == expected_checks
    assert s["exceptions"] == 0, s["failures"]
    assert seconds < 60


# --- 3. unit and divisibility checks -----------------------------------------

def test_criterion_3_primroot_and_algprop(acceptance_report):
    result, seconds = run_suites(["cyclotomic-primroot", "cyclotomic-algprop"])
    prime_powers = [q for q in range(2, 65)
                    if any(is_prime(p) and q == p ** round(math.log(q, p)) for p in range(2, q + 1))]
    primroot = result["suites"]["cyclotomic-primroot"]
    ok = result["total_exceptions"] == 0 and primroot["cases"] == len(prime_powers) and seconds < 30
    record(acceptance_report, 3, ok,
           f"{len(prime_powers)} prime powers <= 64; " + suite_detail(result, seconds) + " (< 30s)")
    assert primroot["cases"] == len(prime_powers)
    assert result["total_exceptions"] == 0, result["suites"]
    assert seconds < 30


# --- 4. torsion criteria by brute force --------------------------------------

def test_criterion_4_torsion_brute_force(acceptance_report):
    sizes = {n: len(list(sl2_elements(n))) for n in (2, 3, 4)}
    names = ["torsion-sp2-exhaustive", "torsion-sp4-z2", "torsion-sp4-z3"]
    result, seconds = run_suites(names)
    cases = {n: result["suites"][n]["cases"] for n in names}
    ok = (sizes == {2: 6, 3: 24, 4: 48} and cases["torsion-sp2-exhaustive"] == 78
          and cases["torsion-sp4-z2"] >= 10_000 and cases["torsion-sp4-z3"] >= 10_000
          and result["total_exceptions"] == 0 and seconds < 300)
    record(acceptance_report, 4, ok,
           f"|Sp2(Z/n)| = {sizes}; " + suite_detail(result, seconds) + " (< 300s)")
    assert sizes == {2: 6, 3: 24, 4: 48}
    assert cases["torsion-sp2-exhaustive"] == 78
    assert min(cases["torsion-sp4-z2"], cases["torsion-sp4-z3"]) >= 10_000
    assert result["total_exceptions"] == 0, result["suites"]
    assert seconds < 300


# --- 5. saturation checks ----------------------------------------------------

def test_criterion_5_saturation(acceptance_report):
    names = ["saturation-n2", "saturation-n3", "saturation-n4"]
    result, seconds = run_suites(names)
    ok = (all(result["suites"][n]["cases"] == 1000 for n in names)
          and result["total_exceptions"] == 0 and seconds < 300)
    record(acceptance_report, 5, ok, suite_detail(result, seconds) + " (< 300s)")
    assert all(result["suites"][n]["cases"] == 1000 for n in names)
    assert result["total_exceptions"] == 0, result["suites"]
    assert seconds < 300


# --- 6. example certificates -------------------------------------------------

def _x_minus_1_power_mod(e: int, ell: int) -> list[int]:
    x = sympy.Symbol("x")
    return [int(c) % ell for c in sympy.Poly((x - 1) ** e, x).all_coeffs()]


def _charpoly_mod(M: Matrix, ell: int) -> list[int]:
    return [int(c) % ell for c in sympy.Matrix(M.rows).charpoly().all_coeffs()]


def _t_exponent(cert) -> int:
    """Exponent of T / Z^k: the lcm of the denominators of a basis of T."""
    out = 1
    for row in cert.matrices["T_basis"]:
        for x in row:
            out = math.lcm(out, Fraction(x).denominator)
    return out


def test_criterion_6_certificates(acceptance_report):
    began = time.perf_counter()
    problems = []
    for eid, n in (("ex-n2", 2), ("ex-n3", 3), ("ex-n4", 4)):
        c = run_example(eid)
        for name in ("tau_minus_1_sq_on_X_n_nonzero", "tau_minus_1_sq_on_Y_n_zero", "C_stable_under_inertia"):
            if c.fact(name) is not True:
                problems.append(f"{eid}: {name}")
        # independent: (gamma_X - 1)^2 mod n is nonzero, (gamma_Y - 1)^2 mod n is zero
        for key, want_zero in (("gamma_X", False), ("gamma_Y", True)):
            G = sympy.Matrix(c.matrices[key]) - sympy.eye(len(c.matrices[key]))
            zero = all(int(v) % n == 0 for v in G * G)
            if zero != want_zero:
                problems.append(f"{eid}: oracle {key}")
        if c.falsified:
            problems.append(f"{eid}: {c.verdict}")
    for eid, n, exponent in (("sharp-n2", 2, 8), ("sharp-n3", 3, 9), ("sharp-n4", 4, 4)):
        c = run_example(eid)
        ell, R = (2 if n != 3 else 3), r_of(n)
        gX = Matrix(c.matrices["gamma_X"])
        if c.fact("kernel_exponent") != exponent or _t_exponent(c) != exponent:
            problems.append(f"{eid}: exponent")
        want = _x_minus_1_power_mod(2 * R, ell)
        if minpoly(gX).degree != gX.nrows or _charpoly_mod(gX, ell) != want:
            problems.append(f"{eid}: minpoly")
        if not c.fact("minpoly_is_f_mod_ell") or c.falsified:
            problems.append(f"{eid}: {c.verdict}")
    c = run_example("sharp-d3n2")
    g1 = sympy.Matrix(c.matrices["gamma_X"]) - sympy.eye(6)
    fourth_nonzero = any(int(v) % 2 for v in g1 ** 4)
    if (c.fact("kernel_exponent") != 4 or _t_exponent(c) != 4 or c.fact("kernel_killed_by_2")
            or not fourth_nonzero or not c.fact("tau_minus_1_pow4_on_X_ell_nonzero") or c.falsified):
        problems.append("sharp-d3n2")
    seconds = time.perf_counter() - began
    ok = not problems and seconds < 10
    record(acceptance_report, 6, ok,
           f"7 certificates, exponents 8/9/4 and 4, {seconds:.2f}s (< 10s)"
           + (f"; problems: {problems}" if problems else ""))
    assert not problems
    assert seconds < 10


# --- 7. dimension-specific kernel bounds -----------------------------------

def test_criterion_7_ellcor(acceptance_report):
    result, seconds = run_suites(["scenarios-ellcor"])
    s = result["suites"]["scenarios-ellcor"]
    ok = s["exceptions"] == 0 and s["cases"] == 900
    record(acceptance_report, 7, ok, suite_detail(result, seconds) + " (6 (d, n) pairs x 150)")
    assert s["cases"] == 900
    assert s["exceptions"] == 0, s["failures"]


# --- 8. worked decision examples --------------------------------------------

I2 = Matrix.identity(2)
MINUS_I2 = I2 * -1


def test_criterion_8_elliptic_identity(acceptance_report):
    label = elliptic_degree_decision(I2, I2).label
    record(acceptance_report, 8, label == "1", f"elliptic (I, I) -> {label} (stated 1)")
    assert label == "1"


@pytest.mark.xfail(strict=True, reason="the stated class 2 contradicts the stated rule: "
                   "(-I - I)^2 = 4I vanishes mod 4 and g3 = I, so the semistable branch returns 1")
def test_criterion_8_elliptic_minus_identity_as_stated(acceptance_report):
    label = elliptic_degree_decision(MINUS_I2, I2).label
    record(acceptance_report, 8, label == "2", f"elliptic (-I, I) -> {label} (stated 2)")
    assert label == "2"


def test_criterion_8_elliptic_minus_identity_substitute(acceptance_report):
    # with g3 = -I the level-3 square is 4I, nonzero mod 3, so P2all decides
    dec = elliptic_degree_decision(MINUS_I2, MINUS_I2)
    record(acceptance_report, 8, dec.label == "2",
           f"substitute (-I, -I) -> {dec.label} via {dec.fired} (expected 2 via P2all)")
    assert dec.label == "2" and dec.fired == "P2all"


def test_criterion_8_elliptic_no_fixed_points(acceptance_report):
    g4 = Matrix([[0, -1], [1, -1]]).mod(4)
    # no element of SL2(F3) of order 3 is fixed-point-free, so the order-6 element is used
    order3_free = [g for g in sl2_elements(3)
                   if (g ** 3).mod(3) == I2 and g.mod(3) != I2
                   and not any((g @ Matrix.from_columns([v])).mod(3) == Matrix.from_columns([v])
                               for v in itertools.product(range(3), repeat=2) if any(v))]
    g3 = Matrix([[0, 1], [-1, 1]]).mod(3)
    dec = elliptic_degree_decision(g4, g3)
    record(acceptance_report, 8, dec.label == "≥6" and not order3_free,
           f"elliptic (order 3 mod 2, order 6 mod 3) -> {dec.label} (stated >=6; "
           f"{len(order3_free)} fixed-point-free order-3 elements exist in SL2(F3))")
    assert not order3_free
    assert dec.label == "≥6" and dec.fired == "none"


@pytest.mark.parametrize("case,gamma,relation", [
    ("a", MINUS_I2, lambda g: g + I2),
    ("b", companion(Poly([1, 1, 1])), lambda g: g @ g + g + I2),
    ("c", Matrix([[0, -1], [1, 0]]), lambda g: g @ g + I2),
])
def test_criterion_8_padd(acceptance_report, case, gamma, relation):
    v = padd_decision(gamma, case, quadratic_still_additive=(case == "c"))
    exact = relation(gamma).is_zero()
    ok = exact and v.relation_holds and v.unipotent_at_level and v.unipotent_by_enumeration and v.s_exists
    record(acceptance_report, 8, ok, f"padd ({case}) {v.relation}: {'exact' if exact else 'FAILS'}, "
           f"S exists at level {v.n}: {v.s_exists}")
    assert ok


# --- 9. determinism ---------------------------------------------------------

def _machine_block(argv) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue().split(SENTINEL + "\n", 1)[1]


def test_criterion_9_determinism(acceptance_report):
    argv = ["verify-all", "--seed", str(SEED), "--format", "machine"]
    began = time.perf_counter()
    code1, first = _machine_block(argv + ["--shards", "1"])
    code2, second = _machine_block(argv + ["--shards", "1"])
    code4, sharded = _machine_block(argv + ["--shards", "4"])
    seconds = time.perf_counter() - began
    ok = first == second == sharded and code1 == code2 == code4 == 0
    record(acceptance_report, 9, ok,
           f"{len(first)} bytes; runs equal: {first == second}; shards 1 vs 4 equal: {first == sharded}; "
           f"{len(SUITES)} suites; {seconds:.0f}s")
    assert first == second
    assert first == sharded
    assert code1 == code2 == code4 == 0
