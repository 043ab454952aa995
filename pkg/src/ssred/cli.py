"""Command-line front end.

Exit codes: 0 when the criterion holds or the run is clean, 1 when it fails,
2 on invalid input.  Human-readable output comes first, then the sentinel
line, then a JSON block that is stable across runs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import DomainError, NotSemistableError
from .linalg import Matrix

SENTINEL = "---CERTIFICATE---"
EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class ScenarioError(DomainError):
    pass


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    n: int
    d: int
    t: int
    gamma: Matrix
    pairing: Matrix | None  # None means the standard symplectic form
    model: str
    gammaXstar: Matrix | None = None


def parse_fields(text: str, source: str = "<scenario>") -> dict[str, tuple[int, object]]:
    """``key: value`` lines with JSON values (bare words allowed); '#' starts a comment."""
    fields: dict[str, tuple[int, object]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ScenarioError(f"{source}:{lineno}: expected 'key: value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split(":", 1))
        if key in fields:
            raise ScenarioError(f"{source}:{lineno}: duplicate field {key!r}")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        fields[key] = (lineno, parsed)
    return fields


def _matrix_field(fields, key: str, source: str, size: int | None = None) -> Matrix:
    lineno, value = fields[key]
    where = f"{source}:{lineno}: field {key!r}"
    if (not isinstance(value, list) or not value
            or not all(isinstance(r, list) for r in value)
            or not all(isinstance(x, int) and not isinstance(x, bool) for r in value for x in r)):
        raise ScenarioError(f"{where}: expected a nested list of integers")
    width = len(value[0])
    if any(len(r) != width for r in value) or width != len(value):
        raise ScenarioError(f"{where}: matrix must be square")
    if size is not None and width != size:
        raise ScenarioError(f"{where}: expected a {size}x{size} matrix, got {width}x{width}")
    return Matrix(value, width)


def _int_field(fields, key: str, source: str, default=None) -> int:
    if key not in fields:
        if default is None:
            raise ScenarioError(f"{source}: missing required field {key!r}")
        return default
    lineno, value = fields[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ScenarioError(f"{source}:{lineno}: field {key!r} must be an integer")
    return value


_KNOWN = {"n", "d", "t", "gamma", "pairing", "model", "gammaXstar"}


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    fields = parse_fields(text, source)
    unknown = sorted(set(fields) - _KNOWN)
    if unknown:
        line = fields[unknown[0]][0]
        raise ScenarioError(f"{source}:{line}: unknown field {unknown[0]!r}")
    if "gamma" not in fields:
        raise ScenarioError(f"{source}: missing required field 'gamma'")
    n = _int_field(fields, "n", source)
    if n < 2:
        raise ScenarioError(f"{source}:{fields['n'][0]}: field 'n' must be at least 2")
    gamma = _matrix_field(fields, "gamma", source)
    if gamma.nrows % 2:
        raise ScenarioError(f"{source}:{fields['gamma'][0]}: gamma must have even size 2d")
    d = _int_field(fields, "d", source, default=gamma.nrows // 2)
    if 2 * d != gamma.nrows:
        raise ScenarioError(f"{source}:{fields['gamma'][0]}: gamma is {gamma.nrows}x{gamma.nrows} but d = {d}")
    t = _int_field(fields, "t", source, default=0)
    if t < 0:
        raise ScenarioError(f"{source}:{fields['t'][0]}: field 't' must be non-negative")
    pairing = None
    if "pairing" in fields and fields["pairing"][1] != "standard":
        pairing = _matrix_field(fields, "pairing", source, 2 * d)
    model = fields.get("model", (0, "principal"))[1]
    if model not in ("principal", "dual-pair"):
        raise ScenarioError(f"{source}:{fields['model'][0]}: model must be 'principal' or 'dual-pair'")
    gstar = None
    if "gammaXstar" in fields:
        if model != "dual-pair":
            raise ScenarioError(f"{source}:{fields['gammaXstar'][0]}: gammaXstar needs model 'dual-pair'")
        gstar = _matrix_field(fields, "gammaXstar", source, 2 * d)
    return Scenario(n, d, t, gamma, pairing, model, gstar)


def scenario_pair_data(sc: Scenario):
    from .torsion import TorsionPairData, dual_pair, standard_form

    E = standard_form(sc.d) if sc.pairing is None else sc.pairing
    if sc.model == "principal":
        return TorsionPairData(sc.n, sc.d, sc.gamma, sc.gamma, E)
    return dual_pair(sc.n, sc.d, sc.gamma, E, sc.gammaXstar)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read file: {exc.strerror}") from None


def _emit(human: list[str], machine: dict, fmt: str):
    if fmt == "text":
        for line in human:
            print(line)
    print(SENTINEL)
    print(json.dumps(machine, indent=2, sort_keys=True, ensure_ascii=False))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    from .torsion import counting_identities, fixed_submodule, orthogonal_complement, sslem_equivalence

    sc = parse_scenario(_read(args.path), args.path)
    P = scenario_pair_data(sc)
    S = fixed_submodule(P, "X")
    Sperp = orthogonal_complement(P, S, "X")
    eq = sslem_equivalence(P)
    counts = counting_identities(P)
    human = [
        f"level n = {P.n}, rank 2d = {P.rank}, model = {sc.model}",
        f"S = X_n^I: order {S.order}, generators {S.generators()}",
        f"S^perp in X_n^*: order {Sperp.order}, generators {Sperp.generators()}",
        f"inertia trivial on S and S^perp: {eq.lhs}",
        f"(gamma - 1)^2 = 0 on X_n: {eq.rhs}",
        f"sides agree: {eq.agree}",
        "counting identities: " + ("ok" if counts.ok else "FAILED " + ", ".join(counts.failures)),
        "criterion " + ("holds" if eq.lhs else "fails"),
    ]
    machine = {
        "command": "check",
        "version": __version__,
        "n": P.n,
        "d": P.d,
        "S": S.describe(),
        "S_perp": Sperp.describe(),
        "trivial_on_S_and_S_perp": eq.lhs,
        "unipotent_square_zero": eq.rhs,
        "counting": {k: v for k, v in counts.values.items()},
        "counting_ok": counts.ok,
    }
    _emit(human, machine, args.format)
    return EXIT_OK if eq.lhs else EXIT_FAIL


def cmd_saturate(args) -> int:
    from .saturation import OperatorLattice, efg_equivalences, isogeny_quotient

    sc = parse_scenario(_read(args.path), args.path)
    if sc.n not in (2, 3, 4):
        raise ScenarioError(f"{args.path}: saturation needs n in {{2, 3, 4}}, got {sc.n}")
    L = OperatorLattice.standard(sc.n, sc.gamma, sc.t)
    try:
        Y = isogeny_quotient(L)
    except NotSemistableError as exc:
        _emit([f"precondition fails: {exc}"],
              {"command": "saturate", "version": __version__, "precondition": False, "reason": str(exc)},
              args.format)
        return EXIT_FAIL
    rows = efg_equivalences(L, Y.T)
    C = Y.C
    human = [
        f"level n = {L.n}, ell = {L.ell}, rank = {L.rank}, t = {L.t}",
        "T basis (HNF, columns span T):",
        *(f"  {list(r)}" for r in Y.T.basis.tolist()),
        f"C = T/T0 elementary divisors: {list(C.divisors)}",
        f"C exponent: {C.exponent}",
        *(f"({r.name}) {r.lhs_statement}: {r.lhs} | {r.rhs_statement}: {r.rhs} | agree: {r.agree}" for r in rows),
        f"(gamma^(R^t) - 1)^2 = 0 on Y_n: {Y.semistable_on_Yn}",
    ]
    machine = {
        "command": "saturate",
        "version": __version__,
        "precondition": True,
        "T_basis": Y.T.basis.tolist(),
        "C_divisors": list(C.divisors),
        "C_exponent": C.exponent,
        "efg": [{"name": r.name, "lhs": r.lhs, "rhs": r.rhs, "agree": r.agree} for r in rows],
        "Y_n_semistable": Y.semistable_on_Yn,
        "gamma_on_Y_n": Y.gamma_on_Yn.tolist(),
    }
    _emit(human, machine, args.format)
    return EXIT_OK


def cmd_example(args) -> int:
    from .scenarios import EXAMPLE_IDS, run_example

    if args.id not in EXAMPLE_IDS:
        raise ScenarioError(f"unknown example {args.id!r}; choose from {', '.join(EXAMPLE_IDS)}")
    cert = run_example(args.id)
    human = [f"example {cert.example_id}: n = {cert.n}, ell = {cert.ell}, d = {cert.d}"]
    for f in cert.facts:
        mark = "ok" if f.ok else "FALSIFIED"
        human.append(f"  [{mark}] {f.name} = {f.value}")
    human.append(f"verdict: {cert.verdict}")
    payload = cert.to_json()
    payload["version"] = __version__
    _emit(human, payload, args.format)
    return EXIT_OK if not cert.falsified else EXIT_FAIL


def cmd_verify_all(args) -> int:
    from .suites import verify_all

    if args.shards < 1:
        raise ScenarioError("--shards must be at least 1")
    result = verify_all(args.seed, args.shards, args.suite)
    human = [f"seed {result['seed']}, version {result['version']}",
             f"{'suite':32s} {'cases':>8s} {'checks':>9s} {'exceptions':>10s}"]
    for name, s in result["suites"].items():
        human.append(f"{name:32s} {s['cases']:8d} {s['checks']:9d} {s['exceptions']:10d}")
        for f in s["failures"]:
            human.append(f"    {f}")
    human.append(f"{'total':32s} {result['total_cases']:8d} {result['total_checks']:9d} "
                 f"{result['total_exceptions']:10d}")
    _emit(human, result, args.format)
    return EXIT_OK if result["total_exceptions"] == 0 else EXIT_FAIL


def cmd_decide_elliptic(args) -> int:
    from .scenarios import elliptic_degree_decision

    fields = parse_fields(_read(args.path), args.path)
    for key in ("g4", "g3"):
        if key not in fields:
            raise ScenarioError(f"{args.path}: missing required field {key!r}")
    extra = sorted(set(fields) - {"g4", "g3"})
    if extra:
        raise ScenarioError(f"{args.path}:{fields[extra[0]][0]}: unknown field {extra[0]!r}")
    g4 = _matrix_field(fields, "g4", args.path, 2)
    g3 = _matrix_field(fields, "g3", args.path, 2)
    dec = elliptic_degree_decision(g4, g3)
    human = [f"degree: {dec.label}", f"fired: {dec.fired}",
             "predicates: " + ", ".join(f"{k}={v}" for k, v in dec.predicates.items())]
    if dec.annotation:
        human.append(f"note: {dec.annotation}")
    machine = {"command": "decide-elliptic", "version": __version__, "degree": dec.label,
               "fired": dec.fired, "predicates": dec.predicates, "annotation": dec.annotation}
    _emit(human, machine, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="seed for randomized suites (default 42)")
    common.add_argument("--shards", type=int, default=1, help="worker processes for verify-all")
    common.add_argument("--format", choices=("text", "machine"), default="text")

    p = _Parser(prog="ssred", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("check", parents=[common], help="does S exist with inertia trivial on S and S^perp")
    c.add_argument("path")
    c.set_defaults(func=cmd_check)
    s = sub.add_parser("saturate", parents=[common], help="saturate T0 under (gamma-1)^2/n")
    s.add_argument("path")
    s.set_defaults(func=cmd_saturate)
    e = sub.add_parser("example", parents=[common], help="recompute a worked example certificate")
    e.add_argument("id")
    e.set_defaults(func=cmd_example)
    v = sub.add_parser("verify-all", parents=[common], help="run every property suite")
    v.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    v.set_defaults(func=cmd_verify_all)
    el = sub.add_parser("decide-elliptic", parents=[common], help="semistability degree of an elliptic curve")
    el.add_argument("path")
    el.set_defaults(func=cmd_decide_elliptic)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format == "text" and args.command == "verify-all":
        print(f"seed: {args.seed}", file=sys.stderr)
    try:
        return args.func(args)
    except (DomainError, ValueError, ZeroDivisionError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
