"""Command-line front end.

Exit codes: 0 pass, 1 check failed, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import acceptance, cpstar, fhilb
from .bitcommit import (
    ADVERSARIES,
    BitCommitmentProtocol,
    ProtocolInvariantError,
    check_secure,
    paper_protocol,
)
from .groupoid import Groupoid, InvalidSpec, NotClosed, groupoid_from_frobenius, verify_frobenius
from .relcat import Relation
from .report import CheckReport
from .search import BudgetExceeded
from .specfile import (
    ParseError,
    family_from_data,
    load_document,
    parse_protocol_file,
    parse_spec,
    resolve_groupoid,
    resolve_subgroupoid,
)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

INPUT_ERRORS = (
    ParseError,
    InvalidSpec,
    NotClosed,
    cpstar.NotSubsystem,
    cpstar.InvalidMeasurement,
    cpstar.NotInverseRespecting,
    ProtocolInvariantError,
    KeyError,
)


class InputError(ValueError):
    pass


# verbs whose verdict is a pass/fail check; the others report a property and
# only fail against an explicit --expect
DEFAULT_EXPECT = {
    "validate": "valid",
    "frobenius-check": "true",
    "bitcommit": "secure",
    "fhilb-verify": "true",
    "catalog": "true",
}


def _norm(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v).lower()


def _groupoid_arg(args) -> Groupoid:
    ref = args.g or args.spec
    if ref is None:
        raise InputError("a groupoid is required (positional SPEC or --g)")
    return resolve_groupoid(ref)


# ---------------------------------------------------------------------------
# verbs: each returns (verdict, inputs, witness, candidates_examined, details)


def do_validate(args):
    if args.spec is None:
        raise InputError("validate needs a SPEC path")
    obj = parse_spec(args.spec)
    if isinstance(obj, BitCommitmentProtocol):
        bad = obj.invariant_violations()
        details = {"kind": "protocol", "H": len(obj.H), "T": len(obj.T)}
        return ("valid" if not bad else "invalid"), {"spec": args.spec}, bad or None, None, details
    details = {
        "kind": "groupoid",
        "objects": len(obj.objects),
        "morphisms": len(obj.morphisms),
        "components": len(obj.components()),
        "totally_disconnected": obj.is_totally_disconnected(),
    }
    return "valid", {"spec": args.spec}, None, None, details


def do_frobenius(args):
    g = _groupoid_arg(args)
    fd = g.frobenius
    bad = verify_frobenius(fd)
    roundtrip = not bad and groupoid_from_frobenius(fd) == g
    details = {"violated_axioms": bad, "round_trip": roundtrip}
    return (not bad and roundtrip), {"groupoid": g.name or args.spec}, bad or None, None, details


def do_broadcast(args):
    g = _groupoid_arg(args)
    d = cpstar.decide_broadcastable(g, exhaustive_limit=args.exhaustive_limit, budget=args.budget)
    witness = None
    if d.map is not None:
        witness = [[g.fmt(f), [g.fmt(p), g.fmt(q)]] for f, (p, q) in d.map.rel.pairs()]
    details = {"reason": d.reason, "search_confirms": d.search_confirms}
    return d.broadcastable, {"groupoid": g.name or args.g or args.spec}, witness, d.candidates_examined, details


def do_copyables(args):
    g = _groupoid_arg(args)
    stats: dict = {}
    states = cpstar.copyable_states(g, stats)
    shown = [[g.fmt(m) for m in g.morphisms if m in s] for s in states]
    return len(states), {"groupoid": g.name or args.g or args.spec}, shown, stats.get("candidates_examined"), {}


def _relation_arg(g: Groupoid, path: Optional[str]) -> Relation:
    if path is None:
        return cpstar.identity(g).rel
    data = load_document(path)
    pairs = data.get("pairs") if isinstance(data, dict) else data
    if not isinstance(pairs, list):
        raise ParseError("expected a list of [source, target] pairs", path=path)
    try:
        return Relation.from_pairs(g.carrier, g.carrier, [(g.lookup(a), g.lookup(b)) for a, b in pairs])
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(str(exc), "pairs", path=path) from None


def do_witness(args):
    g = _groupoid_arg(args)
    rel = _relation_arg(g, args.relation)
    r = cpstar.entanglement_witness(cpstar.CPMorphism(g, g, rel))
    witness = None if r.witness is None else [g.fmt(r.witness[0]), g.fmt(r.witness[1])]
    inputs = {"groupoid": g.name or args.g or args.spec, "relation": args.relation or "identity"}
    return r.verdict, inputs, witness, None, {}


def _family_arg(g: Groupoid, text: str):
    if Path(text).exists():
        data = load_document(text)
    else:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ParseError(str(exc), "--family") from None
    return family_from_data(data, g)


def do_measure(args):
    g = _groupoid_arg(args)
    if args.family is None:
        raise InputError("measure needs --family")
    parts = _family_arg(g, args.family)
    m = cpstar.Measurement(g, tuple(parts))
    rel = cpstar.measurement_rel(m).rel
    agrees = rel == cpstar.measurement_rel_oracle(m)
    shown = [[g.fmt(a), g.fmt(b)] for a, b in rel.pairs()]
    details = {"causal": cpstar.is_causal(m), "oracle_agrees": agrees, "outcomes": len(parts)}
    inputs = {"groupoid": g.name or args.g or args.spec, "family": [[g.fmt(x) for x in p] for p in parts]}
    return agrees, inputs, shown, None, details


def _subsystems(args, g):
    if args.a is None or args.b is None:
        raise InputError("--a and --b subsystems are required")
    return resolve_subgroupoid(args.a, g), resolve_subgroupoid(args.b, g)


def _sub_inputs(args, g, a, b):
    fmt = lambda s: [g.fmt(m) for m in s.ordered()]  # noqa: E731
    return {"groupoid": g.name or args.g or args.spec, "A": fmt(a), "B": fmt(b)}


def do_ki(args):
    g = _groupoid_arg(args)
    a, b = _subsystems(args, g)
    return cpstar.kinematic_independence(g, a, b), _sub_inputs(args, g, a, b), None, None, {}


def do_ns(args):
    g = _groupoid_arg(args)
    a, b = _subsystems(args, g)
    r = cpstar.no_signalling_search(g, a, b, causal_only=args.causal, full=args.full)
    witness = None
    if r.witness is not None:
        w = r.witness
        witness = {
            "measured": w["measured"],
            "family": [[g.fmt(x) for x in p] for p in w["family"]],
            "b": g.fmt(w["b"]),
            "g": g.fmt(w["g"]),
            "direction": w["direction"],
        }
    inputs = _sub_inputs(args, g, a, b)
    inputs["causal"] = args.causal
    return r.no_signalling, inputs, witness, r.families_examined, {}


def do_bitcommit(args):
    if args.paper == bool(args.protocol):
        raise InputError("give exactly one of --paper or --protocol PATH")
    p = paper_protocol() if args.paper else parse_protocol_file(args.protocol)
    rep = check_secure(p, args.adversary, args.budget)
    inputs = {"protocol": "paper" if args.paper else args.protocol, "adversary": args.adversary}
    if rep.invariant_violations:
        return "invalid", inputs, rep.invariant_violations, None, {}
    b = rep.binding
    if b.verdict == "inconclusive":
        raise BudgetExceeded(b.candidates_examined)
    details = {
        "sound": rep.sound,
        "concealing": rep.concealing,
        "binding": b.verdict,
        "binding_reason": b.reason,
        "bob_view": [p.bob.fmt(m) for m in p.bob.morphisms if m in rep.bob_views[0].subset],
    }
    witness = None
    if b.cheat is not None:
        witness = [[p.alice.fmt(x), p.alice.fmt(y)] for x, y in b.cheat.pairs()]
    return ("secure" if rep.secure else "insecure"), inputs, witness, b.candidates_examined, details


def do_fhilb(args):
    if not 1 <= args.dim <= 4:
        raise InputError("--dim must be between 1 and 4")
    if args.structure == "diagonal":
        s = fhilb.diagonal_structure(args.dim)
    else:
        s = fhilb.matrix_algebra_structure(args.dim, scaled=not args.unscaled)
    res = fhilb.verify_frobenius_axioms(s)
    comm = fhilb.commutativity_residual(s)
    details = {"residuals": {k: float(f"{v:.3e}") for k, v in res.items()}, "commutativity": float(f"{comm:.3e}")}
    ok = max(res.values()) < args.tol
    if comm < args.tol:
        dev = fhilb.broadcast_deviation(s, args.trials, args.seed, args.tol)
        details["broadcast_deviation"] = float(f"{dev:.3e}")
        ok = ok and dev < args.tol
    else:
        details["broadcast_deviation"] = "skipped: not commutative"
    inputs = {"structure": args.structure, "dim": args.dim, "trials": args.trials, "seed": args.seed, "tol": args.tol}
    return ok, inputs, None, None, details


def do_catalog(args):
    results = acceptance.run_all()
    for r in results:
        print(r.line())
    details = {f"criterion {r.number}": ("pass" if r.passed else "fail") for r in results}
    findings = {k: v for r in results for k, v in r.findings.items()}
    if findings:
        details["findings"] = findings
    passed = sum(r.passed for r in results)
    details["summary"] = f"{passed}/{len(results)} criteria pass"
    return passed == len(results), {}, None, None, details


VERBS = {
    "validate": do_validate,
    "frobenius-check": do_frobenius,
    "broadcast": do_broadcast,
    "copyables": do_copyables,
    "witness": do_witness,
    "measure": do_measure,
    "ki": do_ki,
    "ns": do_ns,
    "bitcommit": do_bitcommit,
    "fhilb-verify": do_fhilb,
    "catalog": do_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpsrel", description="Finite checks in CP*[Rel].")
    sub = ap.add_subparsers(dest="verb", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the machine-readable report here")
    common.add_argument("--expect", help="expected verdict (true/false, secure/insecure, ...)")
    common.add_argument("--budget", type=int, default=None, help="search node budget")
    common.add_argument("--seed", type=int, default=0)
    gspec = argparse.ArgumentParser(add_help=False)
    gspec.add_argument("spec", nargs="?", help="groupoid spec file or catalog name")
    gspec.add_argument("--g", help="groupoid spec file or catalog name")

    sub.add_parser("validate", parents=[common, gspec], help="parse and validate a spec")
    sub.add_parser("frobenius-check", parents=[common, gspec], help="Frobenius axioms and round trip")
    p = sub.add_parser("broadcast", parents=[common, gspec], help="decide broadcastability")
    p.add_argument("--exhaustive-limit", type=int, default=16)
    sub.add_parser("copyables", parents=[common, gspec], help="list copyable states")
    p = sub.add_parser("witness", parents=[common, gspec], help="entanglement witness of a relation")
    p.add_argument("--relation", help="file of [source, target] pairs; default identity")
    p = sub.add_parser("measure", parents=[common, gspec], help="measurement relation of a family")
    p.add_argument("--family", help="file or inline YAML list of parts")
    for verb in ("ki", "ns"):
        p = sub.add_parser(verb, parents=[common, gspec], help=f"{verb} for two subsystems")
        p.add_argument("--a", help="subsystem: file, all, trivial or gen:<labels>")
        p.add_argument("--b", help="subsystem: file, all, trivial or gen:<labels>")
        if verb == "ns":
            p.add_argument("--causal", action=argparse.BooleanOptionalAction, default=True)
            p.add_argument("--full", action="store_true", help="enumerate every family (small subsystems)")
    p = sub.add_parser("bitcommit", parents=[common], help="security of a bit commitment protocol")
    p.add_argument("--paper", action="store_true")
    p.add_argument("--protocol")
    p.add_argument("--adversary", choices=ADVERSARIES, default="functions")
    p = sub.add_parser("fhilb-verify", parents=[common], help="numerical checks in FHilb")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--structure", choices=("diagonal", "matrix"), default="diagonal")
    p.add_argument("--unscaled", action="store_true", help="drop the speciality normalisation")
    p.add_argument("--tol", type=float, default=fhilb.DEFAULT_TOL)
    sub.add_parser("catalog", parents=[common], help="run the reproduction suite")
    return ap


def run(args) -> CheckReport:
    t0 = time.perf_counter()
    rep = CheckReport(check=args.verb, inputs={}, verdict=None, expected=args.expect)
    try:
        verdict, inputs, witness, examined, details = VERBS[args.verb](args)
        rep.verdict, rep.inputs, rep.witness = verdict, inputs, witness
        rep.candidates_examined, rep.details = examined, details
        want = args.expect if args.expect is not None else DEFAULT_EXPECT.get(args.verb)
        rep.exit_code = EXIT_PASS if want is None or _norm(verdict) == _norm(want) else EXIT_FAIL
    except BudgetExceeded as exc:
        rep.verdict, rep.exit_code = "budget exceeded", EXIT_BUDGET
        rep.candidates_examined = exc.nodes
    except (InputError, *INPUT_ERRORS) as exc:
        rep.verdict, rep.exit_code = "input error", EXIT_INPUT
        rep.details = {"error": str(exc.args[0]) if isinstance(exc, KeyError) else str(exc)}
    rep.elapsed = time.perf_counter() - t0
    return rep


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    rep = run(args)
    print(rep.summary())
    if args.out:
        Path(args.out).write_text(rep.to_json())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
