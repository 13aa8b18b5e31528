"""The reproduction suite: eleven exact checks, each with a time limit.

Shared by the ``catalog`` CLI verb and the test suite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from . import catalog as cat
from . import cpstar, fhilb
from .bitcommit import (
    bob_view,
    check_binding,
    check_concealing,
    check_sound,
    paper_protocol,
)
from .cpstar import Measurement
from .groupoid import (
    SubgroupoidRef,
    frobenius_of_groupoid,
    groupoid_from_frobenius,
    subgroupoids,
    verify_frobenius,
    wide_closure,
)
from . import relcat as rc


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    elapsed: float
    limit: float
    detail: str = ""
    findings: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title} ({self.elapsed:.2f}s / {self.limit:g}s) {self.detail}".rstrip()


class _Fail(Exception):
    pass


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise _Fail(msg)


# ---------------------------------------------------------------------------


def c1_frobenius() -> str:
    groupoids = cat.catalog(max_morphisms=16)
    for name, g in groupoids.items():
        fd = frobenius_of_groupoid(g)
        bad = verify_frobenius(fd)
        _expect(not bad, f"{name} violates {bad}")
        _expect(groupoid_from_frobenius(fd) == g, f"{name} does not round-trip")
    return f"{len(groupoids)} groupoids"


def c2_broadcasting() -> str:
    groupoids = cat.catalog()
    for name, g in groupoids.items():
        d = cpstar.decide_broadcastable(g)
        _expect(d.broadcastable == g.is_totally_disconnected(), f"{name}: decision disagrees")
        _expect(len(g.morphisms) > 16 or d.search_confirms, f"{name}: constraint search disagrees")
        if g.is_totally_disconnected():
            _expect(cpstar.is_broadcasting_map(g, cpstar.canonical_broadcast_map(g)), f"{name}: canonical map fails")
    found, nodes = cpstar.search_broadcasting_map(cat.get("indiscrete(2)"))
    _expect(found is None, "a broadcasting map exists on indiscrete(2)")
    return f"{len(groupoids)} groupoids; indiscrete(2) refuted in {nodes} nodes"


def c3_hierarchy() -> str:
    s3, z2 = cat.get("S3"), cat.get("Z2")
    _expect(cpstar.decide_broadcastable(s3, exhaustive_limit=0).broadcastable, "S3 not broadcastable")
    m = s3.frobenius.mult
    _expect(rc.compose(rc.swap(s3.carrier, s3.carrier), m) != m, "S3 multiplication commutes")
    mz = z2.frobenius.mult
    _expect(rc.compose(rc.swap(z2.carrier, z2.carrier), mz) == mz, "Z2 multiplication does not commute")
    _expect(cpstar.decide_broadcastable(z2, exhaustive_limit=0).broadcastable, "Z2 not broadcastable")
    for n in range(1, 5):
        _expect(cpstar.is_biproduct_of_units(cat.get(f"discrete({n})")), f"discrete({n}) not a biproduct")
    _expect(not cpstar.is_biproduct_of_units(z2), "Z2 is a biproduct of units")
    return "biproduct ⊊ commutative ⊊ broadcastable"


def c4_copyables() -> str:
    g = cat.get("Z3+Z3")
    got = set(cpstar.copyable_states(g))
    want = {frozenset(g.endo(x)) for x in g.objects}
    _expect(got == want and len(got) == 2, f"Z3+Z3 copyables {got}")
    small = cat.catalog(max_morphisms=9)
    for name, h in small.items():
        _expect(
            set(cpstar.copyable_states(h)) == set(cpstar.copyable_states_bruteforce(h)),
            f"{name}: oracle disagrees",
        )
    return f"Z3+Z3 gives H and T; oracle agrees on {len(small)} groupoids"


def c5_bitcommit(findings: dict) -> str:
    p = paper_protocol()
    _expect(not p.invariant_violations(), "paper protocol breaks an invariant")
    _expect(check_sound(p), "not sound")
    _expect(check_concealing(p), "not concealing")
    bx = p.bob.lookup(("x", "x"))
    by = p.bob.lookup(("y", "y"))
    for s in (p.H, p.T):
        _expect(bob_view(p, s).subset == {bx, by}, "Bob's view is not {(x,x), (y,y)}")
    t0 = time.perf_counter()
    fb = check_binding(p, "functions")
    _expect(fb.verdict == "binding" and fb.candidates_examined == 0, "functions: not decided by fibre pruning")
    _expect(time.perf_counter() - t0 < 1.0, "fibre pruning too slow")
    allcp = check_binding(p, "all")
    _expect(allcp.verdict in ("binding", "cheat"), "all-cp search did not terminate")
    findings["all-cp-morphisms"] = allcp.verdict
    findings["all-cp candidates examined"] = allcp.candidates_examined
    if allcp.cheat is not None:
        findings["all-cp cheat"] = [(p.alice.fmt(a), p.alice.fmt(c)) for a, c in rc.sorted_pairs(allcp.cheat)]
    return f"sound, concealing, binding vs functions; all-cp finding: {allcp.verdict}"


def c6_entanglement() -> str:
    for n in (2, 3, 4):
        g = cat.get(f"indiscrete({n})")
        r = cpstar.entanglement_witness(cpstar.identity(g))
        _expect(r.entangled and r.witness is not None, f"indiscrete({n}) identity not entangled")
        x, y = r.witness
        _expect((x, y) in cpstar.identity(g).rel, "witness not in relation")
    return "identity on indiscrete(2..4) entangled"


def small_families(g, max_parts: int = 2, max_size: int = 2):
    """Families of disjoint nonempty parts, at most ``max_parts`` of at most ``max_size``."""
    ms = g.morphisms
    pieces = [c for k in range(1, max_size + 1) for c in combinations(ms, k)]
    for p in pieces:
        yield [p]
    if max_parts >= 2:
        for p, q in combinations(pieces, 2):
            if not set(p) & set(q):
                yield [p, q]


def c7_measurements() -> str:
    count = 0
    for name in ("Z3", "S3"):
        g = cat.get(name)
        for fam in small_families(g):
            m = Measurement(g, tuple(fam))
            _expect(cpstar.measurement_rel(m).rel == cpstar.measurement_rel_oracle(m), f"{name} {fam}")
            count += 1
    return f"{count} families"


def ns_triples(max_morphisms: int = 9):
    """``(name, g, A, B)`` over all ordered pairs of subsystems of small catalog groupoids."""
    for name, g in cat.catalog(max_morphisms=max_morphisms).items():
        subs = subgroupoids(g, wide_only=True)
        for a in subs:
            for b in subs:
                yield name, g, a, b


def _sub(g, gens) -> SubgroupoidRef:
    return wide_closure(g, [g.lookup(x) for x in gens])


def required_ns_triples():
    z6, s3, d2 = cat.get("Z6"), cat.get("S3"), cat.get("discrete(2)")
    full = SubgroupoidRef(d2, frozenset(d2.morphisms))
    return [
        ("Z6", z6, _sub(z6, [3]), _sub(z6, [2]), True),
        ("S3", s3, _sub(s3, ["(12)"]), _sub(s3, ["(123)"]), False),
        ("discrete(2)", d2, full, full, True),
    ]


def c8_ns_ki() -> str:
    for name, g, a, b, want in required_ns_triples():
        ki = cpstar.kinematic_independence(g, a, b)
        ns = cpstar.no_signalling(g, a, b, causal_only=True)
        _expect(ki == ns == want, f"{name}: KI={ki} NS={ns}, expected {want}")
    n = 0
    for name, g, a, b in ns_triples():
        ki = cpstar.kinematic_independence(g, a, b)
        ns = cpstar.no_signalling(g, a, b, causal_only=True)
        _expect(ki == ns, f"{name}: KI={ki} NS={ns}")
        n += 1
    return f"{n} triples plus the 3 named ones"


def c9_noncausal() -> str:
    n = 0
    for name, g, a, b in ns_triples():
        trivial = a.morphisms == g.identities and b.morphisms == g.identities
        want = g.is_group() and trivial
        ns = cpstar.no_signalling(g, a, b, causal_only=False)
        _expect(ns == want, f"{name}: non-causal NS={ns}, expected {want}")
        n += 1
    _, d2, full, _, _ = required_ns_triples()[2]
    _expect(cpstar.kinematic_independence(d2, full, full), "discrete(2) not KI")
    _expect(not cpstar.no_signalling(d2, full, full, causal_only=False), "discrete(2) non-causal NS holds")
    return f"{n} triples"


def c10_fhilb() -> str:
    for n in (2, 3, 4):
        s = fhilb.diagonal_structure(n)
        res = fhilb.verify_frobenius_axioms(s)
        _expect(max(res.values()) < 1e-9, f"diagonal {n}: {res}")
        dev = fhilb.broadcast_deviation(s, trials=20, seed=0)
        _expect(dev < 1e-9, f"diagonal {n}: deviation {dev}")
    m = fhilb.matrix_algebra_structure(2)
    res = fhilb.verify_frobenius_axioms(m)
    _expect(res["speciality"] < 1e-9, "matrix algebra not special")
    comm = fhilb.commutativity_residual(m)
    _expect(comm > 0.1, f"commutativity residual {comm}")
    return f"matrix algebra commutativity residual {comm:.3f}"


def c11_completeness() -> str:
    """Groupoids with at most 4 morphisms, then small subsystems of larger ones."""
    n = 0
    for name, g, a, b in ns_triples():
        small_parent = len(g.morphisms) <= 4
        if not small_parent and (len(a.morphisms) > 4 or len(b.morphisms) > 4):
            continue
        for causal in (True, False):
            full = cpstar.no_signalling_search(g, a, b, causal_only=causal, full=True)
            red = cpstar.no_signalling_search(g, a, b, causal_only=causal)
            _expect(full.no_signalling == red.no_signalling, f"{name} causal={causal}")
            n += 1
    return f"{n} comparisons"


CRITERIA: list[tuple[int, str, float, Callable]] = [
    (1, "Frobenius correspondence", 1.0, c1_frobenius),
    (2, "broadcastable iff totally disconnected", 10.0, c2_broadcasting),
    (3, "strict hierarchy of classical objects", 1.0, c3_hierarchy),
    (4, "copyable states", 5.0, c4_copyables),
    (5, "bit commitment", 60.0, c5_bitcommit),
    (6, "entangled identity on indiscrete groupoids", 1.0, c6_entanglement),
    (7, "measurement relation", 5.0, c7_measurements),
    (8, "no-signalling iff kinematic independence", 30.0, c8_ns_ki),
    (9, "non-causal no-signalling", 30.0, c9_noncausal),
    (10, "FHilb Frobenius and broadcasting", 5.0, c10_fhilb),
    (11, "completeness of the reduced family search", 60.0, c11_completeness),
]


def run_criterion(number: int) -> CriterionResult:
    num, title, limit, fn = next(c for c in CRITERIA if c[0] == number)
    findings: dict = {}
    t0 = time.perf_counter()
    try:
        detail = fn(findings) if fn is c5_bitcommit else fn()
        ok = True
    except _Fail as exc:
        detail, ok = f"failed: {exc}", False
    elapsed = time.perf_counter() - t0
    if ok and elapsed >= limit:
        ok, detail = False, f"over time limit: {detail}"
    return CriterionResult(num, title, ok, elapsed, limit, detail, findings)


def run_all() -> list[CriterionResult]:
    return [run_criterion(c[0]) for c in CRITERIA]
