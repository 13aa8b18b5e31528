"""Bit commitment in CP*[Rel].

Alice's and Bob's systems are indiscrete groupoids ``B(X)``, ``B(Y)``; their
tensor ``A ⊗ B`` is indiscrete on ``X × Y``. The classical structure lives on
the underlying set ``X × Y``, and a copyable state ``s`` of it is compared with
CP* states through ``B(s) = s × s`` (every arrow between two points of ``s``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterable, Optional, Sequence

from . import relcat as rc
from .cpstar import (
    CPMorphism,
    copyable_states,
    discard,
    identity as cp_identity,
    is_inverse_respecting,
    is_state_subset,
)
from .groupoid import Groupoid, cyclic, explicit, indiscrete, product_groupoid
from .relcat import UNIT, Relation
from .search import BudgetExceeded, Solver

ADVERSARIES = ("functions", "bijections", "isometries", "all")
_ALIASES = {
    "function-graphs": "functions",
    "bijection-graphs": "bijections",
    "all-cp-morphisms": "all",
}
# subclass -> superclass edges along which binding is antitone
ADVERSARY_INCLUSIONS = (("bijections", "functions"), ("isometries", "all"))


class ProtocolInvariantError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def adversary_name(adv: str) -> str:
    adv = _ALIASES.get(adv, adv)
    if adv not in ADVERSARIES:
        raise ValueError(f"unknown adversary class {adv!r}")
    return adv


def is_indiscrete(g: Groupoid) -> bool:
    return all(len(g.hom(x, y)) == 1 for x in g.objects for y in g.objects)


def lift(joint: Groupoid, points: Iterable) -> frozenset:
    """``B(s)``: all arrows of the indiscrete ``joint`` between points of ``s``."""
    pts = set(points)
    return frozenset(m for m in joint.morphisms if joint.dom[m] in pts and joint.cod[m] in pts)


def classical_structure(points: Sequence, blocks: Sequence[Sequence]) -> Groupoid:
    """Totally disconnected abelian groupoid on ``points``.

    Each block becomes one object whose endo-hom-set is the cyclic group on
    the block (first element is the identity); leftover points are trivial groups.
    """
    points = list(points)
    used = [p for b in blocks for p in b]
    if len(set(used)) != len(used):
        raise ValueError("classical blocks overlap")
    blocks = [list(b) for b in blocks] + [[p] for p in points if p not in set(used)]
    morphisms, compose = [], []
    for k, block in enumerate(blocks):
        n = len(block)
        morphisms += [(p, k, k) for p in block]
        compose += [[block[i], block[j], block[(i + j) % n]] for i in range(n) for j in range(n)]
    order = {p: i for i, p in enumerate(points)}
    morphisms.sort(key=lambda m: order[m[0]])
    ident = {k: b[0] for k, b in enumerate(blocks)}
    return explicit(list(range(len(blocks))), morphisms, compose, identities=ident, name="classical")


@dataclass
class BitCommitmentProtocol:
    alice: Groupoid
    bob: Groupoid
    H: frozenset
    T: frozenset
    unveil: CPMorphism
    classical: Groupoid
    hhat: frozenset
    that: frozenset
    joint: Groupoid = field(default=None)

    def __post_init__(self):
        if self.joint is None:
            self.joint = product_groupoid(self.alice, self.bob)
        self.H = frozenset(self.H)
        self.T = frozenset(self.T)
        self.hhat = frozenset(self.hhat)
        self.that = frozenset(self.that)

    def state(self, subset) -> Relation:
        return Relation.state(self.joint.carrier, subset)

    def invariant_violations(self, mono_check: bool = True) -> list[str]:
        bad = []
        if not is_indiscrete(self.alice) or not is_indiscrete(self.bob):
            bad.append("Alice and Bob must hold indiscrete groupoids")
        for nm, s in (("H", self.H), ("T", self.T)):
            if not s <= set(self.joint.morphisms):
                bad.append(f"{nm} is not a subset of Mor(A⊗B)")
            elif not is_state_subset(self.joint, s):
                bad.append(f"{nm} is not closed under inverses and identities")
        if set(self.classical.morphisms) != set(self.joint.objects):
            bad.append("classical structure must live on the underlying set of A⊗B")
        if not self.classical.is_totally_disconnected():
            bad.append("classical structure is not broadcastable")
        copyables = copyable_states(self.classical)
        for nm, s in (("Hhat", self.hhat), ("That", self.that)):
            if s not in copyables:
                bad.append(f"{nm} is not a copyable state of the classical structure")
        if self.hhat == self.that:
            bad.append("Hhat and That coincide")
        if self.unveil.source != self.joint or self.unveil.target != self.joint:
            bad.append("unveil must be an endomorphism of A⊗B")
        elif mono_check and not is_monomorphism(self.unveil):
            bad.append("unveil is not a monomorphism")
        return bad

    def with_(self, **changes) -> "BitCommitmentProtocol":
        return replace(self, **changes)


def paper_protocol() -> BitCommitmentProtocol:
    a = indiscrete([0, 1, 2])
    b = indiscrete(["x", "y"])
    joint = product_groupoid(a, b)
    h_obj = [(0, "x"), (1, "y"), (2, "y")]
    t_obj = [(0, "y"), (1, "x"), (2, "x")]
    classical = classical_structure(joint.objects, [h_obj, t_obj])
    return BitCommitmentProtocol(
        alice=a,
        bob=b,
        H=lift(joint, h_obj),
        T=lift(joint, t_obj),
        unveil=cp_identity(joint),
        classical=classical,
        hhat=frozenset(h_obj),
        that=frozenset(t_obj),
        joint=joint,
    )


def protocol_from_points(alice: Groupoid, bob: Groupoid, h_obj, t_obj, unveil: Optional[Relation] = None):
    joint = product_groupoid(alice, bob)
    h_obj = [tuple(p) for p in h_obj]
    t_obj = [tuple(p) for p in t_obj]
    unveil_cp = cp_identity(joint) if unveil is None else CPMorphism(joint, joint, unveil)
    blocks = [h_obj] if set(h_obj) == set(t_obj) else [h_obj, t_obj]
    return BitCommitmentProtocol(
        alice=alice,
        bob=bob,
        H=lift(joint, h_obj),
        T=lift(joint, t_obj),
        unveil=unveil_cp,
        classical=classical_structure(joint.objects, blocks),
        hhat=frozenset(h_obj),
        that=frozenset(t_obj),
        joint=joint,
    )


def swap_bob(p: BitCommitmentProtocol, perm: dict) -> Relation:
    """Graph of the automorphism of ``A⊗B`` relabelling Bob's points by ``perm``."""
    j = p.joint

    def move(m):
        fa, (b1, b2) = m
        return fa, (perm[b1], perm[b2])

    return Relation.from_function(j.carrier, j.carrier, move)


# ---------------------------------------------------------------------------
# monomorphisms


def _block(g: Groupoid, m) -> frozenset:
    return frozenset((m, g.inv[m], g.id_dom(m), g.id_cod(m)))


def is_monomorphism(u: CPMorphism) -> bool:
    """Injectivity of ``S ↦ u ∘ S`` on the states of the source.

    States are unions of blocks ``{g, g⁻¹, id_dom g, id_cod g}``; the map is
    injective iff no block's image is covered by the image of the largest
    state avoiding it.
    """
    g, rel = u.source, u.rel
    blocks = {m: _block(g, m) for m in g.morphisms}
    for m in g.morphisms:
        avoid = set()
        for other in g.morphisms:
            if m not in blocks[other]:
                avoid |= blocks[other]
        if rel.image_of(blocks[m]) <= rel.image_of(avoid):
            return False
    return True


def is_monomorphism_bruteforce(u: CPMorphism) -> bool:
    g = u.source
    seen = {}
    for mask in range(1 << len(g.morphisms)):
        s = g.carrier.subset(mask)
        if not is_state_subset(g, s):
            continue
        img = u.rel.image_of(s)
        if img in seen:
            return False
        seen[img] = s
    return True


# ---------------------------------------------------------------------------
# the three security properties


def check_sound(p: BitCommitmentProtocol) -> bool:
    u = p.unveil.rel
    return (
        rc.compose(p.state(p.H), u) == p.state(lift(p.joint, p.hhat))
        and rc.compose(p.state(p.T), u) == p.state(lift(p.joint, p.that))
    )


def bob_view(p: BitCommitmentProtocol, subset) -> Relation:
    """``(counit_A ⊗ id_B) ∘ state``: what Bob holds once Alice discards."""
    b = p.bob.carrier
    traced = rc.compose(p.state(subset), rc.tensor(discard(p.alice), rc.identity(b)))
    return rc.compose(traced, rc.left_unitor(b))


def check_concealing(p: BitCommitmentProtocol) -> bool:
    return bob_view(p, p.H) == bob_view(p, p.T)


def fibres(p: BitCommitmentProtocol, subset) -> dict:
    """Group a state of ``A⊗B`` by Bob's component: ``b ↦ {a : (a, b) ∈ state}``."""
    out = {b: set() for b in p.bob.morphisms}
    for a, b in subset:
        out[b].add(a)
    return {b: frozenset(v) for b, v in out.items()}


@dataclass
class BindingResult:
    verdict: str  # "binding" | "cheat" | "inconclusive"
    adversary: str
    cheat: Optional[Relation] = None
    candidates_examined: int = 0
    reason: str = ""

    @property
    def binding(self) -> Optional[bool]:
        return {"binding": True, "cheat": False}.get(self.verdict)


def apply_local(p: BitCommitmentProtocol, u: Relation, subset) -> frozenset:
    """``(u ⊗ id_B) ∘ state`` as a subset of ``Mor(A⊗B)``."""
    rel = rc.compose(p.state(subset), rc.tensor(u, rc.identity(p.bob.carrier)))
    return rel.subset


def _search_functions(p, hf, tf, bijective: bool, budget):
    alice = p.alice.morphisms
    domain = [a for a in alice if any(a in s for s in hf.values())]
    allowed = {}
    for a in domain:
        cands = set(alice)
        for b, s in hf.items():
            if a in s:
                cands &= tf[b]
        allowed[a] = [c for c in alice if c in cands]
    nodes = 0
    assign: dict = {}

    def complete() -> bool:
        for b in hf:
            if {assign[a] for a in hf[b]} != tf[b]:
                return False
        return True

    def rec(i: int):
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise BudgetExceeded(nodes)
        if i == len(domain):
            return dict(assign) if complete() else None
        a = domain[i]
        used = set(assign.values())
        for c in allowed[a]:
            if bijective and c in used:
                continue
            assign[a] = c
            got = rec(i + 1)
            if got is not None:
                return got
            del assign[a]
        return None

    found = rec(0)
    if found is None:
        return None, nodes
    rest = [a for a in alice if a not in found]
    if bijective:
        spare = [c for c in alice if c not in set(found.values())]
        found.update(zip(rest, spare))
    else:
        found.update((a, a) for a in rest)
    c = p.alice.carrier
    return Relation.from_function(c, c, found.__getitem__), nodes


def _search_relations(p, hf, tf, isometric: bool, budget):
    alice = p.alice.morphisms
    n = len(alice)
    idx = {m: i for i, m in enumerate(alice)}
    s = Solver(n * n)

    def var(a, c):
        return idx[a] * n + idx[c]

    for b in hf:
        for a in hf[b]:
            for c in alice:
                if c not in tf[b]:
                    s.forbid(var(a, c))
        for c in tf[b]:
            s.at_least_one(var(a, c) for a in hf[b])
    g = p.alice
    for a in alice:
        for c in alice:
            s.equiv(var(a, c), var(g.inv[a], g.inv[c]))
            s.implies(var(a, c), var(g.id_dom(a), g.id_dom(c)))
    if isometric:
        for a in alice:
            s.at_least_one(var(a, c) for c in alice)
        for c in alice:
            s.at_most_one(var(a, c) for a in alice)
    model = s.solve(budget)
    if model is None:
        return None, s.nodes
    pairs = [(a, c) for a in alice for c in alice if model[var(a, c)]]
    return Relation.from_pairs(g.carrier, g.carrier, pairs), s.nodes


def check_binding(p: BitCommitmentProtocol, adversary: str = "functions", budget: Optional[int] = None) -> BindingResult:
    """Search for ``u`` in the adversary class with ``(u ⊗ id_B) ∘ H = T``."""
    adv = adversary_name(adversary)
    hf, tf = fibres(p, p.H), fibres(p, p.T)
    if adv in ("functions", "bijections"):
        for b in p.bob.morphisms:
            if len(tf[b]) > len(hf[b]) or (hf[b] and not tf[b]):
                why = (
                    f"fibre over {p.bob.fmt(b)}: |T| = {len(tf[b])} vs |H| = {len(hf[b])};"
                    " a function cannot change that"
                )
                return BindingResult("binding", adv, None, 0, why)
    try:
        if adv in ("functions", "bijections"):
            u, nodes = _search_functions(p, hf, tf, adv == "bijections", budget)
        else:
            u, nodes = _search_relations(p, hf, tf, adv == "isometries", budget)
    except BudgetExceeded as exc:
        return BindingResult("inconclusive", adv, None, exc.nodes, f"budget of {budget} nodes exhausted")
    if u is None:
        return BindingResult("binding", adv, None, nodes, "search space exhausted")
    if apply_local(p, u, p.H) != p.T:
        raise AssertionError("cheat candidate does not reproduce T")
    return BindingResult("cheat", adv, u, nodes, "local map turns H into T")


def is_in_adversary_class(u: Relation, alice: Groupoid, adversary: str) -> bool:
    adv = adversary_name(adversary)
    if adv == "functions":
        return u.is_function()
    if adv == "bijections":
        return u.is_bijection()
    cp = is_inverse_respecting(u, alice, alice)
    if adv == "isometries":
        return cp and u.is_isometry()
    return cp


@dataclass
class SecurityReport:
    secure: bool
    invariant_violations: list
    sound: Optional[bool] = None
    concealing: Optional[bool] = None
    binding: Optional[BindingResult] = None
    bob_views: Optional[tuple] = None


def check_secure(p: BitCommitmentProtocol, adversary: str = "functions", budget: Optional[int] = None) -> SecurityReport:
    bad = p.invariant_violations()
    if bad:
        return SecurityReport(False, bad)
    sound = check_sound(p)
    views = (bob_view(p, p.H), bob_view(p, p.T))
    concealing = views[0] == views[1]
    binding = check_binding(p, adversary, budget)
    secure = sound and concealing and binding.verdict == "binding"
    return SecurityReport(secure, [], sound, concealing, binding, views)
