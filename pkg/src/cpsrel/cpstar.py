"""CP*[Rel]: groupoids with inverse-respecting relations, and the decision
procedures built on them (broadcasting, copyable states, entanglement,
measurements, causality, kinematic independence, no-signalling).

Every check here is exact set equality; there are no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Optional, Sequence

from . import relcat as rc
from .groupoid import (
    Groupoid,
    NotClosed,
    SubgroupoidRef,
    discrete,
    frobenius_of_groupoid,
    product_groupoid,
    unit_groupoid,
)
from .relcat import UNIT, Carrier, CarrierMismatch, Relation
from .search import Solver


class NotInverseRespecting(ValueError):
    pass


class NotTotallyDisconnected(ValueError):
    pass


class NotSubsystem(ValueError):
    pass


class InvalidMeasurement(ValueError):
    pass


_UNIT_GROUPOID = unit_groupoid()


# ---------------------------------------------------------------------------
# morphisms of CP*[Rel]


def _check_carriers(r: Relation, src: Groupoid, tgt: Groupoid) -> None:
    if r.source != src.carrier or r.target != tgt.carrier:
        raise CarrierMismatch("relation carriers must be the morphism sets of the groupoids")


def inverse_respecting_violation(r: Relation, src: Groupoid, tgt: Groupoid):
    """First pair breaking either defining condition, as ``(condition, pair)``."""
    _check_carriers(r, src, tgt)
    for g, h in r.pairs():
        if (src.inv[g], tgt.inv[h]) not in r:
            return "inverses", (g, h)
        if (src.id_dom(g), tgt.id_dom(h)) not in r:
            return "identities", (g, h)
    return None


def is_inverse_respecting(r: Relation, src: Groupoid, tgt: Groupoid) -> bool:
    return inverse_respecting_violation(r, src, tgt) is None


@dataclass(frozen=True)
class CPMorphism:
    source: Groupoid
    target: Groupoid
    rel: Relation

    def __post_init__(self):
        bad = inverse_respecting_violation(self.rel, self.source, self.target)
        if bad is not None:
            raise NotInverseRespecting(f"{bad[0]} condition fails at {bad[1]!r}")

    def then(self, other: "CPMorphism") -> "CPMorphism":
        if self.target != other.source:
            raise CarrierMismatch("groupoids do not match")
        return CPMorphism(self.source, other.target, rc.compose(self.rel, other.rel))

    def __eq__(self, other) -> bool:
        return isinstance(other, CPMorphism) and self.rel == other.rel

    def __hash__(self) -> int:
        return hash(self.rel)

    @property
    def subset(self) -> frozenset:
        return self.rel.subset


def identity(g: Groupoid) -> CPMorphism:
    return CPMorphism(g, g, rc.identity(g.carrier))


def state(g: Groupoid, subset: Iterable) -> CPMorphism:
    """A state ``I -> G``: the subset must be closed under inverses and domain identities."""
    rel = Relation(_UNIT_GROUPOID.carrier, g.carrier, (g.carrier.mask(subset),))
    return CPMorphism(_UNIT_GROUPOID, g, rel)


def is_state_subset(g: Groupoid, subset: Iterable) -> bool:
    s = set(subset)
    return all(g.inv[m] in s and g.id_dom(m) in s for m in s)


def discard(g: Groupoid) -> Relation:
    """The counit ``G -> I`` (relates every identity to ``*``)."""
    return Relation(g.carrier, UNIT, tuple(int(g.is_identity(m)) for m in g.morphisms))


# ---------------------------------------------------------------------------
# *-homomorphisms and subsystems


def star_homomorphism_violation(r: Relation, src: Groupoid, tgt: Groupoid):
    _check_carriers(r, src, tgt)
    R = {g: r.image(g) for g in src.morphisms}
    for g in src.morphisms:
        if R[src.inv[g]] != frozenset(tgt.inv[h] for h in R[g]):
            return "inverses", g
    for (g, h), gh in src.table.items():
        prod_set = frozenset(
            x for a in R[g] for b in R[h] if (x := tgt.table.get((a, b))) is not None
        )
        if R[gh] != prod_set:
            return "multiplicative", (g, h)
    units = frozenset().union(*(R[e] for e in src.identities)) if src.identities else frozenset()
    if units != tgt.identities:
        return "unital", None
    return None


def is_star_homomorphism(r: Relation, src: Groupoid, tgt: Groupoid) -> bool:
    """Set-wise unital *-homomorphism conditions (multiplicativity on composable pairs)."""
    return star_homomorphism_violation(r, src, tgt) is None


def is_subsystem(h: SubgroupoidRef) -> bool:
    """Wide-ness, cross-checked against isometry + *-homomorphism of the inclusion."""
    h.require_closed()
    wide = h.objects == frozenset(h.parent.objects)
    incl = h.inclusion()
    algebraic = incl.is_isometry() and is_star_homomorphism(incl, h.to_groupoid(), h.parent)
    if wide != algebraic:
        raise AssertionError(f"subsystem characterisation disagrees on {sorted(h.morphisms, key=rc.sort_key)!r}")
    return wide


@dataclass(frozen=True)
class Subsystem:
    sub: SubgroupoidRef
    inclusion: CPMorphism

    @classmethod
    def of(cls, sub: SubgroupoidRef) -> "Subsystem":
        try:
            ok = is_subsystem(sub)
        except NotClosed as exc:
            raise NotSubsystem(str(exc)) from exc
        if not ok:
            raise NotSubsystem("subgroupoid is not wide")
        g = sub.to_groupoid()
        return cls(sub, CPMorphism(g, sub.parent, sub.inclusion()))

    @property
    def parent(self) -> Groupoid:
        return self.sub.parent

    @property
    def groupoid(self) -> Groupoid:
        return self.inclusion.source

    @property
    def morphisms(self) -> tuple:
        return self.groupoid.morphisms


# ---------------------------------------------------------------------------
# copyable states


def is_copyable(g: Groupoid, subset: Iterable) -> bool:
    """``comult ∘ s = s ⊗ s`` exactly."""
    fd = g.frobenius
    s = Relation.state(g.carrier, subset)
    copied = rc.compose(s, fd.comult)
    doubled = rc.compose(rc.left_unitor(UNIT).dagger, rc.tensor(s, s))
    return copied == doubled


def _inverse_orbits(g: Groupoid, ms: Sequence) -> list[tuple]:
    seen, out = set(), []
    for m in ms:
        if m in seen:
            continue
        orb = (m,) if g.inv[m] == m else (m, g.inv[m])
        seen.update(orb)
        out.append(orb)
    return out


def copyable_states(g: Groupoid, stats: Optional[dict] = None) -> list[frozenset]:
    """Nonempty states duplicated exactly by the comultiplication.

    ``s ⊗ s ⊆ comult ∘ s`` makes every pair in ``s`` composable, so a
    candidate sits inside one endo-hom-set ``G(x, x)`` and contains ``id_x``;
    only inverse-closed subsets of those are enumerated.
    """
    found, examined = [], 0
    for x in g.objects:
        rest = [m for m in g.endo(x) if m != g.ident[x]]
        orbits = _inverse_orbits(g, rest)
        for k in range(len(orbits) + 1):
            for pick in combinations(orbits, k):
                cand = frozenset([g.ident[x], *[m for orb in pick for m in orb]])
                examined += 1
                if is_copyable(g, cand):
                    found.append(cand)
    if stats is not None:
        stats["candidates_examined"] = examined
    return found


def copyable_states_bruteforce(g: Groupoid) -> list[frozenset]:
    """Oracle: test the copying equation on every nonempty subset."""
    ms = g.morphisms
    out = []
    for mask in range(1, 1 << len(ms)):
        cand = frozenset(ms[i] for i in rc.bits(mask))
        if is_copyable(g, cand):
            out.append(cand)
    return out


# ---------------------------------------------------------------------------
# broadcasting


def marginals(g: Groupoid, b: Relation) -> tuple[Relation, Relation]:
    """``(counit ⊗ id) ∘ b`` and ``(id ⊗ counit) ∘ b`` as relations ``G -> G``."""
    c = g.carrier
    if b.source != c or b.target != c * c:
        raise CarrierMismatch("broadcast candidate must be G -> G×G")
    eps = discard(g)
    one = rc.identity(c)
    left = rc.compose(rc.compose(b, rc.tensor(eps, one)), rc.left_unitor(c))
    right = rc.compose(rc.compose(b, rc.tensor(one, eps)), rc.right_unitor(c))
    return left, right


def is_broadcasting_map(g: Groupoid, b: CPMorphism | Relation) -> bool:
    """A CP* morphism ``G -> G⊗G`` whose two counit marginals are the identity.

    The marginal equations alone hold for any comultiplication (counit law);
    membership in CP*[Rel] is what excludes the noncommutative ones.
    """
    rel = b.rel if isinstance(b, CPMorphism) else b
    if not isinstance(b, CPMorphism) and not is_inverse_respecting(rel, g, _square(g)):
        return False
    left, right = marginals(g, rel)
    one = rc.identity(g.carrier)
    return left == one and right == one


def _square(g: Groupoid) -> Groupoid:
    return product_groupoid(g, g)


def canonical_broadcast_map(g: Groupoid) -> CPMorphism:
    """``{(f, (id_dom f, f))} ∪ {(f, (f, id_dom f))}``."""
    if not g.is_totally_disconnected():
        raise NotTotallyDisconnected(f"{g.name or 'groupoid'} has a non-endomorphism")
    c = g.carrier
    pairs = [(f, (g.id_dom(f), f)) for f in g.morphisms] + [(f, (f, g.id_dom(f))) for f in g.morphisms]
    return CPMorphism(g, _square(g), Relation.from_pairs(c, c * c, pairs))


def search_broadcasting_map(g: Groupoid, budget: Optional[int] = None) -> tuple[Optional[Relation], int]:
    """Constraint search over inverse-respecting ``B ⊆ G × (G×G)`` with identity marginals.

    Returns the lexicographically least map found (or ``None``) and the
    number of search nodes.
    """
    ms = g.morphisms
    n = len(ms)
    idx = {m: i for i, m in enumerate(ms)}
    ids = [m for m in ms if g.is_identity(m)]

    def var(f, p, q) -> int:
        return (idx[f] * n + idx[p]) * n + idx[q]

    s = Solver(n * n * n)
    for f in ms:
        for other in ms:
            if other == f:
                continue
            for e in ids:
                s.forbid(var(f, e, other))
                s.forbid(var(f, other, e))
        s.at_least_one(var(f, e, f) for e in ids)
        s.at_least_one(var(f, f, e) for e in ids)
    for f, p, q in product(ms, ms, ms):
        v = var(f, p, q)
        s.equiv(v, var(g.inv[f], g.inv[p], g.inv[q]))
        s.implies(v, var(g.id_dom(f), g.id_dom(p), g.id_dom(q)))
    model = s.solve(budget)
    if model is None:
        return None, s.nodes
    c = g.carrier
    pairs = [(f, (p, q)) for f, p, q in product(ms, ms, ms) if model[var(f, p, q)]]
    return Relation.from_pairs(c, c * c, pairs), s.nodes


@dataclass
class BroadcastDecision:
    broadcastable: bool
    map: Optional[CPMorphism]
    reason: str
    search_confirms: Optional[bool] = None
    candidates_examined: int = 0

    def __bool__(self) -> bool:
        return self.broadcastable


def decide_broadcastable(g: Groupoid, exhaustive_limit: int = 16, budget: Optional[int] = None) -> BroadcastDecision:
    td = g.is_totally_disconnected()
    if td:
        decision = BroadcastDecision(True, canonical_broadcast_map(g), "totally disconnected: canonical map")
    else:
        bad = next(m for m in g.morphisms if g.dom[m] != g.cod[m])
        decision = BroadcastDecision(
            False, None, f"morphism {g.fmt(bad)} is not an endomorphism"
        )
    if len(g.morphisms) <= exhaustive_limit:
        found, nodes = search_broadcasting_map(g, budget)
        decision.candidates_examined = nodes
        if found is not None:
            # independent re-check of whatever the search produced
            ok = is_inverse_respecting(found, g, _square(g)) and is_broadcasting_map(g, found)
            decision.search_confirms = td and ok
        else:
            decision.search_confirms = not td
        if not decision.search_confirms:
            raise AssertionError(f"constraint search disagrees with total disconnectedness on {g.name}")
    return decision


def is_biproduct_of_units(g: Groupoid) -> bool:
    return g.is_discrete()


# ---------------------------------------------------------------------------
# entanglement


@dataclass(frozen=True)
class EntanglementResult:
    entangled: bool
    witness: Optional[tuple] = None

    @property
    def verdict(self) -> str:
        return "entangled" if self.entangled else "product-compatible"


def entanglement_witness(r: CPMorphism) -> EntanglementResult:
    """Least pair violating ``(a,b) ∈ R ⟹ (id_dom a, id_cod b) ∈ R``."""
    a, b, rel = r.source, r.target, r.rel
    for x, y in rel.pairs():
        if (a.id_dom(x), b.id_cod(y)) not in rel:
            return EntanglementResult(True, (x, y))
    return EntanglementResult(False)


def state_entanglement_witness(psi: CPMorphism, a: Groupoid, b: Groupoid) -> EntanglementResult:
    """Same test for a state ``I -> A ⊗ B``, via its name ``A -> B``."""
    rel = rc.unname(psi.rel, a.carrier, b.carrier)
    return entanglement_witness(CPMorphism(a, b, rel))


# ---------------------------------------------------------------------------
# measurements


@dataclass(frozen=True)
class Measurement:
    groupoid: Groupoid
    parts: tuple

    def __post_init__(self):
        parts = tuple(frozenset(p) for p in self.parts)
        if not parts:
            raise InvalidMeasurement("a measurement needs at least one outcome")
        seen: set = set()
        for i, p in enumerate(parts):
            if not p:
                raise InvalidMeasurement(f"outcome {i} has an empty part")
            for m in p:
                if m not in self.groupoid.labels:
                    raise InvalidMeasurement(f"{m!r} is not a morphism")
            if seen & p:
                raise InvalidMeasurement(f"outcome {i} overlaps an earlier part")
            seen |= p
        object.__setattr__(self, "parts", parts)

    def embedding(self) -> Relation:
        """``E: X -> G`` relating outcome ``i`` to each element of ``E_i``."""
        x = Carrier(tuple(range(len(self.parts))))
        return Relation.from_pairs(x, self.groupoid.carrier, ((i, m) for i, p in enumerate(self.parts) for m in p))


def measurement_rel(m: Measurement) -> CPMorphism:
    """``f ~ k`` iff ``k = g⁻¹ ∘ f ∘ h`` for some ``g, h`` in a common part."""
    G = m.groupoid
    pairs = set()
    for part in m.parts:
        for gg in part:
            ginv = G.inv[gg]
            for h in part:
                for f in G.morphisms:
                    fh = G.table.get((f, h))
                    if fh is None:
                        continue
                    k = G.table.get((ginv, fh))
                    if k is not None:
                        pairs.add((f, k))
    return CPMorphism(G, G, Relation.from_pairs(G.carrier, G.carrier, pairs))


def measurement_rel_oracle(m: Measurement) -> Relation:
    """``f ~ k`` iff ``∃ (g, h) ∈ E ∘ E†`` with ``g ∘ k = f ∘ h``."""
    G = m.groupoid
    e = m.embedding()
    eed = rc.compose(e.dagger, e)
    pairs = set()
    for gg, h in eed.pairs():
        for f in G.morphisms:
            fh = G.table.get((f, h))
            if fh is None:
                continue
            for k in G.morphisms:
                if G.table.get((gg, k)) == fh:
                    pairs.add((f, k))
    return Relation.from_pairs(G.carrier, G.carrier, pairs)


def outcome_groupoid(m: Measurement) -> Groupoid:
    return discrete(len(m.parts))


def destructive(m: Measurement) -> Relation:
    """``G -> X``: ``f`` yields outcome ``i`` iff ``f = g ∘ h⁻¹`` with ``g, h ∈ E_i``."""
    G = m.groupoid
    x = outcome_groupoid(m)
    pairs = set()
    for i, part in enumerate(m.parts):
        for gg in part:
            for h in part:
                f = G.table.get((gg, G.inv[h]))
                if f is not None:
                    pairs.add((f, (i, i)))
    return Relation.from_pairs(G.carrier, x.carrier, pairs)


def is_causal(m: Measurement) -> bool:
    """``counit_X ∘ destructive(m) = counit_G``."""
    lhs = rc.compose(destructive(m), discard(outcome_groupoid(m)))
    return lhs == discard(m.groupoid)


def is_causal_family(g: Groupoid, parts: Sequence[Iterable]) -> bool:
    """Fast equivalent of :func:`is_causal`: parts never repeat a domain, all objects covered."""
    covered = set()
    for p in parts:
        doms = [g.dom[x] for x in p]
        if len(set(doms)) != len(doms):
            return False
        covered.update(g.cod[x] for x in p)
    return covered == set(g.objects)


# ---------------------------------------------------------------------------
# kinematic independence and no-signalling


def _require_subsystems(g: Groupoid, *subs) -> list[Subsystem]:
    out = []
    for s in subs:
        if isinstance(s, SubgroupoidRef):
            s = Subsystem.of(s)
        if not isinstance(s, Subsystem) or s.parent != g:
            raise NotSubsystem("expected a subsystem of the given groupoid")
        out.append(s)
    return out


def _ki_characterised(g: Groupoid, A: Groupoid, B: Groupoid) -> bool:
    if not (A.is_totally_disconnected() and B.is_totally_disconnected()):
        return False
    for x in g.objects:
        for a in A.endo(x):
            for b in B.endo(x):
                if g.table[(a, b)] != g.table[(b, a)]:
                    return False
    return True


def _ki_raw(g: Groupoid, A: Groupoid, B: Groupoid) -> bool:
    for a in A.morphisms:
        for b in B.morphisms:
            if g.table.get((a, b)) != g.table.get((b, a)):
                return False
    return True


def kinematic_independence(g: Groupoid, a, b) -> bool:
    sa, sb = _require_subsystems(g, a, b)
    char = _ki_characterised(g, sa.groupoid, sb.groupoid)
    raw = _ki_raw(g, sa.groupoid, sb.groupoid)
    if char != raw:
        raise AssertionError("kinematic independence: characterisation and raw commutation disagree")
    return char


def _reach(g: Groupoid, parts: Sequence[Iterable], b) -> set:
    """``{h⁻¹ ∘ b ∘ k : h, k in a common part, composites defined}``."""
    out = set()
    for part in parts:
        part = tuple(part)
        for k in part:
            bk = g.table.get((b, k))
            if bk is None:
                continue
            for h in part:
                x = g.table.get((g.inv[h], bk))
                if x is not None:
                    out.add(x)
    return out


def family_violation(g: Groupoid, parts: Sequence[Iterable], others: Sequence):
    """First ``(b, g', kind)`` breaking ``b = g' ⟺ ∃i ∃h,k ∈ E_i: g' = h⁻¹ ∘ b ∘ k``."""
    order = {m: i for i, m in enumerate(g.morphisms)}
    for b in others:
        r = _reach(g, parts, b)
        if b not in r:
            return b, b, "=>"
        extra = sorted(r - {b}, key=order.__getitem__)
        if extra:
            return b, extra[0], "<="
    return None


def set_partitions(items: Sequence) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [(first,)] + part
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1 :]


def all_families(ms: Sequence) -> Iterator[list[tuple]]:
    """Every family of disjoint nonempty subsets (at least one part)."""
    ms = list(ms)
    for k in range(1, len(ms) + 1):
        for support in combinations(ms, k):
            yield from set_partitions(list(support))


def reduced_families(sub: Groupoid, causal_only: bool) -> Iterator[list[tuple]]:
    """Refutation-complete family class.

    A "<=" failure lives inside one part ``{h, k}``; a "=>" failure survives
    shrinking the family. Without causality the one-part families ``{h}``
    and ``{h, k}`` suffice. With causality, "=>" is caught by singleton
    sections (one morphism into each object) and "<=" by a part of size ≤ 2
    padded with identity singletons for the uncovered objects.
    """
    ms = sub.morphisms
    if not causal_only:
        for h in ms:
            yield [(h,)]
        for h, k in combinations(ms, 2):
            yield [(h, k)]
        return
    into = [[m for m in ms if sub.cod[m] == x] for x in sub.objects]
    for pick in product(*into):
        yield [(m,) for m in pick]
    small = [(h,) for h in ms] + [(h, k) for h, k in combinations(ms, 2) if sub.dom[h] != sub.dom[k]]
    for part in small:
        covered = {sub.cod[m] for m in part}
        yield [part] + [(sub.ident[x],) for x in sub.objects if x not in covered]


@dataclass
class NSResult:
    no_signalling: bool
    witness: Optional[dict] = None
    families_examined: int = 0

    def __bool__(self) -> bool:
        return self.no_signalling


def no_signalling_search(
    g: Groupoid,
    a,
    b,
    causal_only: bool = True,
    full: bool = False,
    full_limit: int = 4,
) -> NSResult:
    sa, sb = _require_subsystems(g, a, b)
    examined = 0
    for role, (meas, other) in (("A", (sa, sb)), ("B", (sb, sa))):
        sub = meas.groupoid
        if full:
            if len(sub.morphisms) > full_limit:
                raise ValueError(f"full family enumeration limited to {full_limit} morphisms")
            fams: Iterable = all_families(sub.morphisms)
        else:
            fams = reduced_families(sub, causal_only)
        for parts in fams:
            if causal_only and not is_causal_family(sub, parts):
                continue
            examined += 1
            bad = family_violation(g, parts, other.morphisms)
            if bad is not None:
                bb, gg, kind = bad
                return NSResult(
                    False,
                    {"measured": role, "family": [list(p) for p in parts], "b": bb, "g": gg, "direction": kind},
                    examined,
                )
    return NSResult(True, None, examined)


def no_signalling(g: Groupoid, a, b, causal_only: bool = True, **kw) -> bool:
    return no_signalling_search(g, a, b, causal_only, **kw).no_signalling
