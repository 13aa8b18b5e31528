"""Finite groupoids and their special symmetric dagger Frobenius structures in Rel.

Composition convention: ``compose(g, h)`` is ``g ∘ h`` ("h first, then g")
and is defined iff ``cod(h) == dom(g)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations, product
from typing import Hashable, Iterable, Mapping, Sequence

from . import relcat as rc
from .relcat import UNIT, Carrier, Relation


class InvalidSpec(ValueError):
    """A groupoid description violates the groupoid axioms."""

    def __init__(self, message: str, entry=None):
        self.entry = entry
        if entry is not None:
            message = f"{message} (at {entry!r})"
        super().__init__(message)


class NotFrobenius(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("not a special symmetric dagger Frobenius structure: " + ", ".join(self.violations))


class NotClosed(ValueError):
    pass


def _tuplify(x):
    return tuple(_tuplify(e) for e in x) if isinstance(x, list) else x


def label(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(label(e) for e in x) + ")"
    return str(x)


class Groupoid:
    """A validated finite groupoid.

    ``table`` maps composable pairs ``(g, h)`` to ``g ∘ h``. Everything else
    (identities, inverses, hom-sets) is derived and checked on construction.
    """

    def __init__(
        self,
        objects: Sequence[Hashable],
        morphisms: Sequence[Hashable],
        dom: Mapping,
        cod: Mapping,
        table: Mapping,
        name: str = "",
        labels: Mapping | None = None,
    ):
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        self.dom = dict(dom)
        self.cod = dict(cod)
        self.table = dict(table)
        self.name = name
        if len(set(self.objects)) != len(self.objects):
            raise InvalidSpec("duplicate object")
        if len(set(self.morphisms)) != len(self.morphisms):
            raise InvalidSpec("duplicate morphism")
        self.labels = {m: (labels or {}).get(m) or label(m) for m in self.morphisms}
        if len(set(self.labels.values())) != len(self.labels):
            raise InvalidSpec("morphism labels are not unique")
        self._by_label = {v: k for k, v in self.labels.items()}
        self._validate()

    # -- construction-time checks ----------------------------------------

    def _validate(self) -> None:
        objs = set(self.objects)
        for m in self.morphisms:
            if m not in self.dom or m not in self.cod:
                raise InvalidSpec("morphism without dom/cod", m)
            if self.dom[m] not in objs or self.cod[m] not in objs:
                raise InvalidSpec("dangling dom/cod", m)
        morphs = set(self.morphisms)
        for (g, h), gh in self.table.items():
            if g not in morphs or h not in morphs or gh not in morphs:
                raise InvalidSpec("composition mentions unknown morphism", (g, h, gh))
            if self.cod[h] != self.dom[g]:
                raise InvalidSpec("composite of non-composable pair", (g, h, gh))
            if self.dom[gh] != self.dom[h] or self.cod[gh] != self.cod[g]:
                raise InvalidSpec("composite has wrong dom/cod", (g, h, gh))
        for g in self.morphisms:
            for h in self.morphisms:
                if self.cod[h] == self.dom[g] and (g, h) not in self.table:
                    raise InvalidSpec("composition undefined on composable pair", (g, h))

        ident = {}
        for x in self.objects:
            found = [
                e
                for e in self.morphisms
                if self.dom[e] == x
                and self.cod[e] == x
                and all(self.table[(e, h)] == h for h in self.morphisms if self.cod[h] == x)
                and all(self.table[(g, e)] == g for g in self.morphisms if self.dom[g] == x)
            ]
            if not found:
                raise InvalidSpec("object has no identity", x)
            ident[x] = found[0]
        self.ident = ident

        t = self.table
        for (g, h), gh in t.items():
            for k in self.morphisms:
                if self.cod[k] == self.dom[h] and t[(gh, k)] != t[(g, t[(h, k)])]:
                    raise InvalidSpec("composition is not associative", (g, h, k))

        inv = {}
        for g in self.morphisms:
            cands = [
                h
                for h in self.morphisms
                if self.dom[h] == self.cod[g]
                and self.cod[h] == self.dom[g]
                and t[(g, h)] == ident[self.cod[g]]
                and t[(h, g)] == ident[self.dom[g]]
            ]
            if not cands:
                raise InvalidSpec("morphism has no inverse", g)
            inv[g] = cands[0]
        self.inv = inv

    # -- basic accessors --------------------------------------------------

    def compose(self, g, h):
        """``g ∘ h`` or ``None`` when ``cod(h) != dom(g)``."""
        return self.table.get((g, h))

    def composable(self, g, h) -> bool:
        return self.cod[h] == self.dom[g]

    def id_dom(self, g):
        return self.ident[self.dom[g]]

    def id_cod(self, g):
        return self.ident[self.cod[g]]

    def is_identity(self, g) -> bool:
        return self.ident[self.dom[g]] == g

    @cached_property
    def identities(self) -> frozenset:
        return frozenset(self.ident.values())

    def hom(self, x, y) -> tuple:
        return tuple(m for m in self.morphisms if self.dom[m] == x and self.cod[m] == y)

    def endo(self, x) -> tuple:
        return self.hom(x, x)

    @cached_property
    def carrier(self) -> Carrier:
        return Carrier(self.morphisms)

    def lookup(self, ref):
        """Resolve a morphism given either itself or its printed label."""
        if ref in self.labels:
            return ref
        if isinstance(ref, (int, float)) and str(ref) in self._by_label:
            return self._by_label[str(ref)]
        if isinstance(ref, str) and ref in self._by_label:
            return self._by_label[ref]
        if isinstance(ref, list):
            return self.lookup(_tuplify(ref))
        raise KeyError(f"no morphism {ref!r} in {self.name or 'groupoid'}")

    def fmt(self, g) -> str:
        return self.labels[g]

    def __len__(self) -> int:
        return len(self.morphisms)

    def __repr__(self) -> str:
        return f"Groupoid({self.name or '?'}: {len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    @cached_property
    def frobenius(self) -> "FrobeniusData":
        return frobenius_of_groupoid(self)

    @cached_property
    def _key(self):
        ends = tuple((self.id_dom(m), self.id_cod(m)) for m in self.morphisms)
        tab = tuple(sorted(((g, h, gh) for (g, h), gh in self.table.items()), key=rc.sort_key))
        return self.morphisms, ends, tab

    def structure_key(self):
        """Morphism-level data; object names are forgotten (objects ≅ identities)."""
        return self._key

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, Groupoid) and self.structure_key() == other.structure_key()

    def __hash__(self) -> int:
        return hash(self.structure_key())

    # -- structural predicates ------------------------------------------

    def is_totally_disconnected(self) -> bool:
        return all(self.dom[m] == self.cod[m] for m in self.morphisms)

    def is_discrete(self) -> bool:
        return all(self.is_identity(m) for m in self.morphisms)

    def is_group(self) -> bool:
        return len(self.objects) == 1

    def is_commutative(self) -> bool:
        """Whether the Frobenius multiplication commutes."""
        for g in self.morphisms:
            for h in self.morphisms:
                if self.table.get((g, h)) != self.table.get((h, g)):
                    return False
        return True

    def components(self) -> list[frozenset]:
        """Connected components, as sets of objects, in object order."""
        seen: dict = {}
        comps: list[set] = []
        for x in self.objects:
            if x in seen:
                continue
            comp = {x}
            frontier = [x]
            while frontier:
                y = frontier.pop()
                for m in self.morphisms:
                    for a, b in ((self.dom[m], self.cod[m]), (self.cod[m], self.dom[m])):
                        if a == y and b not in comp:
                            comp.add(b)
                            frontier.append(b)
            for y in comp:
                seen[y] = len(comps)
            comps.append(comp)
        return [frozenset(c) for c in comps]


# ---------------------------------------------------------------------------
# constructors


def _one_object(name, elements, mul, labels=None) -> Groupoid:
    dom = {g: "*" for g in elements}
    table = {(g, h): mul(g, h) for g in elements for h in elements}
    return Groupoid(["*"], elements, dom, dict(dom), table, name=name, labels=labels)


def cyclic(n: int) -> Groupoid:
    if n < 1:
        raise InvalidSpec("cyclic group needs n >= 1", n)
    return _one_object(f"Z{n}", list(range(n)), lambda g, h: (g + h) % n)


def cycle_notation(perm: tuple) -> str:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            seen.add(start)
            continue
        cyc = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        cycles.append("(" + "".join(str(i + 1) for i in cyc) + ")")
    return "".join(cycles) or "e"


def symmetric(n: int) -> Groupoid:
    """S_n with elements named in cycle notation, e.g. ``"(12)"``, ``"e"``."""
    if n < 1:
        raise InvalidSpec("symmetric group needs n >= 1", n)
    perms = sorted(permutations(range(n)), key=lambda p: (sum(a != b for a, b in zip(p, range(n))), p))
    names = {p: cycle_notation(p) for p in perms}
    back = {v: k for k, v in names.items()}

    def mul(g, h):
        pg, ph = back[g], back[h]
        return names[tuple(pg[ph[i]] for i in range(n))]

    return _one_object(f"S{n}", [names[p] for p in perms], mul)


def cayley(elements: Sequence, table: Sequence[Sequence], name: str = "group") -> Groupoid:
    """One-object groupoid from a Cayley table: ``table[i][j] = elements[i] ∘ elements[j]``."""
    elements = list(elements)
    if len(table) != len(elements) or any(len(row) != len(elements) for row in table):
        raise InvalidSpec("Cayley table must be square over the elements")
    lookup = {}
    for i, g in enumerate(elements):
        for j, h in enumerate(elements):
            if table[i][j] not in elements:
                raise InvalidSpec("Cayley entry outside the element list", (g, h, table[i][j]))
            lookup[(g, h)] = table[i][j]
    return _one_object(name, elements, lambda g, h: lookup[(g, h)])


def indiscrete(objects: int | Sequence) -> Groupoid:
    """Exactly one arrow ``(a, b): a -> b`` between every ordered pair of objects."""
    objs = list(range(objects)) if isinstance(objects, int) else list(objects)
    morphisms = [(a, b) for a in objs for b in objs]
    dom = {m: m[0] for m in morphisms}
    cod = {m: m[1] for m in morphisms}
    table = {((b, c), (a, b2)): (a, c) for (b, c) in morphisms for (a, b2) in morphisms if b2 == b}
    return Groupoid(objs, morphisms, dom, cod, table, name=f"indiscrete({len(objs)})")


def discrete(objects: int | Sequence) -> Groupoid:
    objs = list(range(objects)) if isinstance(objects, int) else list(objects)
    morphisms = [(x, x) for x in objs]
    dom = {m: m[0] for m in morphisms}
    table = {(m, m): m for m in morphisms}
    return Groupoid(objs, morphisms, dom, dict(dom), table, name=f"discrete({len(objs)})")


def unit_groupoid() -> Groupoid:
    """The tensor unit of CP*[Rel]: one object, one morphism ``*``."""
    return Groupoid(["*"], ["*"], {"*": "*"}, {"*": "*"}, {("*", "*"): "*"}, name="I")


def union(parts: Sequence[Groupoid], name: str | None = None) -> Groupoid:
    """Disjoint union; part ``k``'s morphism ``m`` becomes ``(k, m)``, labelled ``k.m``."""
    objects, morphisms, dom, cod, table, labels = [], [], {}, {}, {}, {}
    for k, p in enumerate(parts):
        objects += [(k, x) for x in p.objects]
        for m in p.morphisms:
            tm = (k, m)
            morphisms.append(tm)
            dom[tm] = (k, p.dom[m])
            cod[tm] = (k, p.cod[m])
            labels[tm] = f"{k}.{p.fmt(m)}"
        for (g, h), gh in p.table.items():
            table[((k, g), (k, h))] = (k, gh)
    name = name or "⊔".join(p.name for p in parts)
    return Groupoid(objects, morphisms, dom, cod, table, name=name, labels=labels)


def product_groupoid(a: Groupoid, b: Groupoid) -> Groupoid:
    """``A ⊗ B`` in CP*[Rel]: componentwise structure on pairs of morphisms."""
    objects = list(product(a.objects, b.objects))
    morphisms = list(product(a.morphisms, b.morphisms))
    dom = {(f, g): (a.dom[f], b.dom[g]) for f, g in morphisms}
    cod = {(f, g): (a.cod[f], b.cod[g]) for f, g in morphisms}
    table = {
        ((f1, g1), (f2, g2)): (a.table[(f1, f2)], b.table[(g1, g2)])
        for (f1, f2) in a.table
        for (g1, g2) in b.table
    }
    labels = {(f, g): f"({a.fmt(f)},{b.fmt(g)})" for f, g in morphisms}
    return Groupoid(objects, morphisms, dom, cod, table, name=f"{a.name}⊗{b.name}", labels=labels)


def explicit(
    objects: Sequence,
    morphisms: Sequence[tuple],
    compose: Iterable[Sequence],
    identities: Mapping | None = None,
    name: str = "explicit",
) -> Groupoid:
    """Groupoid from ``(id, dom, cod)`` triples and ``[g, h, g∘h]`` triples.

    Composites with identities may be omitted; identities are the given ones
    or, failing that, the idempotent endomorphisms.
    """
    ids = [m[0] for m in morphisms]
    dom = {m[0]: m[1] for m in morphisms}
    cod = {m[0]: m[2] for m in morphisms}
    objs = list(objects)
    for m in morphisms:
        if len(m) != 3:
            raise InvalidSpec("morphism entries are (id, dom, cod)", m)
        if m[1] not in objs or m[2] not in objs:
            raise InvalidSpec("dangling dom/cod", m[0])
    table = {}
    for entry in compose:
        if len(entry) != 3:
            raise InvalidSpec("compose entries are [g, h, g∘h]", entry)
        g, h, gh = entry
        if (g, h) in table and table[(g, h)] != gh:
            raise InvalidSpec("conflicting composites", entry)
        for z in entry:
            if z not in dom:
                raise InvalidSpec("compose mentions unknown morphism", entry)
        table[(g, h)] = gh
    if identities is None:
        identities = {}
        for x in objs:
            idem = [e for e in ids if dom[e] == x and cod[e] == x and table.get((e, e)) == e]
            if len(idem) != 1:
                raise InvalidSpec("cannot infer a unique identity", x)
            identities[x] = idem[0]
    for x, e in identities.items():
        if e not in dom or dom[e] != x or cod[e] != x:
            raise InvalidSpec("identity has wrong dom/cod", (x, e))
        for m in ids:
            if cod[m] == x:
                table.setdefault((e, m), m)
            if dom[m] == x:
                table.setdefault((m, e), m)
    return Groupoid(objs, ids, dom, cod, table, name=name)


# ---------------------------------------------------------------------------
# Frobenius structures


@dataclass(frozen=True)
class FrobeniusData:
    carrier: Carrier
    mult: Relation
    unit: Relation

    @property
    def comult(self) -> Relation:
        return self.mult.dagger

    @property
    def counit(self) -> Relation:
        return self.unit.dagger


def frobenius_of_groupoid(g: Groupoid) -> FrobeniusData:
    c = g.carrier
    mult = Relation.from_pairs(c * c, c, (((a, b), ab) for (a, b), ab in g.table.items()))
    unit = Relation.state(c, g.identities)
    return FrobeniusData(c, mult, unit)


FROBENIUS_AXIOMS = ("associativity", "unit", "frobenius", "symmetry", "speciality")


def verify_frobenius(fd: FrobeniusData) -> list[str]:
    """Names of the violated axioms (empty iff special symmetric dagger Frobenius)."""
    a = fd.carrier
    one = rc.identity(a)
    m, u = fd.mult, fd.unit
    d, e = fd.comult, fd.counit
    bad = []

    lhs = rc.compose(rc.tensor(m, one), m)
    rhs = rc.compose(rc.associator(a, a, a), rc.compose(rc.tensor(one, m), m))
    if lhs != rhs:
        bad.append("associativity")

    left = rc.compose(rc.tensor(u, one), m)
    right = rc.compose(rc.tensor(one, u), m)
    if left != rc.left_unitor(a) or right != rc.right_unitor(a):
        bad.append("unit")

    middle = rc.compose(m, d)  # G×G -> G -> G×G
    z1 = rc.compose(rc.compose(rc.tensor(d, one), rc.associator(a, a, a)), rc.tensor(one, m))
    z2 = rc.compose(rc.compose(rc.tensor(one, d), rc.associator(a, a, a).dagger), rc.tensor(m, one))
    if z1 != middle or z2 != middle:
        bad.append("frobenius")

    pairing = rc.compose(m, e)
    if rc.compose(rc.swap(a, a), pairing) != pairing:
        bad.append("symmetry")

    if rc.compose(d, m) != one:
        bad.append("speciality")
    return bad


def groupoid_from_frobenius(fd: FrobeniusData, name: str = "") -> Groupoid:
    """Recover the groupoid; objects are named by their identity morphisms."""
    bad = verify_frobenius(fd)
    if bad:
        raise NotFrobenius(bad)
    mult = fd.mult
    table = {}
    for (pair, gh) in mult.pairs():
        if pair in table:
            raise NotFrobenius(["multiplication is not a partial function"])
        table[pair] = gh
    idents = fd.unit.subset
    dom, cod = {}, {}
    for g in fd.carrier:
        d = [e for e in idents if table.get((g, e)) == g]
        c = [e for e in idents if table.get((e, g)) == g]
        if len(d) != 1 or len(c) != 1:
            raise NotFrobenius(["unit does not pick out a unique identity per morphism"])
        dom[g], cod[g] = d[0], c[0]
    objects = [e for e in fd.carrier if e in idents]
    return Groupoid(objects, fd.carrier.elements, dom, cod, table, name=name)


# ---------------------------------------------------------------------------
# subgroupoids


@dataclass(frozen=True)
class SubgroupoidRef:
    parent: Groupoid
    morphisms: frozenset

    def __post_init__(self):
        object.__setattr__(self, "morphisms", frozenset(self.morphisms))
        unknown = [m for m in self.morphisms if m not in self.parent.labels]
        if unknown:
            raise KeyError(f"not morphisms of the parent: {unknown!r}")

    @property
    def objects(self) -> frozenset:
        p = self.parent
        return frozenset(p.dom[m] for m in self.morphisms) | frozenset(p.cod[m] for m in self.morphisms)

    def closure_violation(self):
        """First closure failure found, or ``None``."""
        p, s = self.parent, self.morphisms
        for m in sorted(s, key=p.morphisms.index):
            if p.inv[m] not in s:
                return ("inverse", m)
            if p.id_dom(m) not in s or p.id_cod(m) not in s:
                return ("identity", m)
            for k in s:
                gk = p.table.get((m, k))
                if gk is not None and gk not in s:
                    return ("composite", (m, k))
        return None

    def is_closed(self) -> bool:
        return self.closure_violation() is None

    def require_closed(self) -> None:
        bad = self.closure_violation()
        if bad is not None:
            raise NotClosed(f"subset not closed under {bad[0]}: {bad[1]!r}")

    def ordered(self) -> tuple:
        return tuple(m for m in self.parent.morphisms if m in self.morphisms)

    def to_groupoid(self) -> Groupoid:
        self.require_closed()
        p = self.parent
        ms = self.ordered()
        objs = [x for x in p.objects if x in self.objects]
        table = {(g, h): gh for (g, h), gh in p.table.items() if g in self.morphisms and h in self.morphisms}
        return Groupoid(
            objs,
            ms,
            {m: p.dom[m] for m in ms},
            {m: p.cod[m] for m in ms},
            table,
            name=f"sub({p.name})",
            labels={m: p.labels[m] for m in ms},
        )

    def inclusion(self) -> Relation:
        """Graph of the inclusion ``Mor(sub) -> Mor(parent)``."""
        return Relation.from_pairs(Carrier(self.ordered()), self.parent.carrier, ((m, m) for m in self.ordered()))


def closure(g: Groupoid, generators: Iterable) -> SubgroupoidRef:
    """Smallest subgroupoid containing ``generators``."""
    s = set(generators)
    frontier = list(s)
    while frontier:
        new = []
        for m in frontier:
            for extra in (g.inv[m], g.id_dom(m), g.id_cod(m)):
                if extra not in s:
                    s.add(extra)
                    new.append(extra)
        for a in list(s):
            for b in list(s):
                ab = g.table.get((a, b))
                if ab is not None and ab not in s:
                    s.add(ab)
                    new.append(ab)
        frontier = new
    return SubgroupoidRef(g, frozenset(s))


def wide_closure(g: Groupoid, generators: Iterable) -> SubgroupoidRef:
    return closure(g, list(generators) + list(g.identities))


def is_wide_subgroupoid(h: SubgroupoidRef) -> bool:
    h.require_closed()
    return h.objects == frozenset(h.parent.objects)


def is_totally_disconnected(g: Groupoid) -> bool:
    return g.is_totally_disconnected()


def subgroupoids(g: Groupoid, wide_only: bool = False) -> list[SubgroupoidRef]:
    """All nonempty subgroupoids, generated by adjoining one morphism at a time."""
    order = {m: i for i, m in enumerate(g.morphisms)}
    start = [closure(g, [m]).morphisms for m in g.morphisms]
    seen = set(start)
    frontier = list(seen)
    while frontier:
        new = []
        for s in frontier:
            for m in g.morphisms:
                if m in s:
                    continue
                t = closure(g, set(s) | {m}).morphisms
                if t not in seen:
                    seen.add(t)
                    new.append(t)
        frontier = new
    subs = [SubgroupoidRef(g, s) for s in seen]
    if wide_only:
        objs = frozenset(g.objects)
        subs = [s for s in subs if s.objects == objs]
    return sorted(subs, key=lambda s: (len(s.morphisms), sorted(order[m] for m in s.morphisms)))
