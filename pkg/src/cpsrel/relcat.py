"""Exact calculus of finite relations.

Relations are stored as one bitset (a Python ``int``) per source element:
bit ``j`` of ``rows[i]`` is set iff ``(source[i], target[j])`` is related.
Composition, tensor and dagger are then word-level operations, and equality
is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Hashable, Iterable, Iterator


class CarrierMismatch(ValueError):
    pass


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, eq=False)
class Carrier:
    """An ordered finite set. Order fixes printing and bit positions."""

    elements: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        index = {x: i for i, x in enumerate(elements)}
        if len(index) != len(elements):
            raise ValueError("carrier elements must be unique")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, Carrier) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"{x!r} is not an element of the carrier") from None

    def mask(self, xs: Iterable) -> int:
        m = 0
        for x in xs:
            m |= 1 << self.index(x)
        return m

    def subset(self, mask: int) -> frozenset:
        return frozenset(self.elements[i] for i in bits(mask))

    @property
    def full(self) -> int:
        return (1 << len(self.elements)) - 1

    def __mul__(self, other: "Carrier") -> "Carrier":
        return Carrier(tuple(product(self.elements, other.elements)))


UNIT = Carrier(("*",))


@dataclass(frozen=True, eq=False)
class Relation:
    source: Carrier
    target: Carrier
    rows: tuple

    def __post_init__(self):
        rows = tuple(self.rows)
        if len(rows) != len(self.source):
            raise ValueError("one row per source element required")
        full = self.target.full
        for r in rows:
            if r & ~full:
                raise ValueError("row has bits outside the target carrier")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_pairs(cls, source: Carrier, target: Carrier, pairs: Iterable) -> "Relation":
        rows = [0] * len(source)
        for a, b in pairs:
            if a not in source or b not in target:
                raise CarrierMismatch(f"pair {(a, b)!r} outside the declared carriers")
            rows[source.index(a)] |= 1 << target.index(b)
        return cls(source, target, tuple(rows))

    @classmethod
    def from_function(cls, source: Carrier, target: Carrier, fn) -> "Relation":
        return cls.from_pairs(source, target, ((a, fn(a)) for a in source))

    @classmethod
    def empty(cls, source: Carrier, target: Carrier) -> "Relation":
        return cls(source, target, (0,) * len(source))

    @classmethod
    def full(cls, source: Carrier, target: Carrier) -> "Relation":
        return cls(source, target, (target.full,) * len(source))

    @classmethod
    def state(cls, target: Carrier, subset: Iterable) -> "Relation":
        """The state ``I -> target`` picking out ``subset``."""
        return cls(UNIT, target, (target.mask(subset),))

    # -- inspection -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Relation)
            and self.source == other.source
            and self.target == other.target
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.rows))

    def __contains__(self, pair) -> bool:
        a, b = pair
        if a not in self.source or b not in self.target:
            return False
        return bool(self.rows[self.source.index(a)] >> self.target.index(b) & 1)

    def __len__(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def __iter__(self):
        return self.pairs()

    def __bool__(self) -> bool:
        return any(self.rows)

    def pairs(self) -> Iterator[tuple]:
        tgt = self.target.elements
        for a, r in zip(self.source.elements, self.rows):
            for j in bits(r):
                yield a, tgt[j]

    def image(self, a) -> frozenset:
        return self.target.subset(self.rows[self.source.index(a)])

    def image_of(self, xs: Iterable) -> frozenset:
        m = 0
        for x in xs:
            m |= self.rows[self.source.index(x)]
        return self.target.subset(m)

    @property
    def subset(self) -> frozenset:
        """For a state ``I -> A``: the subset of ``A`` it names."""
        if self.source != UNIT:
            raise CarrierMismatch("only states have an underlying subset")
        return self.target.subset(self.rows[0])

    def __repr__(self) -> str:
        return f"Relation({sorted_pairs(self)!r})"

    # -- algebra ------------------------------------------------------------

    def then(self, other: "Relation") -> "Relation":
        """Diagrammatic composition: ``self`` first, then ``other``."""
        return compose(self, other)

    def __matmul__(self, other: "Relation") -> "Relation":
        # r @ s == r ∘ s, i.e. s first
        return compose(other, self)

    @property
    def dagger(self) -> "Relation":
        return dagger(self)

    def __or__(self, other: "Relation") -> "Relation":
        _same_carriers(self, other)
        return Relation(self.source, self.target, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __and__(self, other: "Relation") -> "Relation":
        _same_carriers(self, other)
        return Relation(self.source, self.target, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __le__(self, other: "Relation") -> bool:
        _same_carriers(self, other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def is_function(self) -> bool:
        return all(r and r & (r - 1) == 0 for r in self.rows)

    def is_injective_function(self) -> bool:
        return self.is_function() and len(set(self.rows)) == len(self.rows)

    def is_bijection(self) -> bool:
        return self.is_injective_function() and len(self.source) == len(self.target)

    def is_isometry(self) -> bool:
        """``r† ∘ r = id``: nonempty, pairwise disjoint images."""
        seen = 0
        for r in self.rows:
            if not r or seen & r:
                return False
            seen |= r
        return True


def _same_carriers(r: Relation, s: Relation) -> None:
    if r.source != s.source or r.target != s.target:
        raise CarrierMismatch("relations live on different carriers")


def sort_key(x: Any):
    """Total order on mixed identifiers (ints, strings, nested tuples)."""
    if isinstance(x, tuple):
        return (2, tuple(sort_key(e) for e in x))
    if isinstance(x, (int, float)):
        return (0, x, "")
    return (1, 0, str(x))


def sorted_pairs(r: Relation) -> list:
    return sorted(r.pairs(), key=sort_key)


def identity(a: Carrier) -> Relation:
    return Relation(a, a, tuple(1 << i for i in range(len(a))))


def compose(r: Relation, s: Relation) -> Relation:
    """``s ∘ r``: first ``r: A -> B``, then ``s: B -> C``."""
    if r.target != s.source:
        raise CarrierMismatch("middle carriers differ")
    srows = s.rows
    out = []
    for row in r.rows:
        acc = 0
        while row:
            low = row & -row
            acc |= srows[low.bit_length() - 1]
            row ^= low
        out.append(acc)
    return Relation(r.source, s.target, tuple(out))


def dagger(r: Relation) -> Relation:
    out = [0] * len(r.target)
    for i, row in enumerate(r.rows):
        for j in bits(row):
            out[j] |= 1 << i
    return Relation(r.target, r.source, tuple(out))


def tensor(r: Relation, s: Relation) -> Relation:
    """Cartesian product ``r × s : A×C -> B×D``."""
    width = len(s.target)
    out = []
    for ra in r.rows:
        shifted = [(b * width) for b in bits(ra)]
        for rc in s.rows:
            acc = 0
            for sh in shifted:
                acc |= rc << sh
            out.append(acc)
    return Relation(r.source * s.source, r.target * s.target, tuple(out))


def tensor_all(*rels: Relation) -> Relation:
    out = rels[0]
    for r in rels[1:]:
        out = tensor(out, r)
    return out


def cup(a: Carrier) -> Relation:
    """``I -> A×A`` relating ``*`` to every diagonal pair."""
    aa = a * a
    return Relation(UNIT, aa, (aa.mask((x, x) for x in a),))


def cap(a: Carrier) -> Relation:
    return dagger(cup(a))


def swap(a: Carrier, b: Carrier) -> Relation:
    return Relation.from_function(a * b, b * a, lambda p: (p[1], p[0]))


def associator(a: Carrier, b: Carrier, c: Carrier) -> Relation:
    """``(A×B)×C -> A×(B×C)``."""
    return Relation.from_function(
        (a * b) * c, a * (b * c), lambda p: (p[0][0], (p[0][1], p[1]))
    )


def left_unitor(a: Carrier) -> Relation:
    """``I×A -> A``."""
    return Relation.from_function(UNIT * a, a, lambda p: p[1])


def right_unitor(a: Carrier) -> Relation:
    """``A×I -> A``."""
    return Relation.from_function(a * UNIT, a, lambda p: p[0])


def transpose(r: Relation) -> Relation:
    # every carrier is self-dual, so the transpose is the converse
    return dagger(r)


def conjugate(r: Relation) -> Relation:
    return r


def name(r: Relation) -> Relation:
    """The state ``I -> A×B`` corresponding to ``r: A -> B`` through the cup."""
    a = r.source
    return compose(cup(a), tensor(identity(a), r))


def unname(state: Relation, a: Carrier, b: Carrier) -> Relation:
    """Inverse of :func:`name`: bend the first leg of ``I -> A×B`` back."""
    if state.source != UNIT or state.target != a * b:
        raise CarrierMismatch("state must be I -> A×B")
    # A ≅ A×I --id×ψ--> A×(A×B) ≅ (A×A)×B --cap×id--> I×B ≅ B
    step = compose(dagger(right_unitor(a)), tensor(identity(a), state))
    step = compose(step, dagger(associator(a, a, b)))
    step = compose(step, tensor(cap(a), identity(b)))
    return compose(step, left_unitor(b))


def snake_left(a: Carrier) -> Relation:
    """``(cap × id) ∘ (id × cup)`` conjugated by unitors and associator."""
    step = compose(dagger(right_unitor(a)), tensor(identity(a), cup(a)))
    step = compose(step, dagger(associator(a, a, a)))
    step = compose(step, tensor(cap(a), identity(a)))
    return compose(step, left_unitor(a))


def snake_right(a: Carrier) -> Relation:
    """``(id × cap) ∘ (cup × id)`` conjugated by unitors and associator."""
    step = compose(dagger(left_unitor(a)), tensor(cup(a), identity(a)))
    step = compose(step, associator(a, a, a))
    step = compose(step, tensor(identity(a), cap(a)))
    return compose(step, right_unitor(a))
