import pytest
from hypothesis import given, strategies as st

from cpsrel import relcat as rc
from cpsrel.relcat import UNIT, Carrier, CarrierMismatch, Relation

CARRIERS = [Carrier(tuple(range(n))) for n in range(1, 7)]


def carriers():
    return st.sampled_from(CARRIERS)


@st.composite
def relations(draw, source=None, target=None):
    a = source if source is not None else draw(carriers())
    b = target if target is not None else draw(carriers())
    rows = [draw(st.integers(0, b.full)) for _ in a]
    return Relation(a, b, tuple(rows))


@st.composite
def chains(draw):
    a, b, c, d = (draw(carriers()) for _ in range(4))
    return draw(relations(a, b)), draw(relations(b, c)), draw(relations(c, d))


def naive_compose(r, s):
    return {(a, c) for a, b in r.pairs() for b2, c in s.pairs() if b == b2}


@given(chains())
def test_compose_matches_pairwise_definition(ch):
    r, s, _ = ch
    assert set(rc.compose(r, s).pairs()) == naive_compose(r, s)


@given(chains())
def test_compose_associative(ch):
    r, s, t = ch
    assert rc.compose(rc.compose(r, s), t) == rc.compose(r, rc.compose(s, t))


@given(relations())
def test_identity_is_neutral(r):
    assert rc.compose(rc.identity(r.source), r) == r
    assert rc.compose(r, rc.identity(r.target)) == r


@given(chains())
def test_dagger_involutive_and_contravariant(ch):
    r, s, _ = ch
    assert r.dagger.dagger == r
    assert rc.compose(r, s).dagger == rc.compose(s.dagger, r.dagger)


@st.composite
def interchange_data(draw):
    a, b, c = (draw(st.sampled_from(CARRIERS[:3])) for _ in range(3))
    x, y, z = (draw(st.sampled_from(CARRIERS[:3])) for _ in range(3))
    return (
        draw(relations(a, b)),
        draw(relations(b, c)),
        draw(relations(x, y)),
        draw(relations(y, z)),
    )


@given(interchange_data())
def test_tensor_interchange(d):
    r1, r2, s1, s2 = d
    lhs = rc.compose(rc.tensor(r1, s1), rc.tensor(r2, s2))
    assert lhs == rc.tensor(rc.compose(r1, r2), rc.compose(s1, s2))


@given(relations(), relations())
def test_tensor_matches_pairwise_definition(r, s):
    want = {((a, c), (b, d)) for a, b in r.pairs() for c, d in s.pairs()}
    assert set(rc.tensor(r, s).pairs()) == want


@given(carriers())
def test_snake_equations(a):
    assert rc.snake_left(a) == rc.identity(a)
    assert rc.snake_right(a) == rc.identity(a)


@given(relations())
def test_name_unname_round_trip(r):
    assert rc.unname(rc.name(r), r.source, r.target) == r


@given(carriers(), carriers())
def test_swap_is_involution(a, b):
    assert rc.compose(rc.swap(a, b), rc.swap(b, a)) == rc.identity(a * b)


@given(st.sampled_from(CARRIERS[:3]), st.sampled_from(CARRIERS[:3]), st.sampled_from(CARRIERS[:3]))
def test_associator_and_unitors_are_unitary(a, b, c):
    for u in (rc.associator(a, b, c), rc.left_unitor(a), rc.right_unitor(a)):
        assert rc.compose(u, u.dagger) == rc.identity(u.source)
        assert rc.compose(u.dagger, u) == rc.identity(u.target)


@given(relations())
def test_set_operations(r):
    e = Relation.empty(r.source, r.target)
    f = Relation.full(r.source, r.target)
    assert (r | e) == r and (r & f) == r
    assert e <= r <= f
    assert len(r) == len(list(r.pairs()))


def test_state_and_subset():
    a = CARRIERS[3]
    s = Relation.state(a, [1, 3])
    assert s.source == UNIT
    assert s.subset == {1, 3}


def test_carrier_mismatch():
    with pytest.raises(CarrierMismatch):
        rc.compose(rc.identity(CARRIERS[1]), rc.identity(CARRIERS[2]))
    with pytest.raises(CarrierMismatch):
        Relation.from_pairs(CARRIERS[0], CARRIERS[0], [(0, 5)])


def test_function_predicates():
    a = CARRIERS[2]
    perm = Relation.from_function(a, a, lambda x: (x + 1) % 3)
    assert perm.is_function() and perm.is_bijection() and perm.is_isometry()
    const = Relation.from_function(a, a, lambda x: 0)
    assert const.is_function() and not const.is_injective_function()
    assert not Relation.full(a, a).is_function()
