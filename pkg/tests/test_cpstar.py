import random

import pytest
from hypothesis import given, strategies as st

from cpsrel import catalog as cat
from cpsrel import cpstar
from cpsrel import relcat as rc
from cpsrel.acceptance import ns_triples, small_families
from cpsrel.cpstar import (
    CPMorphism,
    InvalidMeasurement,
    Measurement,
    NotInverseRespecting,
    NotSubsystem,
    NotTotallyDisconnected,
)
from cpsrel.groupoid import SubgroupoidRef, closure, subgroupoids, wide_closure
from cpsrel.relcat import UNIT, Relation

Z2 = cat.get("Z2")
S3 = cat.get("S3")


def rel(g, h, pairs):
    return Relation.from_pairs(g.carrier, h.carrier, pairs)


# -- morphisms ---------------------------------------------------------------


def test_inverse_respecting_examples():
    g = cat.get("Z3")
    assert cpstar.is_inverse_respecting(rc.identity(g.carrier), g, g)
    assert cpstar.is_inverse_respecting(Relation.empty(g.carrier, g.carrier), g, g)
    assert not cpstar.is_inverse_respecting(rel(Z2, Z2, [(1, 1)]), Z2, Z2)
    assert cpstar.is_inverse_respecting(rel(Z2, Z2, [(1, 1), (0, 0)]), Z2, Z2)
    with pytest.raises(NotInverseRespecting):
        CPMorphism(Z2, Z2, rel(Z2, Z2, [(1, 1)]))


def closure_ir(g, h, pairs):
    """Smallest inverse-respecting relation containing ``pairs``."""
    s = set(pairs)
    while True:
        more = {(g.inv[a], h.inv[b]) for a, b in s} | {(g.id_dom(a), h.id_dom(b)) for a, b in s}
        if more <= s:
            return rel(g, h, s)
        s |= more


@given(st.sampled_from(["Z3", "S3", "indiscrete(2)", "Z2+Z3", "Z2+indiscrete(2)"]), st.randoms(use_true_random=False))
def test_cp_morphisms_compose(name, rnd):
    g = cat.get(name)
    ms = g.morphisms
    pick = lambda: [(rnd.choice(ms), rnd.choice(ms)) for _ in range(rnd.randint(0, 4))]  # noqa: E731
    r, s = CPMorphism(g, g, closure_ir(g, g, pick())), CPMorphism(g, g, closure_ir(g, g, pick()))
    assert cpstar.is_inverse_respecting(r.then(s).rel, g, g)


def test_star_homomorphism_examples():
    z6 = cat.get("Z6")
    incl = closure(z6, [3]).inclusion()
    sub = closure(z6, [3]).to_groupoid()
    assert cpstar.is_star_homomorphism(incl, sub, z6)
    z1 = cat.get("Z1")
    for name in ("S3", "indiscrete(2)", "Z3+Z3"):
        g = cat.get(name)
        const = rel(g, z1, [(m, 0) for m in g.morphisms])
        assert cpstar.is_star_homomorphism(const, g, z1)
    assert not cpstar.is_star_homomorphism(rel(Z2, Z2, [(0, 0), (0, 1), (1, 1)]), Z2, Z2)


def test_subsystem_examples():
    for name in cat.NAMES:
        g = cat.get(name)
        assert cpstar.is_subsystem(SubgroupoidRef(g, g.identities))
    zz = cat.get("Z3+Z3")
    assert not cpstar.is_subsystem(SubgroupoidRef(zz, frozenset(zz.endo(zz.objects[0]))))
    assert cpstar.is_subsystem(wide_closure(S3, ["(123)"]))
    with pytest.raises(NotSubsystem):
        cpstar.Subsystem.of(SubgroupoidRef(zz, frozenset(zz.endo(zz.objects[0]))))


@pytest.mark.parametrize("name", [n for n in cat.NAMES if len(cat.get(n).morphisms) <= 12])
def test_subsystem_characterisation_both_directions(name):
    # is_subsystem raises if wideness and the algebraic test ever disagree
    g = cat.get(name)
    for sub in subgroupoids(g):
        assert cpstar.is_subsystem(sub) == (sub.objects == frozenset(g.objects))


@pytest.mark.parametrize("name", cat.NAMES)
def test_subsystem_inclusions_preserve_counits(name):
    g = cat.get(name)
    for sub in subgroupoids(g, wide_only=True):
        s = cpstar.Subsystem.of(sub)
        assert rc.compose(s.inclusion.rel, cpstar.discard(g)) == cpstar.discard(s.groupoid)


# -- copyable states and broadcasting ---------------------------------------


def test_copyables_examples():
    zz = cat.get("Z3+Z3")
    assert set(cpstar.copyable_states(zz)) == {frozenset(zz.endo(x)) for x in zz.objects}
    assert cpstar.copyable_states(Z2) == [frozenset({0, 1})]
    assert cpstar.copyable_states(cat.get("indiscrete(2)")) == []


@pytest.mark.parametrize("name", [n for n in cat.NAMES if len(cat.get(n).morphisms) <= 9])
def test_copyables_match_brute_force(name):
    g = cat.get(name)
    assert set(cpstar.copyable_states(g)) == set(cpstar.copyable_states_bruteforce(g))


def test_canonical_map_z2():
    b = cpstar.canonical_broadcast_map(Z2)
    assert set(b.rel.pairs()) == {(0, (0, 0)), (1, (0, 1)), (1, (1, 0))}
    assert cpstar.is_broadcasting_map(Z2, b)


def test_broadcasting_examples():
    assert cpstar.is_broadcasting_map(cat.get("Z3"), cpstar.canonical_broadcast_map(cat.get("Z3")))
    ind = cat.get("indiscrete(2)")
    comult = ind.frobenius.comult
    assert not cpstar.is_broadcasting_map(ind, comult)
    # the marginals alone are fine (counit law); the comultiplication is not a CP* morphism
    assert cpstar.marginals(ind, comult) == (rc.identity(ind.carrier), rc.identity(ind.carrier))
    assert not cpstar.is_inverse_respecting(comult, ind, cpstar._square(ind))
    diag = Relation.from_pairs(Z2.carrier, Z2.carrier * Z2.carrier, [(f, (f, f)) for f in (0, 1)])
    assert not cpstar.is_broadcasting_map(Z2, diag)
    with pytest.raises(NotTotallyDisconnected):
        cpstar.canonical_broadcast_map(ind)


def test_comultiplication_broadcasts_exactly_when_commutative():
    for name in cat.NAMES:
        g = cat.get(name)
        assert cpstar.is_broadcasting_map(g, g.frobenius.comult) == g.is_commutative(), name


def test_s3_broadcastable_but_noncommutative():
    b = cpstar.canonical_broadcast_map(S3)
    assert cpstar.is_broadcasting_map(S3, b)
    assert not S3.is_commutative()


@pytest.mark.parametrize("name", cat.NAMES)
def test_broadcastable_iff_totally_disconnected(name):
    g = cat.get(name)
    d = cpstar.decide_broadcastable(g, exhaustive_limit=16)
    assert d.broadcastable == g.is_totally_disconnected()
    if len(g.morphisms) <= 16:
        assert d.search_confirms
    if d.map is not None:
        assert cpstar.is_inverse_respecting(d.map.rel, g, d.map.target)


def test_search_finds_maps_on_small_groups():
    for name in ("Z1", "Z2", "Z3", "discrete(2)"):
        g = cat.get(name)
        found, _ = cpstar.search_broadcasting_map(g)
        assert found is not None and cpstar.is_broadcasting_map(g, found)


def test_hierarchy_on_catalog():
    for name in cat.NAMES:
        g = cat.get(name)
        if cpstar.is_biproduct_of_units(g):
            assert g.is_commutative()
        if g.is_commutative():
            assert g.is_totally_disconnected()
    assert Z2.is_commutative() and not cpstar.is_biproduct_of_units(Z2)
    assert not S3.is_commutative() and S3.is_totally_disconnected()


# -- entanglement -------------------------------------------------------------


def test_entanglement_examples():
    r = cpstar.entanglement_witness(cpstar.identity(cat.get("indiscrete(2)")))
    assert r.entangled and r.witness == ((0, 1), (0, 1))
    z1 = cat.get("Z1")
    for name in ("indiscrete(3)", "S3"):
        g = cat.get(name)
        term = CPMorphism(g, z1, rel(g, z1, [(m, 0) for m in g.morphisms]))
        assert cpstar.entanglement_witness(term).verdict == "product-compatible"
    assert not cpstar.entanglement_witness(cpstar.identity(cat.get("Z3"))).entangled


def test_state_entanglement_through_name():
    g = cat.get("indiscrete(2)")
    psi_rel = rc.name(rc.identity(g.carrier))
    psi = CPMorphism(cpstar._UNIT_GROUPOID, cpstar._square(g), psi_rel)
    assert cpstar.state_entanglement_witness(psi, g, g).entangled


# -- measurements -----------------------------------------------------------


def test_measurement_examples():
    m = Measurement(Z2, ((0,), (1,)))
    assert cpstar.measurement_rel(m).rel == rc.identity(Z2.carrier)
    transpositions = ("(12)", "(13)", "(23)")
    m = Measurement(S3, (transpositions,))
    want = {(f, S3.compose(S3.inv[t], S3.compose(f, u))) for f in S3.morphisms for t in transpositions for u in transpositions}
    assert set(cpstar.measurement_rel(m).rel.pairs()) == want
    assert cpstar.measurement_rel(m).rel == cpstar.measurement_rel_oracle(m)
    with pytest.raises(InvalidMeasurement):
        Measurement(Z2, ((0,), ()))
    with pytest.raises(InvalidMeasurement):
        Measurement(Z2, ((0,), (0, 1)))


@pytest.mark.parametrize("name", ["Z3", "S3", "indiscrete(2)", "Z2+indiscrete(2)"])
def test_measurement_rel_matches_oracle(name):
    g = cat.get(name)
    for fam in small_families(g):
        m = Measurement(g, tuple(fam))
        got = cpstar.measurement_rel(m)
        assert got.rel == cpstar.measurement_rel_oracle(m)
        assert cpstar.is_inverse_respecting(got.rel, g, g)


def test_causal_examples():
    for n in range(1, 6):
        g = cat.get(f"Z{n}")
        assert cpstar.is_causal(Measurement(g, tuple((m,) for m in g.morphisms)))
    assert not cpstar.is_causal(Measurement(Z2, ((0, 1),)))
    d2 = cat.get("discrete(2)")
    assert not cpstar.is_causal(Measurement(d2, ((d2.ident[0],),)))


@pytest.mark.parametrize("name", ["Z3", "S3", "discrete(2)", "indiscrete(2)", "Z2+indiscrete(2)"])
def test_causal_family_shortcut_matches_relational_test(name):
    g = cat.get(name)
    for fam in small_families(g):
        assert cpstar.is_causal_family(g, fam) == cpstar.is_causal(Measurement(g, tuple(fam)))


# -- KI and NS ----------------------------------------------------------------


def test_ki_examples():
    z6 = cat.get("Z6")
    assert cpstar.kinematic_independence(z6, wide_closure(z6, [3]), wide_closure(z6, [2]))
    assert not cpstar.kinematic_independence(S3, wide_closure(S3, ["(12)"]), wide_closure(S3, ["(123)"]))
    d2 = cat.get("discrete(2)")
    full = SubgroupoidRef(d2, frozenset(d2.morphisms))
    assert cpstar.kinematic_independence(d2, full, full)


def test_ns_examples():
    z6 = cat.get("Z6")
    assert cpstar.no_signalling(z6, wide_closure(z6, [3]), wide_closure(z6, [2]))
    r = cpstar.no_signalling_search(S3, wide_closure(S3, ["(12)"]), wide_closure(S3, ["(123)"]))
    assert not r and r.witness is not None
    triv = SubgroupoidRef(Z2, Z2.identities)
    assert cpstar.no_signalling(Z2, triv, triv, causal_only=False)
    d2 = cat.get("discrete(2)")
    full = SubgroupoidRef(d2, frozenset(d2.morphisms))
    assert cpstar.kinematic_independence(d2, full, full)
    assert not cpstar.no_signalling(d2, full, full, causal_only=False)


def test_ns_witness_is_a_real_violation():
    a, b = wide_closure(S3, ["(12)"]), wide_closure(S3, ["(123)"])
    w = cpstar.no_signalling_search(S3, a, b).witness
    assert cpstar.family_violation(S3, w["family"], [w["b"]]) is not None
    sub = cpstar.Subsystem.of(a if w["measured"] == "A" else b).groupoid
    assert cpstar.is_causal_family(sub, w["family"])


def test_ns_requires_subsystems():
    zz = cat.get("Z3+Z3")
    comp = SubgroupoidRef(zz, frozenset(zz.endo(zz.objects[0])))
    with pytest.raises(NotSubsystem):
        cpstar.no_signalling(zz, comp, comp)


def test_ns_iff_ki_on_catalog():
    for name, g, a, b in ns_triples():
        assert cpstar.no_signalling(g, a, b) == cpstar.kinematic_independence(g, a, b), name


def test_noncausal_ns_on_catalog():
    for name, g, a, b in ns_triples():
        trivial = a.morphisms == g.identities == b.morphisms
        assert cpstar.no_signalling(g, a, b, causal_only=False) == (g.is_group() and trivial), name


def test_set_partitions_count():
    # Bell numbers
    assert [sum(1 for _ in cpstar.set_partitions(list(range(n)))) for n in range(6)] == [1, 1, 2, 5, 15, 52]


def test_full_enumeration_limit():
    s3 = S3
    full = SubgroupoidRef(s3, frozenset(s3.morphisms))
    with pytest.raises(ValueError):
        cpstar.no_signalling_search(s3, full, full, full=True)
