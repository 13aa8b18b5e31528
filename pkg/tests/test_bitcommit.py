import pytest
from hypothesis import given, settings, strategies as st

from cpsrel import catalog as cat
from cpsrel import relcat as rc
from cpsrel.bitcommit import (
    ADVERSARIES,
    ADVERSARY_INCLUSIONS,
    apply_local,
    bob_view,
    check_binding,
    check_concealing,
    check_secure,
    check_sound,
    copyable_states,
    fibres,
    is_in_adversary_class,
    is_monomorphism,
    is_monomorphism_bruteforce,
    paper_protocol,
    protocol_from_points,
    swap_bob,
)
from cpsrel.cpstar import CPMorphism, is_inverse_respecting
from cpsrel.groupoid import indiscrete
from cpsrel.relcat import Relation

P = paper_protocol()


def test_paper_protocol_shape():
    assert len(P.H) == 9 and len(P.T) == 9
    assert not P.H & P.T
    assert P.hhat | P.that == set(P.joint.objects)
    assert not P.hhat & P.that
    assert set(copyable_states(P.classical)) == {P.hhat, P.that}
    assert P.invariant_violations() == []


def test_sound():
    assert check_sound(P)
    assert not check_sound(P.with_(hhat=P.that, that=P.hhat))
    empty = CPMorphism(P.joint, P.joint, Relation.empty(P.joint.carrier, P.joint.carrier))
    assert not check_sound(P.with_(unveil=empty))


def test_concealing():
    assert check_concealing(P)
    want = {P.bob.lookup(("x", "x")), P.bob.lookup(("y", "y"))}
    assert bob_view(P, P.H).subset == want == bob_view(P, P.T).subset
    assert check_concealing(P.with_(T=P.H))


def test_concealing_fails_on_a_lopsided_protocol():
    p = protocol_from_points(indiscrete(1), indiscrete(["x", "y"]), [(0, "x")], [(0, "y")])
    assert not check_concealing(p)


def test_binding_functions_by_fibre_pruning():
    r = check_binding(P, "functions")
    assert r.binding and r.candidates_examined == 0
    assert "(x,x)" in r.reason
    assert check_binding(P, "function-graphs").binding


def test_binding_bijections_and_isometries():
    assert check_binding(P, "bijections").binding
    assert check_binding(P, "isometries").binding


def test_all_cp_search_terminates_with_a_checked_cheat():
    r = check_binding(P, "all")
    assert r.verdict == "cheat"
    u = r.cheat
    assert is_inverse_respecting(u, P.alice, P.alice)
    assert apply_local(P, u, P.H) == P.T
    assert is_in_adversary_class(u, P.alice, "all")
    assert not is_in_adversary_class(u, P.alice, "functions")


def test_local_map_listing_shape():
    # (f ⊗ id) ∘ H grouped by Bob's component: nine elements over four fibres
    f = Relation.from_function(P.alice.carrier, P.alice.carrier, lambda m: m)
    out = apply_local(P, f, P.H)
    assert out == P.H
    fib = fibres(P, out)
    assert sum(len(v) for v in fib.values()) == 9
    assert len(fib[P.bob.lookup(("x", "x"))]) == 1
    assert len(fib[P.bob.lookup(("y", "y"))]) == 4


def test_secure():
    rep = check_secure(P, "functions")
    assert rep.secure and rep.sound and rep.concealing


def test_swapped_unveil_is_not_sound_but_mono():
    u = swap_bob(P, {"x": "y", "y": "x"})
    p = P.with_(unveil=CPMorphism(P.joint, P.joint, u))
    assert not check_sound(p)
    assert is_monomorphism(p.unveil)
    assert not check_secure(p).secure


def test_degenerate_protocol_reports_invariant():
    p = P.with_(T=P.H, that=P.hhat)
    rep = check_secure(p)
    assert not rep.secure and rep.invariant_violations


@pytest.mark.parametrize("name", ["Z2", "Z3", "indiscrete(2)", "discrete(2)", "Z2+Z3"])
def test_monomorphism_exact_vs_brute_force(name):
    g = cat.get(name)
    rels = [rc.identity(g.carrier), Relation.full(g.carrier, g.carrier), Relation.empty(g.carrier, g.carrier)]
    rels.append(Relation.from_pairs(g.carrier, g.carrier, [(m, g.id_dom(m)) for m in g.morphisms]))
    for r in rels:
        if not is_inverse_respecting(r, g, g):
            continue
        u = CPMorphism(g, g, r)
        assert is_monomorphism(u) == is_monomorphism_bruteforce(u)


@settings(max_examples=40)
@given(st.sampled_from(["Z2", "Z3", "indiscrete(2)", "Z2+indiscrete(2)"]), st.randoms(use_true_random=False))
def test_monomorphism_random_relations(name, rnd):
    g = cat.get(name)
    ms = g.morphisms
    s = {(rnd.choice(ms), rnd.choice(ms)) for _ in range(rnd.randint(0, 6))}
    while True:
        more = {(g.inv[a], g.inv[b]) for a, b in s} | {(g.id_dom(a), g.id_dom(b)) for a, b in s}
        if more <= s:
            break
        s |= more
    u = CPMorphism(g, g, Relation.from_pairs(g.carrier, g.carrier, s))
    assert is_monomorphism(u) == is_monomorphism_bruteforce(u)


def small_protocols():
    alice = indiscrete([0, 1])
    bob = indiscrete(["x", "y"])
    pts = [(a, b) for a in (0, 1) for b in ("x", "y")]
    out = []
    for hmask in range(1, 16):
        for tmask in range(1, 16):
            h = [p for i, p in enumerate(pts) if hmask >> i & 1]
            t = [p for i, p in enumerate(pts) if tmask >> i & 1]
            if set(h) & set(t):
                continue
            out.append(protocol_from_points(alice, bob, h, t))
    return out


def test_binding_is_antitone():
    for p in small_protocols():
        verdicts = {adv: check_binding(p, adv).verdict for adv in ADVERSARIES}
        for sub, sup in ADVERSARY_INCLUSIONS:
            if verdicts[sub] == "cheat":
                assert verdicts[sup] == "cheat"


def test_binding_search_against_exhaustive_functions():
    # every function Mor(A) -> Mor(A) on a 4-element carrier, checked by brute force
    from itertools import product

    for p in small_protocols()[:40]:
        ms = p.alice.morphisms
        exists = False
        for img in product(ms, repeat=len(ms)):
            f = Relation.from_pairs(p.alice.carrier, p.alice.carrier, zip(ms, img))
            if apply_local(p, f, p.H) == p.T:
                exists = True
                break
        assert check_binding(p, "functions").binding == (not exists)


def test_budget_gives_inconclusive():
    r = check_binding(P, "all", budget=1)
    assert r.verdict in ("inconclusive", "cheat")
