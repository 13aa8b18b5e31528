import pytest

from cpsrel import catalog as cat
from cpsrel.bitcommit import BitCommitmentProtocol, check_sound, paper_protocol
from cpsrel.specfile import ParseError, parse_spec, resolve_subgroupoid


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_indiscrete_spec(tmp_path):
    g = parse_spec(write(tmp_path, "i3.yaml", "kind: indiscrete\nn: 3\n"))
    assert len(g.morphisms) == 9 and len(g.objects) == 3


def test_group_specs(tmp_path):
    assert parse_spec(write(tmp_path, "z3.yaml", "kind: group\nname: Z3\n")) == cat.get("Z3")
    s3 = parse_spec(write(tmp_path, "s3.json", '{"kind": "group", "name": "S3"}'))
    assert s3 == cat.get("S3")
    z2 = parse_spec(write(tmp_path, "z2.yaml", "kind: group\nelements: [e, a]\ntable: [[e, a], [a, e]]\n"))
    assert len(z2.morphisms) == 2 and z2.compose("a", "a") == "e"


def test_union_spec(tmp_path):
    text = "kind: union\nparts:\n  - {kind: group, name: Z3}\n  - {kind: group, name: Z3}\n"
    g = parse_spec(write(tmp_path, "u.yaml", text))
    assert len(g.components()) == 2 and g == cat.get("Z3+Z3")


def test_union_by_reference(tmp_path):
    write(tmp_path, "z3.yaml", "kind: group\nname: Z3\n")
    g = parse_spec(write(tmp_path, "u.yaml", "kind: union\nparts: [z3.yaml, Z2]\n"))
    assert g == cat.get("Z3+Z2")


def test_explicit_spec(tmp_path):
    text = """\
kind: explicit
objects: [a, b]
morphisms:
  - {id: ia, dom: a, cod: a}
  - {id: ib, dom: b, cod: b}
  - {id: f, dom: a, cod: b}
  - {id: g, dom: b, cod: a}
compose:
  - [g, f, ia]
  - [f, g, ib]
identities: {a: ia, b: ib}
"""
    g = parse_spec(write(tmp_path, "e.yaml", text))
    assert len(g.morphisms) == 4 and not g.is_totally_disconnected()
    assert g.compose("g", "f") == "ia" and g.inv["f"] == "g"


def test_malformed_compose_triple(tmp_path):
    text = "kind: explicit\nobjects: [a]\nmorphisms:\n  - {id: e, dom: a, cod: a}\ncompose:\n  - [e, e]\n"
    with pytest.raises(ParseError) as info:
        parse_spec(write(tmp_path, "bad.yaml", text))
    assert info.value.where == "groupoid.compose[0]"
    assert info.value.line == 6


def test_invalid_spec_is_forwarded(tmp_path):
    text = "kind: explicit\nobjects: [a]\nmorphisms:\n  - {id: e, dom: a, cod: a}\n  - {id: x, dom: a, cod: a}\ncompose:\n  - [x, x, x]\nidentities: {a: e}\n"
    with pytest.raises(ParseError) as info:
        parse_spec(write(tmp_path, "bad.yaml", text))
    assert "inverse" in str(info.value)


def test_yaml_syntax_error_has_line(tmp_path):
    with pytest.raises(ParseError) as info:
        parse_spec(write(tmp_path, "bad.yaml", "kind: group\nname: [Z3\n"))
    assert info.value.line is not None


def test_unknown_kind(tmp_path):
    with pytest.raises(ParseError):
        parse_spec(write(tmp_path, "k.yaml", "kind: monoid\n"))


def test_subsystem_specs(tmp_path):
    s3 = cat.get("S3")
    assert resolve_subgroupoid("gen:(12)", s3).morphisms == {"e", "(12)"}
    assert resolve_subgroupoid("trivial", s3).morphisms == {"e"}
    assert resolve_subgroupoid("all", s3).morphisms == set(s3.morphisms)
    p = write(tmp_path, "sub.yaml", 'generators: ["(123)"]\n')
    assert resolve_subgroupoid(str(p), s3).morphisms == {"e", "(123)", "(132)"}


def test_protocol_spec(tmp_path):
    text = """\
alice: {kind: indiscrete, objects: [0, 1, 2]}
bob: {kind: indiscrete, objects: [x, y]}
H_obj: [[0, x], [1, y], [2, y]]
T_obj: [[0, y], [1, x], [2, x]]
"""
    p = parse_spec(write(tmp_path, "proto.yaml", text))
    assert isinstance(p, BitCommitmentProtocol)
    ref = paper_protocol()
    assert p.H == ref.H and p.T == ref.T and check_sound(p)


def test_protocol_with_swapped_unveil(tmp_path):
    text = """\
alice: {kind: indiscrete, objects: [0, 1, 2]}
bob: {kind: indiscrete, objects: [x, y]}
H_obj: [[0, x], [1, y], [2, y]]
T_obj: [[0, y], [1, x], [2, x]]
unveil: {swap_bob: {x: y, y: x}}
"""
    assert not check_sound(parse_spec(write(tmp_path, "proto.yaml", text)))


def test_protocol_bad_point(tmp_path):
    text = "alice: {kind: indiscrete, n: 2}\nbob: {kind: indiscrete, n: 2}\nH_obj: [[0, 5]]\nT_obj: [[1, 1]]\n"
    with pytest.raises(ParseError) as info:
        parse_spec(write(tmp_path, "proto.yaml", text))
    assert info.value.line == 3
