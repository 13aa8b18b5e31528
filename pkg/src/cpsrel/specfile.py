"""Reading groupoid, subsystem, family and protocol descriptions (YAML or JSON)."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Any

import yaml

from . import catalog
from .bitcommit import BitCommitmentProtocol, protocol_from_points, swap_bob
from .groupoid import (
    Groupoid,
    InvalidSpec,
    SubgroupoidRef,
    cayley,
    closure,
    cyclic,
    discrete,
    explicit,
    indiscrete,
    symmetric,
    union,
)
from .relcat import Relation


class ParseError(ValueError):
    def __init__(self, message: str, where: str = "", line: int | None = None, path: str | None = None):
        self.where = where
        self.line = line
        self.path = path
        loc = []
        if path:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if where:
            loc.append(where)
        super().__init__(f"{': '.join(loc)}: {message}" if loc else message)


def load_document(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(str(exc), path=str(path)) from exc
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ParseError(str(getattr(exc, "problem", exc)), line=line, path=str(path)) from exc


_STEP = re.compile(r"\.?([A-Za-z_]+)|\[(\d+)\]")


def line_of(text: str, where: str) -> int | None:
    """1-based line of the node at a ``where`` path such as ``groupoid.compose[2]``."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None
    steps = _STEP.findall(where)[1:]  # the first step names the document itself
    line = node.start_mark.line + 1 if node is not None else None
    for key, index in steps:
        if node is None:
            break
        if key and isinstance(node, yaml.MappingNode):
            node = next((v for k, v in node.value if k.value == key), None)
        elif index and isinstance(node, yaml.SequenceNode) and int(index) < len(node.value):
            node = node.value[int(index)]
        else:
            break
        if node is not None:
            line = node.start_mark.line + 1
    return line


def _located(exc: "ParseError", path: Path) -> "ParseError":
    if exc.path is not None:
        return exc
    try:
        line = line_of(path.read_text(), exc.where) if exc.where else None
    except OSError:
        line = None
    msg = str(exc)
    if exc.where and msg.startswith(exc.where + ": "):
        msg = msg[len(exc.where) + 2 :]
    return ParseError(msg, exc.where, line, str(path))


def _need(data: dict, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"missing field {key!r}", where)
    return data[key]


def _tuplify(x):
    return tuple(_tuplify(e) for e in x) if isinstance(x, list) else x


_GROUP_NAME = re.compile(r"^([ZS])(\d+)$")


def groupoid_from_data(data: Any, base: Path | None = None, where: str = "groupoid") -> Groupoid:
    """Build and validate a groupoid from a parsed description."""
    if isinstance(data, str):
        return resolve_groupoid(data, base)
    if not isinstance(data, dict):
        raise ParseError("expected a mapping with a 'kind' field", where)
    kind = _need(data, "kind", where)
    try:
        if kind == "group":
            if "name" in data and "table" not in data:
                m = _GROUP_NAME.match(str(data["name"]))
                if not m:
                    raise ParseError(f"unknown group name {data['name']!r}", f"{where}.name")
                n = int(m.group(2))
                return cyclic(n) if m.group(1) == "Z" else symmetric(n)
            elements = _need(data, "elements", where)
            table = _need(data, "table", where)
            return cayley(elements, table, name=str(data.get("name", "group")))
        if kind in ("indiscrete", "discrete"):
            objs = data.get("objects")
            if objs is None:
                n = _need(data, "n", where)
                if not isinstance(n, int) or n < 1:
                    raise ParseError("n must be a positive integer", f"{where}.n")
                objs = n
            return (indiscrete if kind == "indiscrete" else discrete)(objs)
        if kind == "union":
            parts = _need(data, "parts", where)
            if not isinstance(parts, list) or not parts:
                raise ParseError("parts must be a nonempty list", f"{where}.parts")
            return union([groupoid_from_data(p, base, f"{where}.parts[{i}]") for i, p in enumerate(parts)])
        if kind == "explicit":
            objects = [_tuplify(o) for o in _need(data, "objects", where)]
            morphisms = []
            for i, m in enumerate(_need(data, "morphisms", where)):
                w = f"{where}.morphisms[{i}]"
                if isinstance(m, dict):
                    try:
                        morphisms.append((_tuplify(m["id"]), _tuplify(m["dom"]), _tuplify(m["cod"])))
                    except KeyError as exc:
                        raise ParseError(f"missing field {exc.args[0]!r}", w) from None
                else:
                    raise ParseError("expected {id, dom, cod}", w)
            triples = []
            for i, c in enumerate(data.get("compose", [])):
                if not isinstance(c, list) or len(c) != 3:
                    raise ParseError("compose entries are [g, h, g∘h]", f"{where}.compose[{i}]")
                triples.append([_tuplify(x) for x in c])
            ids = data.get("identities")
            if ids is not None:
                ids = {_tuplify(k): _tuplify(v) for k, v in ids.items()}
            return explicit(objects, morphisms, triples, identities=ids, name=str(data.get("name", "explicit")))
    except InvalidSpec as exc:
        raise ParseError(str(exc), where) from exc
    raise ParseError(f"unknown kind {kind!r}", f"{where}.kind")


def resolve_groupoid(ref: str, base: Path | None = None) -> Groupoid:
    """A catalog name, or a path to a description file."""
    cand = Path(ref) if base is None else base / ref
    if cand.exists():
        return parse_groupoid_file(cand)
    if Path(ref).exists():
        return parse_groupoid_file(Path(ref))
    try:
        return catalog.get(ref)
    except KeyError:
        raise ParseError(f"{ref!r} is neither a file nor a catalog groupoid") from None


def parse_groupoid_file(path: str | Path) -> Groupoid:
    path = Path(path)
    data = load_document(path)
    try:
        return groupoid_from_data(data, path.parent)
    except ParseError as exc:
        raise _located(exc, path) from None


def subgroupoid_from_data(data: Any, g: Groupoid, where: str = "subsystem") -> SubgroupoidRef:
    """``all`` | ``trivial`` | ``gen:<label>,...`` | {generators: [...]} | {morphisms: [...]}."""
    try:
        if data == "all":
            return SubgroupoidRef(g, frozenset(g.morphisms))
        if data == "trivial":
            return SubgroupoidRef(g, g.identities)
        if isinstance(data, str) and data.startswith("gen:"):
            gens = [g.lookup(x) for x in _split_labels(data[4:])]
            return closure(g, gens + list(g.identities))
        if isinstance(data, dict) and "generators" in data:
            gens = [g.lookup(x) for x in data["generators"]]
            if data.get("wide", True):
                gens += list(g.identities)
            return closure(g, gens)
        if isinstance(data, dict) and "morphisms" in data:
            return SubgroupoidRef(g, frozenset(g.lookup(x) for x in data["morphisms"]))
    except KeyError as exc:
        raise ParseError(str(exc.args[0]), where) from None
    raise ParseError("expected all, trivial, gen:..., {generators: [...]} or {morphisms: [...]}", where)


def _split_labels(text: str) -> list[str]:
    # commas inside parentheses belong to the label
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def resolve_subgroupoid(ref: str, g: Groupoid) -> SubgroupoidRef:
    if Path(ref).exists():
        return subgroupoid_from_data(load_document(ref), g, where=str(ref))
    return subgroupoid_from_data(ref, g)


def family_from_data(data: Any, g: Groupoid, where: str = "family") -> list[list]:
    if isinstance(data, dict):
        data = _need(data, "parts", where)
    if not isinstance(data, list):
        raise ParseError("a family is a list of parts", where)
    parts = []
    for i, part in enumerate(data):
        if not isinstance(part, list):
            raise ParseError("each part is a list of morphisms", f"{where}[{i}]")
        try:
            parts.append([g.lookup(x) for x in part])
        except KeyError as exc:
            raise ParseError(str(exc.args[0]), f"{where}[{i}]") from None
    return parts


def protocol_from_data(data: dict, base: Path | None = None, where: str = "protocol") -> BitCommitmentProtocol:
    alice = groupoid_from_data(_need(data, "alice", where), base, f"{where}.alice")
    bob = groupoid_from_data(_need(data, "bob", where), base, f"{where}.bob")
    h_obj = [_tuplify(p) for p in _need(data, "H_obj", where)]
    t_obj = [_tuplify(p) for p in _need(data, "T_obj", where)]
    for nm, pts in (("H_obj", h_obj), ("T_obj", t_obj)):
        for p in pts:
            if not (isinstance(p, tuple) and len(p) == 2 and p[0] in alice.objects and p[1] in bob.objects):
                raise ParseError(f"{p!r} is not an object of A⊗B", f"{where}.{nm}")
    p = protocol_from_points(alice, bob, h_obj, t_obj)
    unveil = data.get("unveil", "identity")
    if unveil == "identity":
        return p
    if isinstance(unveil, dict) and "swap_bob" in unveil:
        perm = {_tuplify(k): _tuplify(v) for k, v in unveil["swap_bob"].items()}
        return protocol_from_points(alice, bob, h_obj, t_obj, swap_bob(p, perm))
    if isinstance(unveil, dict) and "pairs" in unveil:
        j = p.joint
        try:
            pairs = [(j.lookup(a), j.lookup(b)) for a, b in unveil["pairs"]]
        except KeyError as exc:
            raise ParseError(str(exc.args[0]), f"{where}.unveil") from None
        return protocol_from_points(alice, bob, h_obj, t_obj, Relation.from_pairs(j.carrier, j.carrier, pairs))
    raise ParseError("unveil is 'identity', {swap_bob: {...}} or {pairs: [...]}", f"{where}.unveil")


def parse_protocol_file(path: str | Path) -> BitCommitmentProtocol:
    path = Path(path)
    data = load_document(path)
    if not isinstance(data, dict):
        raise ParseError("expected a mapping", path=str(path))
    try:
        return protocol_from_data(data, path.parent)
    except ParseError as exc:
        raise _located(exc, path) from None


def parse_spec(path: str | Path) -> Groupoid | BitCommitmentProtocol:
    """A groupoid description, or a protocol description (has an ``alice`` field)."""
    path = Path(path)
    data = load_document(path)
    try:
        if isinstance(data, dict) and "alice" in data:
            return protocol_from_data(data, path.parent)
        return groupoid_from_data(data, path.parent)
    except ParseError as exc:
        raise _located(exc, path) from None
