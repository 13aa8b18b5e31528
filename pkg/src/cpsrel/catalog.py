"""The shipped fixture of groupoids covering every example class in use."""

from __future__ import annotations

from functools import lru_cache

from .groupoid import Groupoid, cyclic, discrete, indiscrete, symmetric, union

NAMES = (
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6",
    "S3",
    "discrete(1)", "discrete(2)", "discrete(3)", "discrete(4)",
    "indiscrete(2)", "indiscrete(3)", "indiscrete(4)",
    "Z3+Z3", "Z2+Z3", "Z2+indiscrete(2)",
)  # fmt: skip


def _build(name: str) -> Groupoid:
    if "+" in name:
        return union([_build(p) for p in name.split("+")])
    if name.startswith("Z"):
        return cyclic(int(name[1:]))
    if name.startswith("S"):
        return symmetric(int(name[1:]))
    kind, _, rest = name.partition("(")
    n = int(rest.rstrip(")"))
    return {"discrete": discrete, "indiscrete": indiscrete}[kind](n)


@lru_cache(maxsize=None)
def get(name: str) -> Groupoid:
    if name not in NAMES and not _looks_buildable(name):
        raise KeyError(f"unknown catalog groupoid {name!r}")
    return _build(name)


def _looks_buildable(name: str) -> bool:
    try:
        _build(name)
    except (ValueError, KeyError, IndexError):
        return False
    return True


def catalog(max_morphisms: int | None = None) -> dict[str, Groupoid]:
    out = {n: get(n) for n in NAMES}
    if max_morphisms is not None:
        out = {n: g for n, g in out.items() if len(g.morphisms) <= max_morphisms}
    return out
