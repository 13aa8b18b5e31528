"""Small DPLL solver used by the existence searches.

Variables are ``0..n-1``; a literal is ``v + 1`` (true) or ``-(v + 1)``
(false).  Branching always picks the lowest unassigned variable and tries
``False`` first, so the first model found is the lexicographically least
one (``False < True``) in variable order.
"""

from __future__ import annotations

from typing import Iterable, Optional


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int):
        self.nodes = nodes
        super().__init__(f"search budget exhausted after {nodes} nodes")


class Solver:
    def __init__(self, nvars: int):
        self.nvars = nvars
        self.clauses: list[tuple[int, ...]] = []
        self.occurs: list[list[int]] = [[] for _ in range(2 * nvars)]
        self.unsat = False
        self.nodes = 0

    def _slot(self, lit: int) -> int:
        return 2 * (abs(lit) - 1) + (lit < 0)

    def add(self, lits: Iterable[int]) -> None:
        clause = tuple(dict.fromkeys(lits))
        if any(-l in clause for l in clause):
            return
        if not clause:
            self.unsat = True
            return
        idx = len(self.clauses)
        self.clauses.append(clause)
        for l in clause:
            self.occurs[self._slot(l)].append(idx)

    def forbid(self, v: int) -> None:
        self.add([-(v + 1)])

    def implies(self, a: int, b: int) -> None:
        self.add([-(a + 1), b + 1])

    def equiv(self, a: int, b: int) -> None:
        if a != b:
            self.implies(a, b)
            self.implies(b, a)

    def at_least_one(self, vs: Iterable[int]) -> None:
        self.add([v + 1 for v in vs])

    def at_most_one(self, vs: Iterable[int]) -> None:
        vs = list(vs)
        for i, a in enumerate(vs):
            for b in vs[i + 1 :]:
                self.add([-(a + 1), -(b + 1)])

    # -- solving ----------------------------------------------------------

    def solve(self, budget: Optional[int] = None) -> Optional[list[bool]]:
        """Lexicographically least model, or ``None`` when unsatisfiable."""
        self.nodes = 0
        if self.unsat:
            return None
        value: list[Optional[bool]] = [None] * self.nvars
        trail: list[int] = []

        def assign(lit: int) -> bool:
            # set lit true and propagate; False on conflict
            queue = [lit]
            while queue:
                l = queue.pop()
                v = abs(l) - 1
                want = l > 0
                if value[v] is not None:
                    if value[v] != want:
                        return False
                    continue
                value[v] = want
                trail.append(v)
                for ci in self.occurs[self._slot(-l)]:
                    free = None
                    nfree = 0
                    sat = False
                    for m in self.clauses[ci]:
                        mv = value[abs(m) - 1]
                        if mv is None:
                            nfree += 1
                            free = m
                            if nfree > 1:
                                break
                        elif mv == (m > 0):
                            sat = True
                            break
                    if sat or nfree > 1:
                        continue
                    if nfree == 0:
                        return False
                    queue.append(free)
            return True

        def undo(mark: int) -> None:
            while len(trail) > mark:
                value[trail.pop()] = None

        for c in self.clauses:
            if len(c) == 1 and value[abs(c[0]) - 1] is None:
                if not assign(c[0]):
                    return None
            elif len(c) == 1 and value[abs(c[0]) - 1] != (c[0] > 0):
                return None

        # decision stack entries: (var, mark, tried_true)
        stack: list[tuple[int, int, bool]] = []
        nxt = 0
        while True:
            while nxt < self.nvars and value[nxt] is not None:
                nxt += 1
            if nxt == self.nvars:
                return [bool(v) for v in value]
            self.nodes += 1
            if budget is not None and self.nodes > budget:
                raise BudgetExceeded(self.nodes)
            mark = len(trail)
            ok = assign(-(nxt + 1))
            stack.append((nxt, mark, False))
            while not ok:
                undo(mark)
                # backtrack to the latest decision that has not tried True
                while stack and stack[-1][2]:
                    _, m, _ = stack.pop()
                    undo(m)
                if not stack:
                    return None
                var, mark, _ = stack.pop()
                undo(mark)
                stack.append((var, mark, True))
                ok = assign(var + 1)
                nxt = var
