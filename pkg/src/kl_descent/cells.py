"""
Lusztig's a-function, the leading coefficients gamma, Duflo involutions and
the left / right / two-sided preorders and cells.

Preorders are generated by generators only: x <=_L y when C_x occurs in
C_s C_y for some s (h_{s,y,x} != 0), x <=_R y when h_{y,s,x} != 0, and <=_LR
is generated by both.  Cells are the strongly connected components of the
corresponding graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .coxeter import GroupTable, enumerate_group, parabolic_spec
from .hecke import KLTable, StructureConstants, delta_n, kl_basis, structure_constant_sweep

__all__ = [
    "Preorder", "CellData", "a_function", "gamma_table", "duflo_set",
    "cell_partition", "parabolic_a", "compute_cells", "strongly_connected_components",
]

KINDS = ("L", "R", "LR")


def strongly_connected_components(n: int, succ: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                u = succ[v][i]
                if index[u] == -1:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack[u] = True
                    work.append((u, 0))
                elif on_stack[u]:
                    low[v] = min(low[v], index[u])
                continue
            work.pop()
            if work:
                p = work[-1][0]
                low[p] = min(low[p], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp.append(u)
                    if u == v:
                        break
                comps.append(sorted(comp))
    return comps


@dataclass
class Preorder:
    """A preorder on range(n) given by generating arcs y -> x meaning x <= y.

    ``cells`` are sorted by minimal element; ``below[c]`` is a bitset of the
    cells c' with c' <= c.
    """
    kind: str
    n: int
    succ: list[list[int]]
    cells: list[list[int]] = field(init=False)
    cell_of: list[int] = field(init=False)
    below: list[int] = field(init=False)

    def __post_init__(self):
        comps = strongly_connected_components(self.n, self.succ)
        # Tarjan emits sinks first; remember that order for the closure.
        topo = [c[0] for c in comps]
        comps.sort(key=lambda c: c[0])
        self.cells = comps
        self.cell_of = [0] * self.n
        for k, c in enumerate(comps):
            for x in c:
                self.cell_of[x] = k
        rank = {c[0]: k for k, c in enumerate(comps)}
        below = [0] * len(comps)
        for m in topo:
            k = rank[m]
            bits = 1 << k
            for x in comps[k]:
                for y in self.succ[x]:
                    j = self.cell_of[y]
                    if j != k:
                        bits |= below[j]
            below[k] = bits
        self.below = below

    def leq(self, x: int, y: int) -> bool:
        """x <= y."""
        return bool(self.below[self.cell_of[y]] >> self.cell_of[x] & 1)

    def equiv(self, x: int, y: int) -> bool:
        return self.cell_of[x] == self.cell_of[y]

    def cell_order(self) -> list[tuple[int, int]]:
        """Covering pairs (i, j) with cell i < cell j."""
        m = len(self.cells)
        less = [[i for i in range(m) if i != j and self.below[j] >> i & 1] for j in range(m)]
        out = []
        for j in range(m):
            for i in less[j]:
                if not any(self.below[k] >> i & 1 for k in less[j] if k != i):
                    out.append((i, j))
        return sorted(out)

    def to_json(self) -> dict:
        return {"kind": self.kind, "cells": self.cells,
                "order": [list(p) for p in self.cell_order()]}

    def to_dot(self, labels: list[str] | None = None) -> str:
        lines = [f'digraph "{self.kind}_cells" {{', "  rankdir=BT;"]
        for k, c in enumerate(self.cells):
            names = [labels[x] if labels else str(x) for x in c]
            lines.append(f'  c{k} [label="{", ".join(names)}"];')
        for i, j in self.cell_order():
            lines.append(f"  c{i} -> c{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def a_function(t: GroupTable, h: StructureConstants) -> list:
    """a(z) = max over x, y of deg h_{x,y,z}."""
    a = [-math.inf] * t.size
    for row in h.rows:
        for d in row:
            for z, p in d.items():
                dg = p.degree
                if dg > a[z]:
                    a[z] = dg
    return a


def gamma_table(t: GroupTable, h: StructureConstants, a: list) -> dict:
    """{(x, y, z^{-1}): gamma} over nonzero leading coefficients at degree a(z)."""
    inv = t.inverse
    g = {}
    for x, row in enumerate(h.rows):
        for y, d in enumerate(row):
            for z, p in d.items():
                c = p.coefficient(a[z])
                if c:
                    g[(x, y, inv[z])] = c
    return g


def duflo_set(a: list, delta: list) -> list[int]:
    return [z for z in range(len(a)) if a[z] == delta[z]]


def cell_partition(t: GroupTable, h: StructureConstants, kind: str) -> Preorder:
    gens = [t.right_mul[0][s] for s in range(t.rank)]
    succ: list[set] = [set() for _ in range(t.size)]
    for y in range(t.size):
        for s in gens:
            if kind in ("L", "LR"):
                succ[y].update(h.rows[s][y])
            if kind in ("R", "LR"):
                succ[y].update(h.rows[y][s])
    for y in range(t.size):
        succ[y].discard(y)
    return Preorder(kind, t.size, [sorted(s) for s in succ])


@dataclass(eq=False)
class CellData:
    table: GroupTable
    a: list
    delta: list
    n: list
    gamma: dict
    duflo: list[int]
    preorders: dict[str, Preorder]

    def gamma_of(self, x: int, y: int, z: int) -> int:
        return self.gamma.get((x, y, z), 0)

    def left(self) -> Preorder:
        return self.preorders["L"]

    def right(self) -> Preorder:
        return self.preorders["R"]

    def two_sided(self) -> Preorder:
        return self.preorders["LR"]


def compute_cells(t: GroupTable, kl: KLTable, h: StructureConstants) -> CellData:
    a = a_function(t, h)
    dn = [delta_n(kl, w) for w in range(t.size)]
    delta = [d for d, _ in dn]
    n = [c for _, c in dn]
    gamma = gamma_table(t, h, a)
    pre = {k: cell_partition(t, h, k) for k in KINDS}
    return CellData(t, a, delta, n, gamma, duflo_set(a, delta), pre)


def parabolic_a(t: GroupTable, subset: Iterable[int]) -> dict[int, int]:
    """a_I on W_I, computed from the standalone datum (W_I, I, phi|I).

    Keys are element indices of W.
    """
    subset = sorted(set(subset))
    sub = enumerate_group(parabolic_spec(t.spec, subset))
    kl = kl_basis(sub)
    h = structure_constant_sweep(sub, kl)
    a = a_function(sub, h)
    return {t.element(subset[i] for i in sub.word[x]): a[x] for x in range(sub.size)}
