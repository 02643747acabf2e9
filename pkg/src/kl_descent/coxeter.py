"""
Finite Coxeter groups as dense multiplication-by-generator tables.

Groups are enumerated from their Coxeter matrix by Todd-Coxeter coset
enumeration over the trivial subgroup, which is exact and works the same for
crystallographic and non-crystallographic types.  Elements are then renumbered
by (length, lex-minimal reduced word), so element 0 is the identity and the
numbering only depends on the Coxeter matrix.

Generators are 0-based internally; reduced words print 1-based, e.g.
``s1s2s1``.

>>> t = enumerate_group(named_spec("A2"))
>>> t.size, [t.length[w] for w in range(t.size)]
(6, [0, 1, 1, 2, 2, 3])
>>> t.format(t.size - 1)
's1s2s1'
"""

from __future__ import annotations

import itertools
import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .laurent import Gamma

__all__ = [
    "CoxeterError", "CoxeterSpec", "GroupTable", "DiagramAutGroup",
    "DescentSystem", "named_matrix", "named_order", "named_spec",
    "enumerate_group", "bruhat_leq", "longest_element", "fixed_subsystem",
    "act", "act_table", "fixed_points", "parabolic_elements", "parabolic_spec",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 10_000


class CoxeterError(ValueError):
    """Invalid Coxeter datum, weight function or automorphism."""


# ----------------------------------------------------------------------------
# Named types (Bourbaki numbering)

def _chain(n: int, edges: dict) -> list[list[int]]:
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    for (i, j), v in edges.items():
        m[i][j] = m[j][i] = v
    return m


def _irreducible(letter: str, n: int, param: int | None = None):
    if letter == "A" and n >= 1:
        return _chain(n, {(i, i + 1): 3 for i in range(n - 1)})
    if letter in "BC" and n >= 2:
        e = {(i, i + 1): 3 for i in range(n - 2)}
        e[(n - 2, n - 1)] = 4
        return _chain(n, e)
    if letter == "D" and n >= 4:
        e = {(i, i + 1): 3 for i in range(n - 2)}
        e[(n - 3, n - 1)] = 3
        return _chain(n, e)
    if letter == "E" and n in (6, 7, 8):
        e = {(0, 2): 3, (1, 3): 3}
        for i in range(2, n - 1):
            e[(i, i + 1)] = 3
        return _chain(n, e)
    if letter == "F" and n == 4:
        return _chain(4, {(0, 1): 3, (1, 2): 4, (2, 3): 3})
    if letter == "G" and n == 2:
        return _chain(2, {(0, 1): 6})
    if letter == "H" and n in (3, 4):
        e = {(0, 1): 5}
        for i in range(1, n - 1):
            e[(i, i + 1)] = 3
        return _chain(n, e)
    if letter == "I" and n == 2 and param is not None and param >= 2:
        return _chain(2, {(0, 1): param})
    raise CoxeterError(f"unknown Coxeter type {letter}{n}")


_ORDERS = {
    ("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
    ("F", 4): 1152, ("G", 2): 12, ("H", 3): 120, ("H", 4): 14400,
}

_TYPE_RE = re.compile(r"^\s*([A-Ia-i])\s*(\d+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def _components(name: str):
    for part in re.split(r"[+x×]", name):
        mt = _TYPE_RE.match(part)
        if not mt:
            raise CoxeterError(f"cannot parse Coxeter type {part!r}")
        letter, n, param = mt.group(1).upper(), int(mt.group(2)), mt.group(3)
        yield letter, n, (int(param) if param else None)


def named_matrix(name: str) -> list[list[int]]:
    """Coxeter matrix of a named type; products are written ``A1+A2``."""
    blocks = [_irreducible(*c) for c in _components(name)]
    n = sum(len(b) for b in blocks)
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                m[off + i][off + j] = v
        off += len(b)
    return m


def named_order(name: str) -> int:
    order = 1
    for letter, n, param in _components(name):
        _irreducible(letter, n, param)
        if letter == "A":
            order *= math.factorial(n + 1)
        elif letter in "BC":
            order *= 2 ** n * math.factorial(n)
        elif letter == "D":
            order *= 2 ** (n - 1) * math.factorial(n)
        elif letter == "I":
            order *= 2 * param
        else:
            order *= _ORDERS[(letter, n)]
    return order


# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CoxeterSpec:
    """A Coxeter matrix with a weight phi(s) > 0 for every generator.

    Weights are packed Gamma elements (see :class:`~kl_descent.laurent.Gamma`).
    """
    matrix: tuple[tuple[int, ...], ...]
    weights: tuple[int, ...]
    gamma: Gamma = field(default_factory=Gamma)
    name: str = ""

    def __post_init__(self):
        m = self.matrix
        n = len(m)
        if any(len(row) != n for row in m):
            raise CoxeterError("Coxeter matrix must be square")
        for i in range(n):
            if m[i][i] != 1:
                raise CoxeterError(f"m[{i + 1}][{i + 1}] must be 1")
            for j in range(i + 1, n):
                if m[i][j] != m[j][i]:
                    raise CoxeterError(f"Coxeter matrix not symmetric at ({i + 1},{j + 1})")
                if m[i][j] < 2:
                    raise CoxeterError(f"m[{i + 1}][{j + 1}] = {m[i][j]} must be >= 2")
        if len(self.weights) != n:
            raise CoxeterError(f"expected {n} weights, got {len(self.weights)}")
        for i, w in enumerate(self.weights):
            if w <= 0:
                raise CoxeterError(
                    f"weight of s{i + 1} is {self.gamma.format(w)}; weights must be positive")
        for i in range(n):
            for j in range(i + 1, n):
                if m[i][j] % 2 == 1 and self.weights[i] != self.weights[j]:
                    raise CoxeterError(
                        f"inconsistent weight function: m_{i + 1}{j + 1} = {m[i][j]} is odd "
                        f"but phi(s{i + 1}) = {self.gamma.format(self.weights[i])} != "
                        f"phi(s{j + 1}) = {self.gamma.format(self.weights[j])}")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @classmethod
    def build(cls, matrix, weights, gamma: Gamma | None = None, name: str = ""):
        gamma = gamma or Gamma()
        return cls(tuple(tuple(int(v) for v in row) for row in matrix),
                   tuple(gamma.encode(w) for w in weights), gamma, name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "matrix": [list(r) for r in self.matrix],
            "weights": [self.gamma.to_json(w) for w in self.weights],
            "gamma_rank": self.gamma.rank,
        }


def named_spec(name: str, weights: Sequence | None = None, gamma: Gamma | None = None):
    m = named_matrix(name)
    if weights is None:
        weights = [1] * len(m) if gamma is None or gamma.rank == 1 else \
            [(1,) + (0,) * (gamma.rank - 1)] * len(m)
    return CoxeterSpec.build(m, weights, gamma, name)


def parabolic_spec(spec: CoxeterSpec, subset: Sequence[int]) -> CoxeterSpec:
    subset = sorted(subset)
    m = tuple(tuple(spec.matrix[i][j] for j in subset) for i in subset)
    name = f"{spec.name or 'W'}_{{{','.join(str(i + 1) for i in subset)}}}"
    return CoxeterSpec(m, tuple(spec.weights[i] for i in subset), spec.gamma, name)


# ----------------------------------------------------------------------------
# Todd-Coxeter

def _coset_table(matrix, max_cosets: int) -> list[list[int]]:
    n = len(matrix)
    relators = []
    for i in range(n):
        for j in range(i + 1, n):
            relators.append([i, j] * matrix[i][j])
    tab: list[list[int]] = [[-1] * n]
    parent = [0]

    def rep(c):
        r = c
        while parent[r] != r:
            r = parent[r]
        while parent[c] != r:
            parent[c], c = r, parent[c]
        return r

    def merge(a, b, queue):
        a, b = rep(a), rep(b)
        if a == b:
            return
        if b < a:
            a, b = b, a
        parent[b] = a
        queue.append(b)

    def coincidence(a, b):
        queue: list[int] = []
        merge(a, b, queue)
        k = 0
        while k < len(queue):
            g = queue[k]
            k += 1
            for x in range(n):
                d = tab[g][x]
                if d < 0:
                    continue
                tab[d][x] = -1
                mu, nu = rep(g), rep(d)
                if tab[mu][x] >= 0:
                    merge(nu, tab[mu][x], queue)
                elif tab[nu][x] >= 0:
                    merge(mu, tab[nu][x], queue)
                else:
                    tab[mu][x] = nu
                    tab[nu][x] = mu

    def define(c, x):
        if len(tab) >= max_cosets:
            raise CoxeterError("group too large or infinite "
                               f"(coset enumeration exceeded {max_cosets} cosets)")
        d = len(tab)
        tab.append([-1] * n)
        parent.append(d)
        tab[c][x] = d
        tab[d][x] = c

    def scan_and_fill(a, word):
        f, i = a, 0
        b, j = a, len(word) - 1
        while True:
            while i <= j and tab[f][word[i]] >= 0:
                f = tab[f][word[i]]
                i += 1
            if i > j:
                if f != a:
                    coincidence(f, a)
                return
            while j >= i and tab[b][word[j]] >= 0:
                b = tab[b][word[j]]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                tab[f][word[i]] = b
                tab[b][word[i]] = f
                return
            define(f, word[i])

    a = 0
    while a < len(tab):
        if parent[a] == a:
            for r in relators:
                if parent[a] != a:
                    break
                scan_and_fill(a, r)
            if parent[a] == a:
                for x in range(n):
                    if tab[a][x] < 0:
                        define(a, x)
        a += 1

    live = [c for c in range(len(tab)) if parent[c] == c]
    index = {c: k for k, c in enumerate(live)}
    return [[index[rep(tab[c][x])] for x in range(n)] for c in live]


@dataclass(frozen=True, eq=False)
class GroupTable:
    """An enumerated finite Coxeter group; elements are indices 0..size-1."""
    spec: CoxeterSpec
    size: int
    length: list[int]
    right_mul: list[list[int]]   # right_mul[w][s] = w s
    left_mul: list[list[int]]    # left_mul[w][s] = s w
    inverse: list[int]
    weight: list[int]            # phi(w), packed
    word: list[tuple[int, ...]]  # lex-minimal reduced word

    @property
    def rank(self) -> int:
        return self.spec.rank

    @property
    def gamma(self) -> Gamma:
        return self.spec.gamma

    @cached_property
    def index_of_word(self) -> dict:
        return {w: i for i, w in enumerate(self.word)}

    def element(self, word: Iterable[int]) -> int:
        """Element represented by an arbitrary (not necessarily reduced) word."""
        w = 0
        rm = self.right_mul
        for s in word:
            w = rm[w][s]
        return w

    def mul(self, x: int, y: int) -> int:
        rm = self.right_mul
        for s in self.word[y]:
            x = rm[x][s]
        return x

    def right_descents(self, w: int) -> list[int]:
        lw = self.length[w]
        return [s for s in range(self.rank) if self.length[self.right_mul[w][s]] < lw]

    def left_descents(self, w: int) -> list[int]:
        lw = self.length[w]
        return [s for s in range(self.rank) if self.length[self.left_mul[w][s]] < lw]

    @cached_property
    def longest(self) -> int:
        return max(range(self.size), key=self.length.__getitem__)

    @cached_property
    def by_length(self) -> list[list[int]]:
        levels: list[list[int]] = [[] for _ in range(max(self.length) + 1)]
        for w in range(self.size):
            levels[self.length[w]].append(w)
        return levels

    def format(self, w: int) -> str:
        return "".join(f"s{s + 1}" for s in self.word[w]) or "1"

    def is_involution(self, w: int) -> bool:
        return self.inverse[w] == w


def enumerate_group(spec: CoxeterSpec, cap: int = DEFAULT_CAP) -> GroupTable:
    """Enumerate W with deterministic numbering (length, lex-minimal word)."""
    n = spec.rank
    if n == 0:
        return GroupTable(spec, 1, [0], [[]], [[]], [0], [0], [()])
    raw = _coset_table(spec.matrix, max(20 * cap, 50_000))
    if len(raw) > cap:
        raise CoxeterError(f"group too large or infinite (|W| = {len(raw)} > cap {cap})")

    # BFS by length; lexmin(w) = min over right descents s of lexmin(ws) + s.
    size = len(raw)
    length = [-1] * size
    words: list = [None] * size
    length[0] = 0
    words[0] = ()
    frontier = [0]
    while frontier:
        nxt = {}
        for w in frontier:
            for s in range(n):
                v = raw[w][s]
                if length[v] == -1 or length[v] == length[w] + 1:
                    cand = words[w] + (s,)
                    if v not in nxt or cand < nxt[v]:
                        nxt[v] = cand
        for v, wd in nxt.items():
            length[v] = len(wd)
            words[v] = wd
        frontier = list(nxt)

    order = sorted(range(size), key=lambda w: (length[w], words[w]))
    new = {old: k for k, old in enumerate(order)}
    right_mul = [[new[raw[old][s]] for s in range(n)] for old in order]
    length = [length[old] for old in order]
    words = [words[old] for old in order]

    def fold(start, wd):
        for s in wd:
            start = right_mul[start][s]
        return start

    left_mul = [[fold(right_mul[0][s], words[w]) for s in range(n)] for w in range(size)]
    inverse = [fold(0, reversed(words[w])) for w in range(size)]
    weight = [sum(spec.weights[s] for s in words[w]) for w in range(size)]

    for w in range(size):
        for s in range(n):
            ws = right_mul[w][s]
            if abs(length[ws] - length[w]) != 1:
                raise CoxeterError("internal error: length not +-1 under a generator")
            expect = weight[w] + spec.weights[s] if length[ws] > length[w] \
                else weight[w] - spec.weights[s]
            if weight[ws] != expect:
                raise CoxeterError("inconsistent weight function")
    return GroupTable(spec, size, length, right_mul, left_mul, inverse, weight, words)


# ----------------------------------------------------------------------------

def bruhat_leq(t: GroupTable, x: int, y: int) -> bool:
    """Bruhat order by the lifting property (memoized on the table)."""
    memo = t.__dict__.setdefault("_bruhat_memo", {})
    return _bruhat(t, x, y, memo)


def _bruhat(t, x, y, memo):
    if x == 0:
        return True
    if t.length[x] > t.length[y]:
        return False
    if x == y:
        return True
    key = (x, y)
    r = memo.get(key)
    if r is not None:
        return r
    s = t.left_descents(y)[0]
    sy = t.left_mul[y][s]
    sx = t.left_mul[x][s]
    if t.length[sx] < t.length[x]:
        r = _bruhat(t, sx, sy, memo)
    else:
        r = _bruhat(t, x, sy, memo)
    memo[key] = r
    return r


def longest_element(t: GroupTable, subset: Iterable[int]) -> int:
    """The longest element of the standard parabolic subgroup W_I."""
    subset = sorted(set(subset))
    w = 0
    grown = True
    while grown:
        grown = False
        for s in subset:
            ws = t.right_mul[w][s]
            if t.length[ws] > t.length[w]:
                w = ws
                grown = True
                break
    return w


def parabolic_elements(t: GroupTable, subset: Iterable[int]) -> list[int]:
    subset = sorted(set(subset))
    seen = {0}
    queue = deque([0])
    while queue:
        w = queue.popleft()
        for s in subset:
            v = t.right_mul[w][s]
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return sorted(seen)


# ----------------------------------------------------------------------------
# Diagram automorphisms

def _compose(a, b):
    return tuple(a[b[i]] for i in range(len(a)))


@dataclass(frozen=True)
class DiagramAutGroup:
    """A group of generator permutations preserving the matrix and weights.

    ``elements[k][i]`` is the image of generator ``i`` (0-based); the identity
    comes first and the rest are sorted.
    """
    elements: tuple[tuple[int, ...], ...]
    generators: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def generate(cls, spec: CoxeterSpec, perms: Iterable[Sequence[int]], one_based=True):
        n = spec.rank
        gens = []
        for perm in perms:
            p = tuple(int(i) - (1 if one_based else 0) for i in perm)
            if sorted(p) != list(range(n)):
                raise CoxeterError(f"automorphism {list(perm)} is not a permutation of the "
                                   f"{n} generators")
            for i in range(n):
                for j in range(n):
                    if spec.matrix[p[i]][p[j]] != spec.matrix[i][j]:
                        raise CoxeterError(
                            f"automorphism {list(perm)} does not preserve the Coxeter matrix")
                if spec.weights[p[i]] != spec.weights[i]:
                    raise CoxeterError(
                        f"automorphism {list(perm)} does not preserve the weights")
            gens.append(p)
        ident = tuple(range(n))
        elems = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    c = _compose(g, a)
                    if c not in elems:
                        elems.add(c)
                        nxt.append(c)
            frontier = nxt
        rest = sorted(elems - {ident})
        return cls(tuple([ident] + rest), tuple(gens))

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def prime_of_p_group(self) -> int | None:
        """p if the order is a power of the prime p (1 for the trivial group)."""
        n = self.order
        if n == 1:
            return 1
        p = 2
        while n % p:
            p += 1
        while n % p == 0:
            n //= p
        return p if n == 1 else None

    def orbits(self) -> list[tuple[int, ...]]:
        n = len(self.elements[0])
        seen = set()
        out = []
        for i in range(n):
            if i in seen:
                continue
            orb = tuple(sorted({g[i] for g in self.elements}))
            seen.update(orb)
            out.append(orb)
        return out

    def subgroups(self) -> list["DiagramAutGroup"]:
        """All subgroups, smallest first (brute force; G is tiny)."""
        elems = self.elements
        found = set()
        for r in range(0, min(3, len(elems)) + 1):
            for gens in itertools.combinations(elems[1:], r):
                sub = {elems[0]}
                frontier = [elems[0]]
                while frontier:
                    nxt = []
                    for a in frontier:
                        for g in gens:
                            c = _compose(g, a)
                            if c not in sub:
                                sub.add(c)
                                nxt.append(c)
                    frontier = nxt
                found.add(frozenset(sub))
        ident = elems[0]
        out = [DiagramAutGroup(tuple([ident] + sorted(s - {ident}))) for s in found]
        return sorted(out, key=lambda g: (g.order, g.elements))


def act_table(t: GroupTable, sigma: Sequence[int]) -> list[int]:
    """The permutation of W induced by a diagram automorphism."""
    return [t.element(sigma[s] for s in t.word[w]) for w in range(t.size)]


def act(t: GroupTable, sigma: Sequence[int], w: int) -> int:
    return t.element(sigma[s] for s in t.word[w])


@dataclass(frozen=True, eq=False)
class DescentSystem:
    """The fixed-point Coxeter system (W^G, S_G, phi_G) inside W."""
    table: GroupTable
    group: DiagramAutGroup
    orbits: tuple[tuple[int, ...], ...]
    s_omega: tuple[int, ...]
    sub_spec: CoxeterSpec
    sub_table: GroupTable
    embed: tuple[int, ...]  # W^G index -> W index

    @cached_property
    def restrict(self) -> dict[int, int]:
        """W index -> W^G index, for fixed elements only."""
        return {w: x for x, w in enumerate(self.embed)}

    @cached_property
    def actions(self) -> list[list[int]]:
        return [act_table(self.table, g) for g in self.group.elements]


def fixed_subsystem(t: GroupTable, g: DiagramAutGroup, cap: int = DEFAULT_CAP) -> DescentSystem:
    spec = t.spec
    orbits = tuple(g.orbits())
    s_omega = tuple(longest_element(t, orb) for orb in orbits)
    k = len(orbits)
    matrix = [[1] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            prod = t.mul(s_omega[i], s_omega[j])
            x, order = prod, 1
            while x != 0:
                x = t.mul(x, prod)
                order += 1
            matrix[i][j] = matrix[j][i] = order
    weights = [t.weight[s] for s in s_omega]
    name = f"{spec.name or 'W'}^G" if not g.is_trivial else (spec.name or "W")
    sub_spec = CoxeterSpec(tuple(map(tuple, matrix)), tuple(weights), spec.gamma, name)
    sub = enumerate_group(sub_spec, cap)
    embed = []
    for x in range(sub.size):
        w = 0
        for letter in sub.word[x]:
            w = t.mul(w, s_omega[letter])
        embed.append(w)
    if len(set(embed)) != sub.size:
        raise CoxeterError("internal error: W^G does not embed")
    return DescentSystem(t, g, orbits, s_omega, sub_spec, sub, tuple(embed))


def fixed_points(t: GroupTable, g: DiagramAutGroup) -> list[int]:
    tables = [act_table(t, s) for s in g.elements[1:]]
    return [w for w in range(t.size) if all(tb[w] == w for tb in tables)]
