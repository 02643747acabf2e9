"""
The Hecke algebra of (W, S, Gamma, phi) in the standard basis (T_w), its
Kazhdan-Lusztig basis (C_w), the trace tau and the structure constants of the
C-basis.

Elements of H are plain dicts ``{w: LaurentPoly}`` (``HeckeElement``) with no
zero coefficients.  The quadratic relation used throughout is

    T_s**2 = 1 + (e^{phi(s)} - e^{-phi(s)}) T_s.

Two independent routes compute structure constants:

* :func:`structure_constants` multiplies C_x and C_y in T-coordinates and
  peels off C-basis elements greedily (slow, obviously correct);
* :func:`structure_constant_sweep` computes every product C_x C_y at once in
  C-coordinates, by recursion on x through C_x = C_s C_{sx} - sum mu C_z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable

from .coxeter import GroupTable, bruhat_leq
from .laurent import ONE, LaurentPoly

__all__ = [
    "HeckeElement", "HeckeAlgebra", "KLTable", "StructureConstants",
    "kl_basis", "check_kl_table", "tau", "delta_n", "structure_constants",
    "structure_constant_sweep", "decompose_in_C",
]

HeckeElement = Dict[int, LaurentPoly]

_LP = LaurentPoly._raw


# raw dict helpers -------------------------------------------------------------

def _acc_mul(acc: dict, a: dict, b: dict, sign: int = 1) -> None:
    """acc += sign * a * b, all as exponent->coeff dicts (zeros may remain)."""
    get = acc.get
    for ka, va in a.items():
        va *= sign
        for kb, vb in b.items():
            k = ka + kb
            acc[k] = get(k, 0) + va * vb


def _acc_add(acc: dict, a: dict, sign: int = 1) -> None:
    get = acc.get
    for k, v in a.items():
        acc[k] = get(k, 0) + sign * v


def _finish(raw: dict) -> HeckeElement:
    out = {}
    for w, t in raw.items():
        t = {k: v for k, v in t.items() if v}
        if t:
            out[w] = _LP(t)
    return out


class HeckeAlgebra:
    """T-basis arithmetic for the Hecke algebra attached to a group table."""

    def __init__(self, table: GroupTable):
        self.table = table
        self.quad = [LaurentPoly({phi: 1, -phi: -1}) for phi in table.spec.weights]
        self._bar_T: dict[int, HeckeElement] = {0: {0: ONE}}

    def T(self, w: int) -> HeckeElement:
        return {w: ONE}

    def right_mul_T(self, a: HeckeElement, s: int) -> HeckeElement:
        """a * T_s."""
        t = self.table
        rm, ln = t.right_mul, t.length
        q = self.quad[s].terms
        raw: dict = {}
        for w, c in a.items():
            ws = rm[w][s]
            _acc_add(raw.setdefault(ws, {}), c.terms)
            if ln[ws] < ln[w]:
                _acc_mul(raw.setdefault(w, {}), c.terms, q)
        return _finish(raw)

    def left_mul_T(self, s: int, a: HeckeElement) -> HeckeElement:
        """T_s * a."""
        t = self.table
        lm, ln = t.left_mul, t.length
        q = self.quad[s].terms
        raw: dict = {}
        for w, c in a.items():
            sw = lm[w][s]
            _acc_add(raw.setdefault(sw, {}), c.terms)
            if ln[sw] < ln[w]:
                _acc_mul(raw.setdefault(w, {}), c.terms, q)
        return _finish(raw)

    def add(self, a: HeckeElement, b: HeckeElement, sign: int = 1) -> HeckeElement:
        raw = {w: dict(c.terms) for w, c in a.items()}
        for w, c in b.items():
            _acc_add(raw.setdefault(w, {}), c.terms, sign)
        return _finish(raw)

    def scale(self, c: LaurentPoly, a: HeckeElement) -> HeckeElement:
        return {w: c * v for w, v in a.items() if c * v}

    def multiply(self, a: HeckeElement, b: HeckeElement) -> HeckeElement:
        """a * b, folding T_w = T_{s1}...T_{sk} into a one letter at a time."""
        raw: dict = {}
        for w, c in sorted(b.items()):
            prod = a
            for s in self.table.word[w]:
                prod = self.right_mul_T(prod, s)
            for v, d in prod.items():
                _acc_mul(raw.setdefault(v, {}), d.terms, c.terms)
        return _finish(raw)

    def right_mul_T_inverse(self, a: HeckeElement, s: int) -> HeckeElement:
        """a * T_s^{-1}, with T_s^{-1} = T_s - (e^{phi(s)} - e^{-phi(s)})."""
        return self.add(self.right_mul_T(a, s), self.scale(self.quad[s], a), -1)

    def bar_T(self, w: int) -> HeckeElement:
        """bar(T_w) = T_{w^{-1}}^{-1} = T_{s1}^{-1} ... T_{sk}^{-1}."""
        cache = self._bar_T
        if w not in cache:
            word = self.table.word[w]
            prefix = self.table.element(word[:-1])
            cache[w] = self.right_mul_T_inverse(self.bar_T(prefix), word[-1])
        return cache[w]

    def bar(self, a: HeckeElement) -> HeckeElement:
        raw: dict = {}
        for w, c in a.items():
            cb = c.bar().terms
            for v, d in self.bar_T(w).items():
                _acc_mul(raw.setdefault(v, {}), d.terms, cb)
        return _finish(raw)

    def is_negative(self, a: HeckeElement) -> bool:
        """Membership in H_{<0}."""
        return all(c.negative_part_only() for c in a.values())


# -----------------------------------------------------------------------------

@dataclass(eq=False)
class KLTable:
    """C_w in T-coordinates: ``C[w][y] = p_{y,w}`` (with p_{w,w} = 1).

    ``mu[(s, u)]`` lists the correction terms of C_s C_u for su > u:
    C_s C_u = C_{su} + sum mu C_z.
    """
    table: GroupTable
    C: list[HeckeElement]
    recipe: list = field(default_factory=list)  # recipe[w] = (s, sw, [(z, mu)])

    def p(self, y: int, w: int) -> LaurentPoly:
        return self.C[w].get(y, LaurentPoly())

    def nonzero_pairs(self) -> Iterable[tuple[int, int]]:
        for w, cw in enumerate(self.C):
            for y in cw:
                if y != w:
                    yield y, w


def _eliminate(t: GroupTable, C: list, raw: dict, top: int | None = None):
    """Greedy C-expansion of the element ``raw`` (T-coords, raw dicts).

    Returns [(z, coefficient)] in decreasing length, excluding ``top`` (which
    must have coefficient 1).  Elements C[z] needed must already exist.  The
    remainder must vanish, otherwise an AssertionError is raised.
    """
    ln = t.length
    out = []
    level = max(ln[w] for w in raw) if raw else -1
    while level >= 0:
        for z in sorted(w for w in raw if ln[w] == level):
            c = {k: v for k, v in raw.pop(z).items() if v}
            if not c:
                continue
            if z == top:
                assert c == {0: 1}, "leading coefficient is not 1"
            else:
                out.append((z, _LP(c)))
            for y, py in C[z].items():
                _acc_mul(raw.setdefault(y, {}), py.terms, c, -1)
        level -= 1
    return out


def kl_basis(t: GroupTable, algebra: HeckeAlgebra | None = None) -> KLTable:
    """C_w for all w, by induction on length.

    C_w is obtained from C_s C_{sw} (s the lowest-index left descent of w) by
    subtracting sym_plus(c_y) C_y for y below w in decreasing length, where c_y
    is the current coefficient of T_y.
    """
    H = algebra or HeckeAlgebra(t)
    ln, lm = t.length, t.left_mul
    C: list = [None] * t.size
    C[0] = {0: ONE}
    recipe: list = [None] * t.size
    for w in range(1, t.size):
        s = t.left_descents(w)[0]
        sw = lm[w][s]
        phi = t.spec.weights[s]
        prod = H.left_mul_T(s, C[sw])
        raw = {y: dict(c.terms) for y, c in prod.items()}
        for y, c in C[sw].items():
            _acc_add(raw.setdefault(y, {}), c.shift(-phi).terms)
        # subtract sym_plus(c_y) C_y level by level
        corrections = []
        level = ln[w] - 1
        while level >= 0:
            for y in sorted(y for y in raw if ln[y] == level):
                c = _LP({k: v for k, v in raw[y].items() if v})
                q = c.sym_plus()
                if q:
                    corrections.append((y, q))
                    for v, pv in C[y].items():
                        _acc_mul(raw.setdefault(v, {}), pv.terms, q.terms, -1)
            level -= 1
        cw = _finish(raw)
        assert cw.get(w) == ONE, f"C_{w} has wrong top coefficient"
        C[w] = cw
        recipe[w] = (s, sw, corrections)
    kl = KLTable(t, C, recipe)
    return kl


def check_kl_table(kl: KLTable, algebra: HeckeAlgebra | None = None,
                   elements: Iterable[int] | None = None) -> list[str]:
    """Defining properties of C_w; returns a list of violations (empty if fine)."""
    t = kl.table
    H = algebra or HeckeAlgebra(t)
    bad = []
    for w in (range(t.size) if elements is None else elements):
        cw = kl.C[w]
        if cw.get(w) != ONE:
            bad.append(f"w={w}: top coefficient {cw.get(w)}")
        for y, p in cw.items():
            if y == w:
                continue
            if not p.negative_part_only():
                bad.append(f"p[{y},{w}] = {p} not in A_<0")
            if not (t.length[y] < t.length[w] and bruhat_leq(t, y, w)):
                bad.append(f"p[{y},{w}] != 0 but not y < w")
        if H.bar(cw) != cw:
            bad.append(f"C_{w} not bar-invariant")
    return bad


def tau(a: HeckeElement) -> LaurentPoly:
    return a.get(0, LaurentPoly())


def delta_n(kl: KLTable, w: int) -> tuple[int, int]:
    """(Delta(w), n_w): minus the degree and the leading coefficient of tau(C_w)."""
    tc = tau(kl.C[w])
    if not tc:
        raise AssertionError(f"tau(C_{w}) = 0")
    d = tc.degree
    return -d, tc.coefficient(d)


def decompose_in_C(t: GroupTable, kl: KLTable, a: HeckeElement) -> dict[int, LaurentPoly]:
    """Coordinates of ``a`` in the C-basis by greedy elimination."""
    raw = {w: dict(c.terms) for w, c in a.items()}
    return dict(_eliminate(t, kl.C, raw))


def structure_constants(t: GroupTable, kl: KLTable, x: int, y: int,
                        algebra: HeckeAlgebra | None = None) -> dict[int, LaurentPoly]:
    """{z: h_{x,y,z}} from the T-basis product C_x C_y."""
    H = algebra or HeckeAlgebra(t)
    return decompose_in_C(t, kl, H.multiply(kl.C[x], kl.C[y]))


# -----------------------------------------------------------------------------

class StructureConstants:
    """All h_{x,y,z}: ``rows[x][y]`` is a dict ``{z: LaurentPoly}``."""

    def __init__(self, table: GroupTable, rows: list[list[dict]]):
        self.table = table
        self.rows = rows

    def get(self, x: int, y: int, z: int) -> LaurentPoly:
        return self.rows[x][y].get(z, _ZERO)

    def product(self, x: int, y: int) -> dict:
        return self.rows[x][y]

    def items(self):
        for x, row in enumerate(self.rows):
            for y, d in enumerate(row):
                for z, h in d.items():
                    yield x, y, z, h

    def nonzero_count(self) -> int:
        return sum(len(d) for row in self.rows for d in row)


_ZERO = LaurentPoly()


def left_C_s_table(t: GroupTable, kl: KLTable, algebra: HeckeAlgebra | None = None):
    """lc[s][u] = [(v, poly)] with C_s C_u = sum poly C_v."""
    H = algebra or HeckeAlgebra(t)
    lc = []
    for s in range(t.rank):
        phi = t.spec.weights[s]
        cs_coef = LaurentPoly({phi: 1, -phi: 1})
        row = []
        for u in range(t.size):
            su = t.left_mul[u][s]
            if t.length[su] < t.length[u]:
                row.append([(u, cs_coef)])
                continue
            prod = H.left_mul_T(s, kl.C[u])
            raw = {y: dict(c.terms) for y, c in prod.items()}
            for y, c in kl.C[u].items():
                _acc_add(raw.setdefault(y, {}), c.shift(-phi).terms)
            rest = _eliminate(t, kl.C, raw, top=su)
            row.append([(su, ONE)] + rest)
        lc.append(row)
    return lc


def _column(t: GroupTable, kl: KLTable, lc, y: int) -> list[dict]:
    """[{z: h_{x,y,z}} for x in W] for one fixed y."""
    col: list = [None] * t.size
    col[0] = {y: ONE}
    recipe = kl.recipe
    for x in range(1, t.size):
        s, sx, corr = recipe[x]
        lcs = lc[s]
        acc: dict = {}
        for u, a in col[sx].items():
            at = a.terms
            for v, b in lcs[u]:
                d = acc.get(v)
                if d is None:
                    d = acc[v] = {}
                _acc_mul(d, at, b.terms)
        for z, m in corr:
            mt = m.terms
            for v, a in col[z].items():
                d = acc.get(v)
                if d is None:
                    d = acc[v] = {}
                _acc_mul(d, a.terms, mt, -1)
        out = {}
        for v in sorted(acc):
            d = {k: c for k, c in acc[v].items() if c}
            if d:
                out[v] = _LP(d)
        col[x] = out
    return col


def structure_constant_sweep(t: GroupTable, kl: KLTable,
                             algebra: HeckeAlgebra | None = None,
                             workers: int = 1) -> StructureConstants:
    """Every h_{x,y,z}, computed column by column (one column per y).

    Columns are independent, so ``workers > 1`` farms them out to processes;
    the assembled result does not depend on scheduling.
    """
    lc = left_C_s_table(t, kl, algebra)
    ys = list(range(t.size))
    if workers > 1 and t.size > 32:
        cols = _parallel_columns(t, kl, lc, ys, workers)
    else:
        cols = [_column(t, kl, lc, y) for y in ys]
    rows = [[cols[y][x] for y in ys] for x in range(t.size)]
    return StructureConstants(t, rows)


_WORKER_STATE: dict = {}


def _worker_columns(ys):
    t, kl, lc = _WORKER_STATE["args"]
    return [_column(t, kl, lc, y) for y in ys]


def _parallel_columns(t, kl, lc, ys, workers):
    import multiprocessing as mp
    from concurrent.futures import ProcessPoolExecutor

    try:
        ctx = mp.get_context("fork")
    except ValueError:
        return [_column(t, kl, lc, y) for y in ys]
    _WORKER_STATE["args"] = (t, kl, lc)
    chunks = [ys[i::workers] for i in range(workers)]
    try:
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
            parts = list(ex.map(_worker_columns, chunks))
    finally:
        _WORKER_STATE.clear()
    cols: list = [None] * len(ys)
    for chunk, part in zip(chunks, parts):
        for y, c in zip(chunk, part):
            cols[y] = c
    return cols


def max_degree(polys: Iterable[LaurentPoly]):
    return max((p.degree for p in polys), default=-math.inf)
