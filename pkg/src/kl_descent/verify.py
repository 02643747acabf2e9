"""
Exhaustive checks of Lusztig's conjectures P1-P15 on a finite datum, of the
consequences (b), (c) of the P1-P4 lemma, of the descent theorem for
(W^G, phi_G) and of the exploratory questions on Delta and <=_L.

Each conjecture is a predicate over a tuple of elements.  A check runs the
predicate over the whole quantified universe (or a seeded sample above the
size gates) and records failing tuples as witnesses; :func:`recheck` re-runs
the predicate on a witness, so every reported failure can be reproduced.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .coxeter import DescentSystem
from .instance import Instance

__all__ = [
    "ConjectureReport", "CONJECTURES", "check_conjectures", "recheck",
    "check_lemma_P", "check_theorem_A", "probe_open_questions",
    "check_boundedness", "FULL_GATE", "P15_GATE",
]

CONJECTURES = tuple(f"P{i}" for i in range(1, 16))
FULL_GATE = 400
P15_GATE = 48
MAX_WITNESSES = 10
PAIR_SAMPLES = 20000
P15_SAMPLES = 64


@dataclass
class ConjectureReport:
    instance: dict
    checks: list[dict] = field(default_factory=list)

    def status(self, name: str) -> str | None:
        for c in self.checks:
            if c["name"] == name:
                return c["status"]
        return None

    def passed(self, names) -> bool:
        return all(self.status(n) == "pass" for n in names)

    @property
    def failed(self) -> list[str]:
        return [c["name"] for c in self.checks if c["status"] == "fail"]

    def to_json(self) -> dict:
        return {"instance": self.instance, "checks": self.checks}


class _Ctx:
    def __init__(self, inst: Instance):
        self.inst = inst
        self.t = inst.table
        self.c = inst.cells
        self.fmt = self.t.format
        self.g = inst.gamma
        self.duflo = set(self.c.duflo)

    def gam(self, x, y, z):
        return self.c.gamma.get((x, y, z), 0)

    def a(self, z):
        return self.c.a[z]

    def fa(self, z):
        return self.g.format(self.c.a[z])


# predicates: return None when the statement holds for the tuple --------------

def _p1(cx: _Ctx, z):
    if cx.c.a[z] > cx.c.delta[z]:
        return {"z": cx.fmt(z), "a": cx.fa(z), "Delta": cx.g.format(cx.c.delta[z])}


def _p2(cx: _Ctx, x, y, d):
    if d in cx.duflo and cx.gam(x, y, d) and x != cx.t.inverse[y]:
        return {"x": cx.fmt(x), "y": cx.fmt(y), "d": cx.fmt(d), "gamma": cx.gam(x, y, d)}


def _duflo_partners(cx: _Ctx, y):
    yi = cx.t.inverse[y]
    return [d for d in cx.c.duflo if cx.gam(yi, y, d)]


def _p3(cx: _Ctx, y):
    ds = _duflo_partners(cx, y)
    if len(ds) != 1:
        return {"y": cx.fmt(y), "duflo_with_nonzero_gamma": [cx.fmt(d) for d in ds]}


def _p4(cx: _Ctx, zp, z):
    if cx.c.two_sided().leq(zp, z) and not cx.a(z) <= cx.a(zp):
        return {"z'": cx.fmt(zp), "z": cx.fmt(z), "a(z')": cx.fa(zp), "a(z)": cx.fa(z)}


def _p5(cx: _Ctx, y, d):
    g = cx.gam(cx.t.inverse[y], y, d)
    if d in cx.duflo and g and not (g == cx.c.n[d] and g in (1, -1)):
        return {"y": cx.fmt(y), "d": cx.fmt(d), "gamma": g, "n_d": cx.c.n[d]}


def _p6(cx: _Ctx, d):
    if d in cx.duflo and cx.t.inverse[d] != d:
        return {"d": cx.fmt(d)}


def _p7(cx: _Ctx, x, y, z):
    if cx.gam(x, y, z) != cx.gam(y, z, x):
        return {"x": cx.fmt(x), "y": cx.fmt(y), "z": cx.fmt(z),
                "gamma_xyz": cx.gam(x, y, z), "gamma_yzx": cx.gam(y, z, x)}


def _p8(cx: _Ctx, x, y, z):
    if not cx.gam(x, y, z):
        return None
    L, inv = cx.c.left(), cx.t.inverse
    if not (L.equiv(x, inv[y]) and L.equiv(y, inv[z]) and L.equiv(z, inv[x])):
        return {"x": cx.fmt(x), "y": cx.fmt(y), "z": cx.fmt(z), "gamma": cx.gam(x, y, z)}


def _same_a_implies_equiv(kind):
    def pred(cx: _Ctx, zp, z):
        pre = cx.c.preorders[kind]
        if pre.leq(zp, z) and cx.a(zp) == cx.a(z) and not pre.equiv(zp, z):
            return {"z'": cx.fmt(zp), "z": cx.fmt(z), "a": cx.fa(z)}
    return pred


def _p12(cx: _Ctx, subset, z):
    sub, embed = cx.inst.parabolic(subset)
    a_sub = sub.cells.a
    local = embed.index(z)
    if a_sub[local] != cx.a(z):
        return {"I": [s + 1 for s in subset], "z": cx.fmt(z),
                "a_I": cx.g.format(a_sub[local]), "a": cx.fa(z)}


def _p13(cx: _Ctx, k):
    cell = cx.c.left().cells[k]
    ds = [d for d in cell if d in cx.duflo]
    if len(ds) != 1:
        return {"cell": [cx.fmt(x) for x in cell], "duflo": [cx.fmt(d) for d in ds]}
    d = ds[0]
    missing = [y for y in cell if not cx.gam(cx.t.inverse[y], y, d)]
    if missing:
        return {"cell": [cx.fmt(x) for x in cell], "d": cx.fmt(d),
                "gamma_zero_for": [cx.fmt(y) for y in missing]}


def _p14(cx: _Ctx, z):
    if not cx.c.two_sided().equiv(z, cx.t.inverse[z]):
        return {"z": cx.fmt(z)}


def _tensor_acc(acc: dict, p, q) -> None:
    for k1, v1 in p.terms.items():
        for k2, v2 in q.terms.items():
            key = (k1, k2)
            acc[key] = acc.get(key, 0) + v1 * v2


def _clean(acc: dict) -> dict:
    return {k: v for k, v in acc.items() if v}


def _p15_sides(cx: _Ctx, x, xp, w):
    """Both sides of the P15 identity for fixed (x, x', w), as {y: tensor}."""
    rows = cx.inst.h.rows
    lhs: dict = {}
    for yp, h1 in rows[w][xp].items():
        for y, h2 in rows[x][yp].items():
            _tensor_acc(lhs.setdefault(y, {}), h1, h2)
    rhs: dict = {}
    for yp, h2 in rows[x][w].items():
        for y, h1 in rows[yp][xp].items():
            _tensor_acc(rhs.setdefault(y, {}), h1, h2)
    return lhs, rhs


def _p15(cx: _Ctx, x, xp, y, w):
    if cx.a(y) != cx.a(w):
        return None
    lhs, rhs = _p15_sides(cx, x, xp, w)
    left, right = _clean(lhs.get(y, {})), _clean(rhs.get(y, {}))
    if left != right:
        return _p15_witness(cx, x, xp, y, w, left, right)


def _p15_witness(cx, x, xp, y, w, left, right):
    def fmt(tensor):
        return [[cx.g.format(k1), cx.g.format(k2), v] for (k1, k2), v in sorted(tensor.items())]
    return {"x": cx.fmt(x), "x'": cx.fmt(xp), "y": cx.fmt(y), "w": cx.fmt(w),
            "lhs": fmt(left), "rhs": fmt(right)}


_PREDICATES = {
    "P1": _p1, "P2": _p2, "P3": _p3, "P4": _p4, "P5": _p5, "P6": _p6,
    "P7": _p7, "P8": _p8, "P9": _same_a_implies_equiv("L"),
    "P10": _same_a_implies_equiv("R"), "P11": _same_a_implies_equiv("LR"),
    "P12": _p12, "P13": _p13, "P14": _p14, "P15": _p15,
}


def recheck(inst: Instance, name: str, elements) -> dict | None:
    """Re-run one conjecture on one tuple; None means the statement holds."""
    return _PREDICATES[name](_Ctx(inst), *elements)


# universes -----------------------------------------------------------------

def _pairs(n, sample, rng):
    if not sample:
        return n * n, None, ((i, j) for i in range(n) for j in range(n))
    pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(PAIR_SAMPLES)]
    return PAIR_SAMPLES, f"sampled {PAIR_SAMPLES} pairs (|W| > {FULL_GATE})", iter(pairs)


def _universe(cx: _Ctx, name: str, rng: random.Random):
    """(universe size, note, iterator of tuples) for one conjecture."""
    n = cx.t.size
    big = n > FULL_GATE
    nonzero = sorted(cx.c.gamma)
    if name in ("P1", "P14"):
        return n, None, ((z,) for z in range(n))
    if name == "P2":
        # only nonzero gamma can violate; the statement quantifies over W x W x D
        return n * n * len(cx.duflo), None, (k for k in nonzero if k[2] in cx.duflo)
    if name == "P3":
        return n, None, ((y,) for y in range(n))
    if name == "P5":
        return n * len(cx.duflo), None, ((y, d) for y in range(n) for d in cx.c.duflo)
    if name == "P6":
        return len(cx.duflo), None, ((d,) for d in cx.c.duflo)
    if name in ("P7", "P8"):
        # for P7, a violation always has a nonzero side, and rotating a
        # nonzero triple visits it
        return n ** 3, None, iter(nonzero)
    if name in ("P4", "P9", "P10", "P11"):
        return _pairs(n, big, rng)
    if name == "P12":
        subsets = [sub for r in range(cx.t.rank)
                   for sub in itertools.combinations(range(cx.t.rank), r)]
        tuples = []
        for sub in subsets:
            _, embed = cx.inst.parabolic(sub)
            tuples.extend((sub, z) for z in embed)
        return len(tuples), None, iter(tuples)
    if name == "P13":
        cells = cx.c.left().cells
        return len(cells), None, ((k,) for k in range(len(cells)))
    raise KeyError(name)


def _check_p15(cx: _Ctx, rng: random.Random) -> dict:
    n = cx.t.size
    a = cx.c.a
    same_a: dict = {}
    for w in range(n):
        same_a.setdefault(a[w], []).append(w)
    per_w = [same_a[a[w]] for w in range(n)]
    if n <= P15_GATE:
        blocks = [(x, xp) for x in range(n) for xp in range(n)]
        note = None
    else:
        blocks = [(rng.randrange(n), rng.randrange(n)) for _ in range(P15_SAMPLES)]
        note = f"sampled {P15_SAMPLES} (x, x') pairs (|W| > {P15_GATE})"
    universe = len(blocks) * sum(len(per_w[w]) for w in range(n))
    witnesses, violations = [], 0
    for x, xp in blocks:
        for w in range(n):
            lhs, rhs = _p15_sides(cx, x, xp, w)
            for y in per_w[w]:
                left, right = _clean(lhs.get(y, {})), _clean(rhs.get(y, {}))
                if left != right:
                    violations += 1
                    if len(witnesses) < MAX_WITNESSES:
                        wit = _p15_witness(cx, x, xp, y, w, left, right)
                        wit["elements"] = [x, xp, y, w]
                        witnesses.append(wit)
    return _result("P15", universe, violations, witnesses, note)


def _result(name, universe, violations, witnesses, note=None):
    r = {"name": name, "status": "pass" if not violations else "fail",
         "universe": universe, "violations": violations, "witnesses": witnesses}
    if note:
        r["note"] = note
    return r


def check_conjectures(inst: Instance, which=CONJECTURES, seed: int = 0) -> ConjectureReport:
    cx = _Ctx(inst)
    report = ConjectureReport(inst.describe())
    for name in CONJECTURES:
        if name not in which:
            continue
        rng = random.Random(f"{seed}:{name}")
        if name == "P15":
            report.checks.append(_check_p15(cx, rng))
            continue
        universe, note, tuples = _universe(cx, name, rng)
        pred = _PREDICATES[name]
        witnesses, violations = [], 0
        for tup in tuples:
            bad = pred(cx, *tup)
            if bad is not None:
                violations += 1
                if len(witnesses) < MAX_WITNESSES:
                    bad["elements"] = [list(e) if isinstance(e, tuple) else e for e in tup]
                    witnesses.append(bad)
        report.checks.append(_result(name, universe, violations, witnesses, note))
    return report


# -----------------------------------------------------------------------------

def check_lemma_P(inst: Instance, report: ConjectureReport) -> dict:
    """gamma_{d,d,d} = n_d = +-1 on D, and gamma_{x,d,x^{-1}} = +-1 for the d of x."""
    out = {"check": "lemma_P", "group": inst.name}
    if not report.passed(("P1", "P2", "P3", "P4")):
        out.update(status="skipped", reason="P1-P4 not verified")
        return out
    cx = _Ctx(inst)
    inv = cx.t.inverse
    wb, wc = [], []
    for d in cx.c.duflo:
        g = cx.gam(d, d, d)
        if not (g == cx.c.n[d] and g in (1, -1)):
            wb.append({"d": cx.fmt(d), "gamma_ddd": g, "n_d": cx.c.n[d]})
    for x in range(cx.t.size):
        (d,) = _duflo_partners(cx, x)
        g = cx.gam(x, d, inv[x])
        if g not in (1, -1):
            wc.append({"x": cx.fmt(x), "d": cx.fmt(d), "gamma": g})
    out["parts"] = {
        "b": {"checked": len(cx.c.duflo), "status": "fail" if wb else "pass",
              "witnesses": wb[:MAX_WITNESSES]},
        "c": {"checked": cx.t.size, "status": "fail" if wc else "pass",
              "witnesses": wc[:MAX_WITNESSES]},
    }
    out["status"] = "fail" if wb or wc else "pass"
    return out


_THEOREM_A_NEEDS = {
    "a": ("P1", "P2", "P3", "P4"),
    "b": ("P1", "P2", "P3", "P4"),
    "c": ("P1", "P2", "P3", "P4", "P13"),
    "d": ("P1", "P2", "P3", "P4", "P9", "P13"),
}


def check_theorem_A(d: DescentSystem, inst: Instance, sub: Instance,
                    rep: ConjectureReport, rep_G: ConjectureReport) -> dict:
    """Compare a, D and cells of (W^G, phi_G) with those of (W, phi) on W^G."""
    emb = d.embed
    tG = sub.table
    c, cG = inst.cells, sub.cells
    names = [tG.format(x) for x in range(tG.size)]
    g = inst.gamma
    parts = {}
    for part, needs in _THEOREM_A_NEEDS.items():
        if not (rep.passed(needs) and rep_G.passed(needs)):
            parts[part] = {"status": "skipped",
                           "reason": f"requires {', '.join(needs)} for both data"}
            continue
        wit = []
        if part == "a":
            checked = tG.size
            for x in range(tG.size):
                if cG.a[x] != c.a[emb[x]]:
                    wit.append({"x": names[x], "a_G": g.format(cG.a[x]),
                                "a": g.format(c.a[emb[x]])})
        elif part == "b":
            checked = tG.size
            dg = set(cG.duflo)
            dw = set(c.duflo)
            for x in range(tG.size):
                if (x in dg) != (emb[x] in dw):
                    wit.append({"x": names[x], "in_D_G": x in dg, "in_D": emb[x] in dw})
        else:
            kinds = ("L", "R") if part == "c" else ("LR",)
            checked = 0
            for kind in kinds:
                pre, preG = c.preorders[kind], cG.preorders[kind]
                for x in range(tG.size):
                    for y in range(tG.size):
                        checked += 1
                        if pre.equiv(emb[x], emb[y]) != preG.equiv(x, y):
                            wit.append({"kind": kind, "x": names[x], "y": names[y],
                                        "equiv_W": pre.equiv(emb[x], emb[y]),
                                        "equiv_W^G": preG.equiv(x, y)})
        parts[part] = {"status": "fail" if wit else "pass", "checked": checked,
                       "witnesses": wit[:MAX_WITNESSES]}
    statuses = {p["status"] for p in parts.values()}
    status = "fail" if "fail" in statuses else ("pass" if statuses == {"pass"} else "partial")
    return {"check": "theorem_A", "group": inst.name,
            "automorphism": [[i + 1 for i in gen] for gen in d.group.generators],
            "fixed_subsystem": sub.describe(),
            "status": status, "parts": parts}


def probe_open_questions(d: DescentSystem, inst: Instance, sub: Instance) -> dict:
    """Delta(z) <= Delta_G(z)?  x <=^G_L y  =>  x <=_L y?  Empirical only."""
    emb = d.embed
    tG = sub.table
    c, cG = inst.cells, sub.cells
    g = inst.gamma
    delta_w = []
    for z in range(tG.size):
        if not c.delta[emb[z]] <= cG.delta[z]:
            delta_w.append({"z": tG.format(z), "Delta": g.format(c.delta[emb[z]]),
                            "Delta_G": g.format(cG.delta[z])})
    order_w = []
    L, LG = c.left(), cG.left()
    for x in range(tG.size):
        for y in range(tG.size):
            if LG.leq(x, y) and not L.leq(emb[x], emb[y]):
                order_w.append({"x": tG.format(x), "y": tG.format(y)})
    return {
        "check": "open_questions", "exploratory": True, "group": inst.name,
        "delta_le_delta_G": {"holds": not delta_w, "checked": tG.size,
                             "counterexamples": delta_w[:MAX_WITNESSES]},
        "left_preorder_descends": {"holds": not order_w, "checked": tG.size ** 2,
                                   "counterexamples": order_w[:MAX_WITNESSES]},
    }


def check_boundedness(inst: Instance, gate: int = P15_GATE) -> dict:
    """max deg tau(T_x T_y T_z) over all triples, for |W| <= gate.

    tau(T_x T_y T_z) is the coefficient of T_{z^{-1}} in T_x T_y, so the
    maximum over z is the maximal degree of any coefficient of T_x T_y.
    """
    t = inst.table
    if t.size > gate:
        return {"check": "bounded", "status": "skipped",
                "reason": f"|W| = {t.size} > {gate}"}
    H = inst.algebra
    best = None
    for x in range(t.size):
        for y in range(t.size):
            for c in H.multiply(H.T(x), H.T(y)).values():
                if best is None or c.degree > best:
                    best = c.degree
    w0 = t.longest
    return {"check": "bounded", "status": "pass", "universe": t.size ** 3,
            "max_degree": inst.gamma.format(best),
            "phi_w0": inst.gamma.format(t.weight[w0])}
