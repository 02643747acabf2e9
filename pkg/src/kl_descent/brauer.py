"""
Modular descent for a p-group G of diagram automorphisms.

G permutes the standard basis (T_w) of H, so the Brauer quotient Br_G(H) is
free over F_p[Gamma] on the images of T_w, w in W^G: taking the Brauer image
of a G-fixed element amounts to dropping the coordinates outside W^G (orbit
sums of non-trivial orbits are relative traces) and reducing mod p.  The trace
ideal itself is never built.

Brauer elements are dicts ``{x: ModPPoly}`` keyed by W^G indices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .coxeter import DescentSystem
from .hecke import HeckeElement
from .instance import Instance
from .laurent import ModPPoly, is_prime

__all__ = [
    "BrauerError", "brauer_project", "can_G", "verify_morphism",
    "compare_kl_mod_p", "JRing", "j_ring", "verify_j_descent",
]

BrauerElement = dict  # W^G index -> ModPPoly

MAX_WITNESSES = 10
J_EXHAUSTIVE_GATE = 48


class BrauerError(ValueError):
    pass


def _check_p_group(d: DescentSystem, p: int) -> None:
    if not is_prime(p):
        raise BrauerError(f"p = {p} is not prime")
    q = d.group.prime_of_p_group()
    if q is None or (q != 1 and q != p):
        raise BrauerError(f"|G| = {d.group.order} is not a power of p = {p}")


def _reduce(c, p) -> ModPPoly | None:
    r = ModPPoly(p, c.terms)
    return r if r else None


def is_fixed(d: DescentSystem, a: HeckeElement) -> bool:
    for perm in d.actions[1:]:
        if len(a) != len({perm[w] for w in a}):
            return False
        for w, c in a.items():
            if a.get(perm[w]) != c:
                return False
    return True


def brauer_project(d: DescentSystem, a: HeckeElement, p: int) -> BrauerElement:
    """br_G of a G-fixed element of H."""
    _check_p_group(d, p)
    if not is_fixed(d, a):
        raise BrauerError("element is not G-fixed")
    out = {}
    restrict = d.restrict
    for w, c in a.items():
        x = restrict.get(w)
        if x is not None:
            r = _reduce(c, p)
            if r is not None:
                out[x] = r
    return dict(sorted(out.items()))


def can_G(d: DescentSystem, a: HeckeElement, p: int) -> BrauerElement:
    """can_G on an element of H_G (keys are W^G indices)."""
    _check_p_group(d, p)
    out = {}
    for x, c in a.items():
        r = _reduce(c, p)
        if r is not None:
            out[x] = r
    return dict(sorted(out.items()))


def _fmt_brauer(b: BrauerElement, names, gamma) -> dict:
    return {names[x]: c.format(gamma) for x, c in b.items()}


def _header(check: str, inst: Instance, d: DescentSystem, p: int) -> dict:
    gens = [[i + 1 for i in g] for g in d.group.generators]
    return {
        "check": check,
        "group": inst.name,
        "automorphism": gens[0] if len(gens) == 1 else gens,
        "p": p,
    }


def verify_morphism(d: DescentSystem, inst: Instance, sub: Instance, p: int) -> dict:
    """can_G(T^G_x T^G_y) = br_G(T_x T_y) for all x, y in W^G."""
    _check_p_group(d, p)
    H, HG = inst.algebra, sub.algebra
    names = [sub.table.format(x) for x in range(sub.table.size)]
    violations = []
    pairs = 0
    for x in range(sub.table.size):
        for y in range(sub.table.size):
            pairs += 1
            lhs = can_G(d, HG.multiply(HG.T(x), HG.T(y)), p)
            rhs = brauer_project(d, H.multiply(H.T(d.embed[x]), H.T(d.embed[y])), p)
            if lhs != rhs and len(violations) < MAX_WITNESSES:
                violations.append({"x": names[x], "y": names[y],
                                   "can_G": _fmt_brauer(lhs, names, inst.gamma),
                                   "br_G": _fmt_brauer(rhs, names, inst.gamma)})
    r = _header("prop_B", inst, d, p)
    r.update(pairs_checked=pairs, violations=violations,
             status="pass" if not violations else "fail")
    return r


def compare_kl_mod_p(d: DescentSystem, inst: Instance, sub: Instance, p: int) -> dict:
    """KL basis, structure constants, tau and gamma of H_G against H, mod p."""
    _check_p_group(d, p)
    tG = sub.table
    names = [tG.format(x) for x in range(tG.size)]
    emb = d.embed
    g = inst.gamma
    parts = {}

    viol = []
    for w in range(tG.size):
        lhs = can_G(d, sub.kl.C[w], p)
        rhs = brauer_project(d, inst.kl.C[emb[w]], p)
        if lhs != rhs and len(viol) < MAX_WITNESSES:
            viol.append({"w": names[w], "can_G": _fmt_brauer(lhs, names, g),
                         "br_G": _fmt_brauer(rhs, names, g)})
    parts["C_basis"] = {"checked": tG.size, "violations": viol}

    viol = []
    for w in range(tG.size):
        for y in range(tG.size):
            a = ModPPoly(p, sub.kl.p(y, w).terms)
            b = ModPPoly(p, inst.kl.p(emb[y], emb[w]).terms)
            if a != b and len(viol) < MAX_WITNESSES:
                viol.append({"y": names[y], "w": names[w],
                             "p_G": sub.kl.p(y, w).format(g),
                             "p": inst.kl.p(emb[y], emb[w]).format(g)})
    parts["kl_polynomials"] = {"checked": tG.size ** 2, "violations": viol}

    viol = []
    count = 0
    for x in range(tG.size):
        for y in range(tG.size):
            hg, hw = sub.h.rows[x][y], inst.h.rows[emb[x]][emb[y]]
            for z in range(tG.size):
                count += 1
                a, b = hg.get(z), hw.get(emb[z])
                ma = ModPPoly(p, a.terms if a else {})
                mb = ModPPoly(p, b.terms if b else {})
                if ma != mb and len(viol) < MAX_WITNESSES:
                    viol.append({"x": names[x], "y": names[y], "z": names[z],
                                 "h_G": a.format(g) if a else "0",
                                 "h": b.format(g) if b else "0"})
    parts["structure_constants"] = {"checked": count, "violations": viol}

    viol = []
    for z in range(tG.size):
        a = ModPPoly(p, sub.kl.p(0, z).terms)
        b = ModPPoly(p, inst.kl.p(0, emb[z]).terms)
        if a != b and len(viol) < MAX_WITNESSES:
            viol.append({"z": names[z], "tau_G": sub.kl.p(0, z).format(g),
                         "tau": inst.kl.p(0, emb[z]).format(g)})
    parts["tau"] = {"checked": tG.size, "violations": viol}

    viol = []
    count = 0
    cg, cw = sub.cells, inst.cells
    for x in range(tG.size):
        for y in range(tG.size):
            for z in range(tG.size):
                count += 1
                a = cg.gamma_of(x, y, z)
                b = cw.gamma_of(emb[x], emb[y], emb[z])
                if (a - b) % p and len(viol) < MAX_WITNESSES:
                    viol.append({"x": names[x], "y": names[y], "z": names[z],
                                 "gamma_G": a, "gamma": b})
    parts["gamma"] = {"checked": count, "violations": viol}

    r = _header("kl_mod_p", inst, d, p)
    ok = all(not v["violations"] for v in parts.values())
    r.update(parts=parts, status="pass" if ok else "fail")
    return r


# -----------------------------------------------------------------------------

@dataclass
class JRing:
    """The asymptotic ring: t_x t_y = sum_z gamma_{x,y,z^{-1}} t_z."""
    size: int
    mult: dict  # (x, y) -> {z: int}

    def product(self, x: int, y: int) -> dict:
        return self.mult.get((x, y), {})

    def multiply(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for x, ca in a.items():
            for y, cb in b.items():
                for z, c in self.product(x, y).items():
                    out[z] = out.get(z, 0) + ca * cb * c
        return {z: c for z, c in sorted(out.items()) if c}

    def associator_ok(self, x: int, y: int, z: int) -> bool:
        lhs = self.multiply(self.product(x, y), {z: 1})
        rhs = self.multiply({x: 1}, self.product(y, z))
        return lhs == rhs


def j_ring(cells) -> JRing:
    inv = cells.table.inverse
    mult: dict = {}
    for (x, y, w), c in sorted(cells.gamma.items()):
        mult.setdefault((x, y), {})[inv[w]] = c
    return JRing(cells.table.size, mult)


def check_associativity(j: JRing, seed: int = 0, samples: int = 20000) -> dict:
    n = j.size
    if n <= J_EXHAUSTIVE_GATE:
        triples = ((x, y, z) for x in range(n) for y in range(n) for z in range(n))
        universe, mode = n ** 3, "exhaustive"
    else:
        rng = random.Random(seed)
        triples = [(rng.randrange(n), rng.randrange(n), rng.randrange(n))
                   for _ in range(samples)]
        universe, mode = samples, f"sampled (seed {seed}, |W| > {J_EXHAUSTIVE_GATE})"
    bad = [list(tr) for tr in triples if not j.associator_ok(*tr)]
    return {"checked": universe, "mode": mode, "violations": bad[:MAX_WITNESSES]}


def verify_j_descent(d: DescentSystem, inst: Instance, sub: Instance, p: int,
                     hypothesis_ok: bool, seed: int = 0) -> dict:
    """F_p (x) J_G = Br_G(J), checked on structure constants.

    Requires the conjectures P1-P15 to have passed for both data
    (``hypothesis_ok``); otherwise the check is refused.
    """
    _check_p_group(d, p)
    r = _header("j_descent", inst, d, p)
    if not hypothesis_ok:
        r.update(status="refused",
                 reason="P1-P15 have not been verified for both (W, phi) and (W^G, phi_G)")
        return r
    J, JG = j_ring(inst.cells), j_ring(sub.cells)
    tG = sub.table
    emb, restrict = d.embed, d.restrict
    names = [tG.format(x) for x in range(tG.size)]
    parts = {"assoc_J": check_associativity(J, seed),
             "assoc_J_G": check_associativity(JG, seed)}

    # t_x t_y for x, y fixed: coefficients constant on G-orbits, each
    # non-trivial orbit contributes a multiple of p, and the fixed part
    # reduces to t^G_x t^G_y.
    orbit_of = {}
    for w in range(inst.table.size):
        orbit_of[w] = min(perm[w] for perm in d.actions)
    viol_inv, viol_orb, viol_mult = [], [], []
    count = 0
    for x in range(tG.size):
        for y in range(tG.size):
            count += 1
            prod = J.product(emb[x], emb[y])
            for perm in d.actions[1:]:
                for z, c in prod.items():
                    if prod.get(perm[z], 0) != c and len(viol_inv) < MAX_WITNESSES:
                        viol_inv.append({"x": names[x], "y": names[y],
                                         "z": inst.table.format(z)})
            sums: dict = {}
            for z, c in prod.items():
                if z not in restrict:
                    sums[orbit_of[z]] = sums.get(orbit_of[z], 0) + c
            for rep, total in sorted(sums.items()):
                if total % p and len(viol_orb) < MAX_WITNESSES:
                    viol_orb.append({"x": names[x], "y": names[y],
                                     "orbit_of": inst.table.format(rep), "sum": total})
            lhs = {z: c % p for z, c in JG.product(x, y).items() if c % p}
            rhs = {restrict[z]: c % p for z, c in prod.items()
                   if z in restrict and c % p}
            if lhs != rhs and len(viol_mult) < MAX_WITNESSES:
                viol_mult.append({"x": names[x], "y": names[y],
                                  "J_G": {names[z]: c for z, c in sorted(lhs.items())},
                                  "Br_G(J)": {names[z]: c for z, c in sorted(rhs.items())}})
    parts["G_invariance"] = {"checked": count, "violations": viol_inv}
    parts["orbit_sums_vanish_mod_p"] = {"checked": count, "violations": viol_orb}
    parts["multiplication_mod_p"] = {"checked": count, "violations": viol_mult}
    ok = all(not v["violations"] for v in parts.values())
    r.update(parts=parts, status="pass" if ok else "fail")
    return r
