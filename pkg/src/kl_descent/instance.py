"""
Lazily computed data for one datum (W, S, Gamma, phi): group table, Hecke
algebra, KL basis, the full structure-constant sweep and the cell data.

The two expensive artifacts (KL table, sweep) go through the optional cache
and are re-validated by cheap invariants when loaded.
"""

from __future__ import annotations

import logging
import random
from functools import cached_property

from .cache import Cache, spec_key
from .cells import CellData, compute_cells
from .coxeter import CoxeterSpec, GroupTable, enumerate_group, parabolic_spec
from .hecke import (HeckeAlgebra, KLTable, StructureConstants, check_kl_table,
                    kl_basis, structure_constant_sweep)
from .laurent import Gamma, LaurentPoly

log = logging.getLogger(__name__)


def kl_to_json(kl: KLTable) -> dict:
    g = kl.table.gamma
    C = [[[y, p.to_json(g)] for y, p in sorted(cw.items())] for cw in kl.C]
    recipe = [None] + [
        [s, sw, [[z, q.to_json(g)] for z, q in corr]] for s, sw, corr in kl.recipe[1:]]
    return {"spec": kl.table.spec.to_json(), "size": kl.table.size, "C": C, "recipe": recipe}


def kl_from_json(t: GroupTable, data: dict) -> KLTable:
    g = t.gamma
    if data["size"] != t.size:
        raise ValueError("KL table size does not match group")
    C = [{y: LaurentPoly.from_json(p, g) for y, p in cw} for cw in data["C"]]
    recipe = [None] + [
        (s, sw, [(z, LaurentPoly.from_json(q, g)) for z, q in corr])
        for s, sw, corr in data["recipe"][1:]]
    return KLTable(t, C, recipe)


def h_to_json(h: StructureConstants) -> dict:
    g = h.table.gamma
    rows = [[[[z, p.to_json(g)] for z, p in sorted(d.items())] for d in row]
            for row in h.rows]
    return {"spec": h.table.spec.to_json(), "size": h.table.size, "rows": rows}


def h_from_json(t: GroupTable, data: dict) -> StructureConstants:
    g = t.gamma
    if data["size"] != t.size:
        raise ValueError("structure constants size does not match group")
    rows = [[{z: LaurentPoly.from_json(p, g) for z, p in d} for d in row]
            for row in data["rows"]]
    return StructureConstants(t, rows)


def spec_from_json(data: dict) -> CoxeterSpec:
    g = Gamma(int(data["gamma_rank"]))
    return CoxeterSpec.build(data["matrix"], data["weights"], g, data.get("name", ""))


def spot_check_kl(kl: KLTable, count: int = 10, seed: int = 0) -> None:
    rng = random.Random(seed)
    t = kl.table
    sample = sorted(rng.sample(range(t.size), min(count, t.size)))
    bad = check_kl_table(kl, elements=sample)
    if bad:
        raise AssertionError(f"KL table failed revalidation: {bad[0]}")


def spot_check_h(h: StructureConstants, count: int = 50, seed: int = 0) -> None:
    rng = random.Random(seed)
    n = h.table.size
    for _ in range(count):
        x, y = rng.randrange(n), rng.randrange(n)
        for z, p in h.rows[x][y].items():
            if not p.is_bar_invariant():
                raise AssertionError(f"h[{x},{y},{z}] is not bar-invariant")
    one = h.rows[0]
    for y in range(n):
        if one[y] != {y: LaurentPoly.constant(1)}:
            raise AssertionError("C_1 is not the unit")


def revalidate_payload(kind: str, payload: dict) -> None:
    """Cheap invariants for a cache entry, rebuilt from the Coxeter datum it carries."""
    t = enumerate_group(spec_from_json(payload["spec"]))
    if kind == "kl":
        spot_check_kl(kl_from_json(t, payload))
    elif kind == "h":
        spot_check_h(h_from_json(t, payload))
    else:
        raise ValueError(f"unknown cache entry kind {kind!r}")


class Instance:
    """Everything computable from one Coxeter datum, computed on demand."""

    def __init__(self, spec: CoxeterSpec, cache: Cache | None = None, workers: int = 1,
                 table: GroupTable | None = None):
        self.spec = spec
        self.cache = cache
        self.workers = workers
        self._parabolics: dict = {}
        if table is not None:
            self.__dict__["table"] = table

    @property
    def gamma(self) -> Gamma:
        return self.spec.gamma

    @property
    def name(self) -> str:
        return self.spec.name or "W"

    @cached_property
    def key(self) -> str:
        return spec_key(self.spec)

    @cached_property
    def table(self) -> GroupTable:
        return enumerate_group(self.spec)

    @cached_property
    def algebra(self) -> HeckeAlgebra:
        return HeckeAlgebra(self.table)

    @cached_property
    def kl(self) -> KLTable:
        if self.cache is not None:
            data = self.cache.load(self.key, "kl")
            if data is not None:
                try:
                    kl = kl_from_json(self.table, data)
                    spot_check_kl(kl)
                    return kl
                except (AssertionError, ValueError, KeyError, TypeError) as exc:
                    log.warning("cached KL table rejected: %s", exc)
                    self.cache.quarantine(self.cache.path(self.key, "kl"))
        kl = kl_basis(self.table, self.algebra)
        if self.cache is not None:
            self.cache.store(self.key, "kl", kl_to_json(kl))
        return kl

    @cached_property
    def h(self) -> StructureConstants:
        if self.cache is not None:
            data = self.cache.load(self.key, "h")
            if data is not None:
                try:
                    h = h_from_json(self.table, data)
                    spot_check_h(h)
                    return h
                except (AssertionError, ValueError, KeyError, TypeError) as exc:
                    log.warning("cached structure constants rejected: %s", exc)
                    self.cache.quarantine(self.cache.path(self.key, "h"))
        h = structure_constant_sweep(self.table, self.kl, self.algebra, self.workers)
        if self.cache is not None:
            self.cache.store(self.key, "h", h_to_json(h))
        return h

    @cached_property
    def cells(self) -> CellData:
        return compute_cells(self.table, self.kl, self.h)

    def parabolic(self, subset) -> tuple["Instance", list[int]]:
        """The standalone instance W_I and its embedding into W (by words)."""
        subset = tuple(sorted(set(subset)))
        if subset not in self._parabolics:
            inst = Instance(parabolic_spec(self.spec, subset), self.cache, self.workers)
            t = self.table
            embed = [t.element(subset[i] for i in w) for w in inst.table.word]
            self._parabolics[subset] = (inst, embed)
        return self._parabolics[subset]

    def describe(self) -> dict:
        d = self.spec.to_json()
        d["order"] = self.table.size
        return d
