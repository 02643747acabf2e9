"""
Command line front end.

    kl-descent run    --type A3 --aut 3,2,1 --p 2 --tasks theorem_a,brauer
    kl-descent cache  list|validate|gc
    kl-descent report reports/theorem_a.json

Exit status: 0 when every check passes, 1 when a mathematical check fails
(the report carries witnesses), 2 for configuration or environment errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .cache import Cache, default_cache_dir
from .coxeter import (CoxeterError, CoxeterSpec, DiagramAutGroup, enumerate_group,
                      fixed_subsystem, named_matrix, named_order)
from .instance import Instance, revalidate_payload
from .laurent import Gamma, is_prime

log = logging.getLogger("kl_descent")

TASKS = ("enumerate", "kl", "cells", "conjectures", "brauer", "theorem_a", "probe")
DEFAULT_TASKS = ("enumerate", "kl", "cells", "conjectures")
FORMATS = ("json", "csv", "dot")
SIZE_GATE = 400
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    def __init__(self, fieldname: str, msg: str):
        super().__init__(f"{fieldname}: {msg}")
        self.field = fieldname


# config -----------------------------------------------------------------------

@dataclass
class RunConfig:
    type: str | None = None
    matrix: list | None = None
    weights: list | None = None
    gamma_rank: int = 1
    aut: list = field(default_factory=list)
    p: int | None = None
    tasks: tuple = DEFAULT_TASKS
    cache_dir: str | None = None
    no_cache: bool = False
    format: str = "json"
    force: bool = False
    seed: int = 0
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    out: str = "kl-descent-reports"

    def spec(self) -> CoxeterSpec:
        gamma = Gamma(self.gamma_rank)
        try:
            if self.type and self.matrix:
                raise ConfigError("matrix", "give either --type or --matrix, not both")
            if self.type:
                matrix, name = named_matrix(self.type), self.type
            elif self.matrix:
                matrix, name = self.matrix, ""
            else:
                raise ConfigError("type", "a Coxeter type or matrix is required")
            weights = self.weights
            if weights is None:
                unit = 1 if self.gamma_rank == 1 else [1] + [0] * (self.gamma_rank - 1)
                weights = [unit] * len(matrix)
            return CoxeterSpec.build(matrix, weights, gamma, name)
        except CoxeterError as exc:
            fld = "weights" if "weight" in str(exc) else ("type" if self.type else "matrix")
            raise ConfigError(fld, str(exc)) from None
        except ValueError as exc:
            raise ConfigError("weights", str(exc)) from None

    def tasks_needed(self) -> list[str]:
        """Requested tasks plus their dependencies, in pipeline order."""
        need = set(self.tasks)
        if need & {"brauer", "theorem_a"}:
            need |= {"conjectures"}
        if need & {"conjectures", "probe"}:
            need |= {"cells"}
        if "cells" in need:
            need |= {"kl"}
        need.add("enumerate")
        return [t for t in TASKS if t in need]


def _ints(text: str, sep: str = ",") -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(sep) if v != ""]


def _parse_weights(text: str, rank: int) -> list:
    out = []
    for item in text.replace(" ", "").split(","):
        parts = _ints(item, ":")
        out.append(parts[0] if rank == 1 and len(parts) == 1 else parts)
    return out


def _parse_matrix(text: str) -> list[list[int]]:
    return [_ints(row) for row in text.split(";") if row.strip()]


def load_config_file(path: str) -> dict:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    try:
        if p.suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # python < 3.11
                import tomli as tomllib
            return tomllib.loads(raw.decode())
        return json.loads(raw)
    except ValueError as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    """File values first, then every flag that was given on the command line."""
    base = load_config_file(args.config) if args.config else {}
    cfg = RunConfig()
    known = set(RunConfig.__dataclass_fields__)
    for key, value in base.items():
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(key, "unknown configuration key")
        setattr(cfg, key, value)
    try:
        if args.gamma_rank is not None:
            cfg.gamma_rank = args.gamma_rank
        if args.type is not None:
            cfg.type, cfg.matrix = args.type, None
        if args.matrix is not None:
            cfg.matrix, cfg.type = _parse_matrix(args.matrix), None
        if args.weights is not None:
            cfg.weights = _parse_weights(args.weights, cfg.gamma_rank)
        if args.aut:
            cfg.aut = [_ints(a) for a in args.aut]
    except ValueError as exc:
        raise ConfigError("weights" if args.weights else "aut", f"cannot parse: {exc}") from None
    for name in ("p", "cache_dir", "format", "seed", "workers", "out"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    if args.tasks is not None:
        cfg.tasks = tuple(t.strip() for t in args.tasks.split(",") if t.strip())
    if args.force:
        cfg.force = True
    if args.no_cache:
        cfg.no_cache = True
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if isinstance(cfg.tasks, str):
        cfg.tasks = tuple(t.strip() for t in cfg.tasks.split(","))
    cfg.tasks = tuple(cfg.tasks)
    for t in cfg.tasks:
        if t not in TASKS:
            raise ConfigError("tasks", f"unknown task {t!r}; choose from {', '.join(TASKS)}")
    if cfg.format not in FORMATS:
        raise ConfigError("format", f"must be one of {', '.join(FORMATS)}")
    if not isinstance(cfg.gamma_rank, int) or cfg.gamma_rank < 1:
        raise ConfigError("gamma_rank", "must be a positive integer")
    if cfg.workers is None or int(cfg.workers) < 1:
        raise ConfigError("workers", "must be >= 1")
    if cfg.p is not None and not is_prime(int(cfg.p)):
        raise ConfigError("p", f"{cfg.p} is not prime")
    if "brauer" in cfg.tasks and cfg.p is None:
        raise ConfigError("p", "the brauer task needs a prime --p")
    if set(cfg.tasks) & {"brauer", "theorem_a", "probe"} and not cfg.aut:
        raise ConfigError("aut", "tasks brauer / theorem_a / probe need at least one --aut")


# pipeline ---------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _element_rows(inst: Instance, with_cells: bool) -> list[dict]:
    t = inst.table
    g = inst.gamma
    rows = []
    for w in range(t.size):
        row = {"w": t.format(w), "index": w, "length": t.length[w], "phi": g.format(t.weight[w])}
        if with_cells:
            c = inst.cells
            row.update(a=g.format(c.a[w]), Delta=g.format(c.delta[w]), n=c.n[w],
                       duflo=w in set(c.duflo),
                       left_cell=c.left().cell_of[w], right_cell=c.right().cell_of[w],
                       two_sided_cell=c.two_sided().cell_of[w])
        rows.append(row)
    return rows


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        wr = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        wr.writeheader()
        wr.writerows(rows)
    return buf.getvalue()


def _kl_rows(inst: Instance) -> list[dict]:
    t, g = inst.table, inst.gamma
    rows = []
    for w in range(t.size):
        for y, p in sorted(inst.kl.C[w].items()):
            rows.append({"y": t.format(y), "w": t.format(w), "p": p.format(g)})
    return rows


def _cells_json(inst: Instance) -> dict:
    t = inst.table
    c = inst.cells
    names = [t.format(w) for w in range(t.size)]
    out = {"instance": inst.describe(), "elements": _element_rows(inst, True),
           "duflo": [names[d] for d in c.duflo]}
    for kind, pre in c.preorders.items():
        js = pre.to_json()
        js["cells"] = [[names[x] for x in cell] for cell in js["cells"]]
        out[kind] = js
    return out


def _status_of(report: dict) -> str:
    if "checks" in report:
        return "fail" if any(c["status"] == "fail" for c in report["checks"]) else "pass"
    return report.get("status", "pass")


def _build_group(cfg: RunConfig, inst: Instance) -> DiagramAutGroup:
    try:
        return DiagramAutGroup.generate(inst.spec, cfg.aut)
    except CoxeterError as exc:
        raise ConfigError("aut", str(exc)) from None


def execute(cfg: RunConfig, out=None) -> int:
    """Run the task pipeline, write reports under ``cfg.out``; return the exit code."""
    out = out or sys.stdout
    from . import brauer, verify

    spec = cfg.spec()
    if spec.name:
        try:
            order = named_order(spec.name)
        except CoxeterError as exc:
            raise ConfigError("type", str(exc)) from None
        if order > SIZE_GATE and not cfg.force:
            raise ConfigError("type", f"|W({spec.name})| = {order} exceeds the size gate "
                                      f"{SIZE_GATE}; pass --force to run anyway")
    cap = None if cfg.force else SIZE_GATE
    try:
        table = enumerate_group(spec, cap) if cap else enumerate_group(spec)
    except CoxeterError as exc:
        hint = "" if cfg.force else "; pass --force to lift the size gate"
        raise ConfigError("type" if spec.name else "matrix", f"{exc}{hint}") from None

    cache = None if cfg.no_cache else Cache(cfg.cache_dir or default_cache_dir())
    inst = Instance(spec, cache, int(cfg.workers), table=table)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    tasks = cfg.tasks_needed()
    requested = set(cfg.tasks)
    files: dict[str, str] = {}
    statuses: dict[str, str] = {}

    d = sub = None
    if cfg.aut:
        group = _build_group(cfg, inst)
        d = fixed_subsystem(table, group)
        sub = Instance(d.sub_spec, cache, int(cfg.workers), table=d.sub_table)
        if "brauer" in requested:
            q = group.prime_of_p_group()
            if q is None or (q != 1 and q != cfg.p):
                raise ConfigError("p", f"|G| = {group.order} is not a power of p = {cfg.p}")

    if "enumerate" in requested:
        rows = _element_rows(inst, False)
        if cfg.format == "csv":
            files["elements.csv"] = _csv(rows)
        else:
            files["elements.json"] = _dump({"instance": inst.describe(), "elements": rows})
    if "kl" in tasks:
        inst.kl
        if "kl" in requested:
            if cfg.format == "csv":
                files["kl.csv"] = _csv(_kl_rows(inst))
            else:
                files["kl.json"] = _dump({"instance": inst.describe(), "p": _kl_rows(inst)})
    if "cells" in requested:
        if cfg.format == "csv":
            files["cells.csv"] = _csv(_element_rows(inst, True))
        elif cfg.format == "dot":
            names = [table.format(w) for w in range(table.size)]
            for kind, pre in inst.cells.preorders.items():
                files[f"cells_{kind}.dot"] = pre.to_dot(names)
        else:
            files["cells.json"] = _dump(_cells_json(inst))

    rep = rep_g = None
    if "conjectures" in tasks:
        rep = verify.check_conjectures(inst, seed=cfg.seed)
        lemma = verify.check_lemma_P(inst, rep)
        body = {"W": rep.to_json(), "lemma_P": lemma}
        if sub is not None:
            rep_g = verify.check_conjectures(sub, seed=cfg.seed)
            body["W^G"] = rep_g.to_json()
            body["lemma_P_G"] = verify.check_lemma_P(sub, rep_g)
        if "conjectures" in requested:
            files["conjectures.json"] = _dump(body)
            bad = rep.failed + (rep_g.failed if rep_g else [])
            statuses["conjectures"] = "fail" if bad or "fail" in (
                lemma["status"], body.get("lemma_P_G", {}).get("status")) else "pass"

    if "brauer" in requested:
        hyp = rep.passed(verify.CONJECTURES) and rep_g.passed(verify.CONJECTURES)
        reports = [brauer.verify_morphism(d, inst, sub, cfg.p),
                   brauer.compare_kl_mod_p(d, inst, sub, cfg.p),
                   brauer.verify_j_descent(d, inst, sub, cfg.p, hyp, cfg.seed)]
        files["brauer.json"] = _dump(reports)
        st = [r["status"] for r in reports]
        statuses["brauer"] = "pass" if all(s == "pass" for s in st) else "fail"
    if "theorem_a" in requested:
        ta = verify.check_theorem_A(d, inst, sub, rep, rep_g)
        files["theorem_a.json"] = _dump(ta)
        statuses["theorem_a"] = "fail" if ta["status"] != "pass" else "pass"
    if "probe" in requested:
        files["probe.json"] = _dump(verify.probe_open_questions(d, inst, sub))

    for name, text in files.items():
        (outdir / name).write_text(text)
    print(f"{inst.name}: |W| = {table.size}", file=out)
    if sub is not None:
        print(f"W^G = {sub.name}: |W^G| = {sub.table.size}, "
              f"weights {[sub.gamma.format(w) for w in sub.spec.weights]}", file=out)
    for task, st in statuses.items():
        print(f"{task}: {st}", file=out)
    for name in files:
        print(f"wrote {outdir / name}", file=out)
    return EXIT_FAIL if "fail" in statuses.values() else EXIT_OK


# subcommands ------------------------------------------------------------------

def cmd_run(args) -> int:
    cfg = build_config(args)
    return execute(cfg)


def cmd_cache(args) -> int:
    cache = Cache(args.cache_dir or default_cache_dir())
    if args.action == "list":
        for path in cache.entries():
            print(f"{path.name}\t{path.stat().st_size}")
        return EXIT_OK
    if args.action == "validate":
        results = cache.validate(revalidate_payload)
        for r in results:
            print(f"{r['entry']}\t{r['status']}" + (f"\t{r['reason']}" if "reason" in r else ""))
        return EXIT_FAIL if any(r["status"] != "ok" for r in results) else EXIT_OK
    removed = cache.gc()
    print(f"removed {len(removed)} files")
    return EXIT_OK


def cmd_report(args) -> int:
    worst = EXIT_OK
    for path in args.files:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            print(f"{path}: cannot read report: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        items = data if isinstance(data, list) else [data]
        if isinstance(data, dict) and "W" in data:
            items = [v for k, v in data.items()]
        for item in items:
            if "checks" in item:
                for c in item["checks"]:
                    print(f"{path}\t{item['instance'].get('name') or 'W'}\t{c['name']}\t"
                          f"{c['status']}\t{c.get('universe', '')}")
            elif "check" in item:
                print(f"{path}\t{item.get('group', '')}\t{item['check']}\t"
                      f"{item.get('status', 'exploratory')}")
            if _status_of(item) == "fail":
                worst = EXIT_FAIL
    return worst


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kl-descent",
        description="Kazhdan-Lusztig bases, cells and descent checks for finite Coxeter groups.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sp = ap.add_subparsers(dest="command", required=True)

    run = sp.add_parser("run", help="compute and check one instance")
    run.add_argument("--config", help="JSON or TOML file; flags override its values")
    run.add_argument("--type", help="Coxeter type, e.g. A3, B2, I2(5), A1+A1")
    run.add_argument("--matrix", help="Coxeter matrix, rows separated by ';'")
    run.add_argument("--weights", help="phi(s) per generator, comma separated; "
                                       "vectors use ':' (e.g. 1:0,0:1)")
    run.add_argument("--gamma-rank", type=int, help="rank r of Gamma = Z^r (default 1)")
    run.add_argument("--aut", action="append",
                     help="diagram automorphism as images of s1..sn (1-based); repeatable")
    run.add_argument("--p", type=int, help="prime for the Brauer quotient")
    run.add_argument("--tasks", help=f"comma separated subset of {','.join(TASKS)}")
    run.add_argument("--cache-dir", help="cache directory (default $KL_DESCENT_CACHE "
                                         "or ~/.cache/kl-descent)")
    run.add_argument("--no-cache", action="store_true", help="do not read or write the cache")
    run.add_argument("--format", choices=FORMATS,
                     help="format of element tables (json/csv) and cell graphs (dot)")
    run.add_argument("--force", action="store_true", help=f"allow |W| > {SIZE_GATE}")
    run.add_argument("--seed", type=int, help="seed for sampled checks")
    run.add_argument("--workers", type=int, help="processes for the structure-constant sweep")
    run.add_argument("--out", help="report directory (default ./kl-descent-reports)")
    run.set_defaults(func=cmd_run)

    cache = sp.add_parser("cache", help="inspect the on-disk cache")
    cache.add_argument("action", choices=("list", "validate", "gc"))
    cache.add_argument("--cache-dir")
    cache.set_defaults(func=cmd_cache)

    rep = sp.add_parser("report", help="summarise report files")
    rep.add_argument("files", nargs="+")
    rep.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"kl-descent: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"kl-descent: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
