"""Command-line entry point: ``gluing obs``, ``gluing verify``, ``gluing groups``.

Exit codes: 0 success, 2 verification failure, 3 input error, 4 cap exceeded.
A JSON report is written even when the command fails.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import groups as _groups
from .catalog import CORPUS, catalog, load_group
from .engine import CHAIN_CAP
from .errors import (CapExceeded, CoefficientScope, CollectionTooSmall, FormulaMismatch,
                     GluingError, InputError, NotAComplex, NotIndexP, NotPGroup, RankTooSmall,
                     TableIncomplete)
from .functors import parse_functor
from .obstruction import compute_s_set, center_rank, cross_validate, parse_table
from .sections import parse_collection
from .verify import (VERIFIERS, corpus_for, p_rank, prime_of, run_verifier, verify_dade_kernel,
                     verify_shape_d8)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 2, 3, 4

_INPUT_ERRORS = (InputError, RankTooSmall, NotPGroup, NotIndexP, CollectionTooSmall,
                 CoefficientScope, TableIncomplete)


@dataclass
class JobSpec:
    group: str
    prime: int | None = None
    functor: str | None = None
    table: str | None = None
    routes: list[str] = field(default_factory=list)
    degrees: list[int] = field(default_factory=list)
    collection: str = "proper"
    out: str | None = None
    chain_cap: int = CHAIN_CAP
    timings: bool = False

    def check(self) -> None:
        if (self.functor is None) == (self.table is None):
            raise InputError("give exactly one of --functor and --table")
        for r in self.routes:
            if r in ("formula", "orbit") and self.table is None:
                raise InputError(f"route {r} needs --table")
            if r in ("direct", "bar", "oliver") and self.functor is None:
                raise InputError(f"route {r} needs --functor")
        parse_collection(self.collection)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, CapExceeded):
        return EXIT_CAP
    if isinstance(exc, _INPUT_ERRORS):
        return EXIT_INPUT
    if isinstance(exc, (FormulaMismatch, NotAComplex)):
        return EXIT_FAIL
    return EXIT_INPUT


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(obj, out: str | None) -> None:
    text = dumps(obj)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_report(name: str, exc: BaseException) -> dict:
    return {"name": name, "ok": False, "error": type(exc).__name__, "failures": [str(exc)]}


# ---------------------------------------------------------------------------
# obs


def cmd_obs(job: JobSpec) -> tuple[int, dict]:
    start = time.perf_counter()
    try:
        job.check()
        G = load_group(job.group)
        p = job.prime or prime_of(G)
        if p is None or not G.is_p_group(p):
            raise NotPGroup(f"{G.label} is not a p-group" + (f" for p = {job.prime}" if job.prime else ""))
        if job.functor is not None:
            F = parse_functor(job.functor, G)
            routes = job.routes or ["direct", "bar", "oliver"]
            degrees = job.degrees or [-1, 0, 1]
            rep = cross_validate(G, p, functor=F, routes=routes, degrees=degrees,
                                 collection=job.collection, chain_cap=job.chain_cap)
        else:
            T = parse_table(job.table)
            routes = job.routes or (["formula", "orbit"] if T.constant is not None else ["formula"])
            rep = cross_validate(G, p, table=T, routes=routes, degrees=[0],
                                 collection=job.collection)
    except GluingError as exc:
        return exit_code_for(exc), _error_report(f"obs {job.group}", exc)
    out = rep.to_json()
    out["group"] = {"spec": job.group, "order": G.order, "prime": p,
                    "p_rank": p_rank(G, p), "center_rank": center_rank(G, p)}
    res = out["details"]["results"]
    if res:
        first = res[next(iter(res))]
        out["summary"] = {k: v for k, v in (("Ker", first.get("-1")), ("Obs", first.get("0")))
                          if v is not None}
    if job.timings:
        out["timings"] = {"seconds": round(time.perf_counter() - start, 3)}
    return (EXIT_OK if rep.ok else EXIT_FAIL), out


# ---------------------------------------------------------------------------
# verify


def _worker_init(element_cap: int) -> None:
    _groups.ELEMENT_CAP = element_cap


def _run(args: tuple[str, str]) -> dict:
    theorem, spec = args
    try:
        return run_verifier(theorem, spec).to_json()
    except GluingError as exc:
        return _error_report(f"{theorem} on {spec}", exc)


def cmd_verify(theorem: str, groups: list[str] | None = None, max_order: int | None = None,
               prime: int | None = None, jobs: int = 1) -> tuple[int, dict]:
    names = sorted(VERIFIERS) if theorem == "all" else [theorem]
    for n in names:
        if n not in VERIFIERS:
            return EXIT_INPUT, {"ok": False, "error": "InputError",
                                "failures": [f"unknown theorem {n!r}; choose from {sorted(VERIFIERS)}"]}
    try:
        tasks = [(n, g) for n in names for g in corpus_for(n, groups, max_order, prime)]
    except GluingError as exc:
        return exit_code_for(exc), _error_report("verify", exc)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init,
                                 initargs=(_groups.ELEMENT_CAP,)) as ex:
            results = list(ex.map(_run, tasks))
    else:
        results = [_run(t) for t in tasks]
    extra = []
    if not groups:
        if "routes" in names:
            extra.append(verify_shape_d8().to_json())
        if "dade-kernel" in names:
            extra.append(verify_dade_kernel().to_json())
    reports = extra + results
    ok = all(r["ok"] for r in reports)
    caps = any(r.get("error") in ("BarSizeBound", "OrderBound", "RankCap") for r in reports)
    code = EXIT_OK if ok else (EXIT_CAP if caps else EXIT_FAIL)
    return code, {"theorems": names, "ok": ok, "checked": len(reports),
                  "failed": sum(not r["ok"] for r in reports), "reports": reports}


# ---------------------------------------------------------------------------
# groups


def cmd_groups(action: str, spec: str | None = None) -> tuple[int, dict]:
    if action == "list":
        return EXIT_OK, {"groups": [{"spec": g, "order": catalog(g).order} for g in CORPUS]}
    try:
        G = load_group(spec)
        info = {"spec": spec, "order": G.order, "degree": G.degree,
                "abelian": G.is_abelian, "exponent": G.exponent,
                "subgroups": len(G._subgroup_masks),
                "subgroup_classes": len(G.subgroup_classes)}
        p = prime_of(G)
        if p is not None:
            info.update(prime=p, p_rank=p_rank(G, p), center_rank=center_rank(G, p))
            if p_rank(G, p) >= 2 and center_rank(G, p) == 1:
                info["S"] = compute_s_set(G, p).to_json()
        return EXIT_OK, info
    except GluingError as exc:
        return exit_code_for(exc), _error_report(f"describe {spec}", exc)


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gluing", description=__doc__.splitlines()[0])
    ap.add_argument("--element-cap", type=int, default=_groups.ELEMENT_CAP,
                    help="largest group (in elements) that will be enumerated")
    sub = ap.add_subparsers(dest="command", required=True)

    o = sub.add_parser("obs", help="compute Ker and Obs of the detection map")
    o.add_argument("--group", required=True, help="catalog spec or JSON group file")
    o.add_argument("--prime", type=int)
    o.add_argument("--functor", help="constant[:ring], bdual, atomic[:U:V][:ring] or a JSON file")
    o.add_argument("--table", help="dt, rq, dade2, const:Z, const:Z/p or const:Z^k")
    o.add_argument("--routes", type=_str_list, default=[])
    o.add_argument("--degrees", type=_int_list, default=[])
    o.add_argument("--collection", default="proper")
    o.add_argument("--chain-cap", type=int, default=CHAIN_CAP)
    o.add_argument("--timings", action="store_true", help="add wall-clock times to the report")
    o.add_argument("--out")

    v = sub.add_parser("verify", help="run a theorem's invariant suite over the corpus")
    v.add_argument("theorem", help="'all' or one of: " + ", ".join(sorted(VERIFIERS)))
    v.add_argument("--groups", type=_str_list)
    v.add_argument("--max-order", type=int)
    v.add_argument("--prime", type=int)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out")

    g = sub.add_parser("groups", help="list the corpus or describe one group")
    g.add_argument("action", choices=["list", "describe"])
    g.add_argument("spec", nargs="?")
    g.add_argument("--out")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    saved = _groups.ELEMENT_CAP
    if args.element_cap != saved:
        _groups.ELEMENT_CAP = args.element_cap
        catalog.cache_clear()
    try:
        code, report = _dispatch(args)
    finally:
        if _groups.ELEMENT_CAP != saved:
            _groups.ELEMENT_CAP = saved
            catalog.cache_clear()
    write_report(report, args.out)
    return code


def _dispatch(args) -> tuple[int, dict]:
    if args.command == "obs":
        job = JobSpec(args.group, args.prime, args.functor, args.table, args.routes,
                      args.degrees, args.collection, args.out, args.chain_cap, args.timings)
        return cmd_obs(job)
    if args.command == "verify":
        return cmd_verify(args.theorem, args.groups, args.max_order, args.prime, max(1, args.jobs))
    if args.action == "describe" and not args.spec:
        return EXIT_INPUT, {"ok": False, "failures": ["describe needs a group spec"]}
    return cmd_groups(args.action, args.spec)


if __name__ == "__main__":
    sys.exit(main())
