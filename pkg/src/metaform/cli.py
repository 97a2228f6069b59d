"""Command-line front end.

Exit codes: 0 when the queried property holds or a plan is found, 1 when
it fails or the merge is infeasible (a report is still printed), 2 on
input or resource errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import InfeasibleMergeError, MetaformError
from .generate import GEN_KINDS, gen
from .graph import (
    Formation,
    MetaFormation,
    export_dot,
    parse_formation,
    parse_meta_formation,
)
from .meta import edge_optimal_persistent, meta_rigid
from .persistence import TERMINAL_SET_CAP, is_persistent, merged_persistence
from .planner import (
    MergePlan,
    PlanEdge,
    feasibility,
    plan_collection,
    verify_plan,
)
from .rigidity import DEFAULT_SEED, DEFAULT_TRIALS, check_rigidity


def _emit(doc: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for key, value in doc.items():
            print(f"{key}: {json.dumps(value, sort_keys=True)}")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _cmd_check_rigidity(args) -> int:
    f = parse_formation(_read(args.file))
    verdict = check_rigidity(
        f.underlying(), args.dim, seed=args.seed, trials=args.trials
    )
    doc = {
        "criterion": (
            "2D edge-count characterization (pebble game)"
            if args.dim == 2
            else "3D necessary counting + generic rank oracle"
        ),
        "dim": args.dim,
        "seed": args.seed,
        "trials": args.trials,
    }
    doc.update(verdict.to_dict())
    _emit(doc, args.format)
    return 0 if verdict.rigid else 1


def _cmd_check_persistence(args) -> int:
    f = parse_formation(_read(args.file))
    verdict = is_persistent(
        f, args.dim, seed=args.seed, trials=args.trials, cap=args.cap
    )
    doc = {
        "criterion": "all terminal subgraphs rigid",
        "dim": args.dim,
        "seed": args.seed,
        "trials": args.trials,
    }
    doc.update(verdict.to_dict())
    _emit(doc, args.format)
    return 0 if verdict.persistent else 1


def _cmd_check_meta(args) -> int:
    meta = parse_meta_formation(_read(args.file))
    verdict = meta_rigid(meta, args.dim, seed=args.seed, trials=args.trials)
    persistence = merged_persistence(
        meta, args.dim, seed=args.seed, trials=args.trials
    )
    doc = {
        "criterion": (
            "meta edge-count characterization via substitution"
            if args.dim == 2
            else "meta counting screen + substituted rank oracle"
        ),
        "dim": args.dim,
        "seed": args.seed,
        "trials": args.trials,
        "edgeOptimalPersistent": edge_optimal_persistent(
            meta, args.dim, seed=args.seed, trials=args.trials
        ),
        "mergedPersistence": persistence.to_dict(),
    }
    doc.update(verdict.to_dict())
    _emit(doc, args.format)
    return 0 if verdict.rigid else 1


def _cmd_plan_merge(args) -> int:
    collection = [parse_formation(_read(p)) for p in args.files]
    feas = feasibility(collection, args.dim, seed=args.seed, trials=args.trials)
    base = {
        "dim": args.dim,
        "seed": args.seed,
        "trials": args.trials,
        "feasibility": feas.to_dict(),
        "collection": [f.to_dict() for f in collection],
    }
    if not feas.feasible:
        _emit(base, args.format)
        return 1
    try:
        plan = plan_collection(
            collection, args.dim, seed=args.seed, trials=args.trials
        )
    except InfeasibleMergeError as exc:
        base["feasibility"] = {"feasible": False, "reason": exc.reason}
        _emit(base, args.format)
        return 1
    report = verify_plan(collection, plan, args.dim, seed=args.seed, trials=args.trials)
    base["plan"] = plan.to_dict()
    base["verification"] = report.to_dict()
    _emit(base, args.format)
    return 0


def _cmd_verify_plan(args) -> int:
    doc = json.loads(_read(args.file))
    collection = [Formation.from_dict(d) for d in doc["collection"]]
    plan = MergePlan(
        edges=tuple(
            PlanEdge(
                tail=e["tail"],
                head=e["head"],
                rule=e.get("rule", "unknown"),
                step=e.get("step", 0),
            )
            for e in doc["plan"]["edges"]
        ),
        merge_order=tuple(doc["plan"].get("mergeOrder", range(len(collection)))),
    )
    dim = args.dim if args.dim is not None else doc["dim"]
    report = verify_plan(collection, plan, dim, seed=args.seed, trials=args.trials)
    out = {"dim": dim, "seed": args.seed, "trials": args.trials}
    out.update(report.to_dict())
    _emit(out, args.format)
    ok = report.persistent and report.missing_dof_conserved
    return 0 if ok else 1


def _cmd_gen(args) -> int:
    f = gen(args.kind, n=args.n, seed=args.seed, trials=args.trials)
    if args.format == "dot":
        print(export_dot(f))
    else:
        doc = {"kind": args.kind, "seed": args.seed}
        doc.update(f.to_dict())
        _emit(doc, args.format)
    return 0


def _cmd_export(args) -> int:
    text = _read(args.file)
    doc = json.loads(text)
    obj = (
        MetaFormation.from_dict(doc)
        if "metaVertices" in doc
        else Formation.from_dict(doc)
    )
    if args.format == "dot":
        print(export_dot(obj))
    else:
        _emit(obj.to_dict(), "json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metaform",
        description="Rigidity, persistence and merging of directed formation graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dim_required=True, with_cap=False):
        p.add_argument(
            "--dim",
            type=int,
            choices=(2, 3),
            required=dim_required,
            default=None if dim_required else None,
        )
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
        p.add_argument(
            "--format", choices=("json", "text", "dot"), default="json"
        )
        if with_cap:
            p.add_argument("--cap", type=int, default=TERMINAL_SET_CAP)

    p = sub.add_parser("check-rigidity", help="undirected rigidity of a formation")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=_cmd_check_rigidity)

    p = sub.add_parser("check-persistence", help="persistence of a formation")
    p.add_argument("file")
    common(p, with_cap=True)
    p.set_defaults(func=_cmd_check_persistence)

    p = sub.add_parser("check-meta", help="rigidity of a merged meta-formation")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=_cmd_check_meta)

    p = sub.add_parser("plan-merge", help="plan a minimal persistent merge")
    p.add_argument("files", nargs="+", help="formation files, one per member")
    common(p)
    p.set_defaults(func=_cmd_plan_merge)

    p = sub.add_parser("verify-plan", help="re-check a plan-merge report file")
    p.add_argument("file")
    common(p, dim_required=False)
    p.set_defaults(func=_cmd_verify_plan)

    p = sub.add_parser("gen", help="generate a test formation")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("-n", type=int, default=4)
    common(p, dim_required=False)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("export", help="re-serialize a file as JSON or DOT")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "dot"), default="dot")
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MetaformError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
