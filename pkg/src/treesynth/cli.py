"""Command-line frontend.

Subcommands: gen (random instances), synthesize (run selectors),
certify (bound a run against OPT), evaluate (inspect a graph or
dataset), bench (sweep tables for plots).

Exit codes: 0 success, 2 argument errors, 3 data errors, 4 solver
non-convergence. Artifacts written for a fixed seed and config are
byte-identical across runs; wall-clock timing therefore goes to the
console (and into bench tables only behind --timings).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import build_bundle, certify, gap_for_design
from .convex import round_deterministic, solve_p2, solve_p3
from .errors import (
    ArgumentError,
    ConvergenceError,
    DataError,
    NumericalError,
    TreesynthError,
)
from .graphs import (
    DIRECTION_REMOVE,
    OBJECTIVE_SINGLE,
    OBJECTIVE_SLAM,
    EdgeSelectionInstance,
    load_instance,
    instance_to_json_dict,
    random_instance,
    reduce_removal_to_addition,
    removal_set_from_addition,
)
from .greedy import (
    EXHAUSTIVE_MAX_SUBSETS,
    exhaustive_select,
    greedy_select,
    greedy_to_threshold,
)
from .slam import dopt_proxy, find_dataset, parse_g2o, to_instance
from .treeconn import tree_connectivity

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_DATA = 3
EXIT_CONVERGENCE = 4

BENCH_COLUMNS = [
    "sweep",
    "value",
    "n",
    "m_init",
    "c",
    "k",
    "tau_init",
    "tau_greedy",
    "tau_cvx",
    "tau_cvx_star",
    "u_greedy",
    "lower",
    "upper",
    "opt",
    "t_greedy_s",
    "t_convex_s",
    "t_oracle_s",
]


def _emit_json(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _say(msg: str, to_stderr: bool = False) -> None:
    print(msg, file=sys.stderr if to_stderr else sys.stdout)


# ---------------------------------------------------------------------------
# instance loading


def _load_base_pairs(path: str) -> set[tuple[int, int]]:
    p = Path(path)
    if not p.exists():
        raise DataError(f"base-edge override file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"base-edge override {p} is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise DataError("base-edge override must be a JSON array of [i, j] pairs")
    pairs = set()
    for entry in doc:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise DataError(f"base-edge override entries must be [i, j] pairs, got {entry!r}")
        pairs.add((int(entry[0]), int(entry[1])))
    return pairs


def _load_instance_from_args(args, *, need_k: bool = True) -> EdgeSelectionInstance:
    if getattr(args, "instance", None) and getattr(args, "g2o", None):
        raise ArgumentError("pass exactly one of --instance and --g2o")
    if getattr(args, "instance", None):
        inst = load_instance(args.instance)
        if getattr(args, "k", None) is not None:
            inst = dataclasses.replace(inst, k=args.k)
        return inst
    if getattr(args, "g2o", None):
        path = find_dataset(args.g2o)
        if path is None:
            raise DataError(
                f"dataset not found: {args.g2o} (also looked under $TREECONN_DATA_DIR)"
            )
        base_pairs = _load_base_pairs(args.base_edges) if getattr(args, "base_edges", None) else None
        ds = parse_g2o(path, normalize=getattr(args, "normalize", False), base_pairs=base_pairs)
        k = getattr(args, "k", None)
        if k is None:
            if need_k:
                raise ArgumentError("--k is required with --g2o")
            k = 0
        return to_instance(ds, k)
    raise ArgumentError("pass one of --instance or --g2o")


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    inst = random_instance(
        n=args.n,
        m_init=args.m_init,
        candidate_mode=args.mode,
        weight_range=tuple(args.weight_range),
        seed=args.seed,
        k=args.k,
        sample_size=args.c,
    )
    _emit_json(instance_to_json_dict(inst), args.output)
    if args.output:
        d = inst.describe()
        _say(f"wrote {args.output}: n={d['n']} m_init={d['m_init']} c={d['c']} k={d['k']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# synthesize


def _selection_doc(res, original, reduced) -> dict:
    doc = res.to_dict()
    if original.direction == DIRECTION_REMOVE:
        removed = removal_set_from_addition(reduced, res.selected)
        doc["removed"] = list(removed)
        doc["removed_edges"] = [list(original.candidates[i]) for i in removed]
    return doc


def _run_convex(work, args):
    t0 = time.perf_counter()
    if args.lam is not None:
        relaxed = solve_p3(work, args.lam, tolerance=args.tolerance, max_iters=args.max_iters)
        k_eff = min(len(relaxed.pi), max(0, int(round(float(relaxed.pi.sum())))))
        rounded = round_deterministic(work, relaxed.pi, k_eff)
    else:
        relaxed = solve_p2(work, tolerance=args.tolerance, max_iters=args.max_iters)
        rounded = round_deterministic(work, relaxed.pi)
    return relaxed, rounded, time.perf_counter() - t0


def cmd_synthesize(args) -> int:
    if args.tau_min is not None and args.algorithm != "greedy":
        raise ArgumentError("--tau-min is a greedy stopping rule; use --algorithm greedy")
    if args.lam is not None and args.algorithm != "convex":
        raise ArgumentError("--lambda applies to --algorithm convex")

    original = _load_instance_from_args(args, need_k=args.tau_min is None)
    if args.tau_min is not None and original.direction == DIRECTION_REMOVE:
        raise ArgumentError("--tau-min applies to addition instances")
    work = (
        reduce_removal_to_addition(original)
        if original.direction == DIRECTION_REMOVE
        else original
    )

    algorithms = ["greedy", "convex", "exhaustive"] if args.algorithm == "all" else [args.algorithm]
    if args.algorithm == "all":
        n_subsets = math.comb(work.num_candidates, work.k)
        if n_subsets > EXHAUSTIVE_MAX_SUBSETS:
            algorithms.remove("exhaustive")
            _say(
                f"note: skipping exhaustive search, C(c, k) = {n_subsets} subsets "
                f"exceeds the {EXHAUSTIVE_MAX_SUBSETS} guard",
                to_stderr=True,
            )

    results: dict[str, dict] = {}
    timings: dict[str, list[float]] = {name: [] for name in algorithms}
    for _ in range(args.repeat):
        for name in algorithms:
            if name == "greedy":
                if args.tau_min is not None:
                    res = greedy_to_threshold(work, args.tau_min)
                else:
                    res = greedy_select(work)
                timings[name].append(res.elapsed)
                results[name] = _selection_doc(res, original, work)
            elif name == "convex":
                relaxed, rounded, elapsed = _run_convex(work, args)
                timings[name].append(elapsed)
                doc = _selection_doc(rounded, original, work)
                doc["relaxed"] = relaxed.to_dict()
                results[name] = doc
            else:
                res = exhaustive_select(work)
                timings[name].append(res.elapsed)
                results[name] = _selection_doc(res, original, work)

    config = {
        "algorithm": args.algorithm,
        "seed": args.seed,
        "tolerance": args.tolerance,
    }
    if args.tau_min is not None:
        config["tau_min"] = args.tau_min
    if args.lam is not None:
        config["lambda"] = args.lam
    doc = {"instance": original.describe(), "config": config, "results": results}
    _emit_json(doc, args.output)

    for name in algorithms:
        med = statistics.median(timings[name])
        line = (
            f"{name}: tau={results[name]['tau']!r} "
            f"selected={len(results[name]['selected'])} median_elapsed_s={med:.6f}"
        )
        _say(line, to_stderr=args.output is None)
    return EXIT_OK


# ---------------------------------------------------------------------------
# certify


def _read_design(path: str) -> list[int]:
    p = Path(path)
    if not p.exists():
        raise DataError(f"design file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"design file {p} is not valid JSON: {exc}") from exc
    if not isinstance(doc, list) or not all(isinstance(x, int) for x in doc):
        raise DataError("design file must hold a JSON array of candidate indices")
    return doc


def cmd_certify(args) -> int:
    original = _load_instance_from_args(args)
    work = (
        reduce_removal_to_addition(original)
        if original.direction == DIRECTION_REMOVE
        else original
    )
    bundle = certify(work, tolerance=args.tolerance, max_iters=args.max_iters)
    doc = {"instance": original.describe(), "bundle": bundle.to_dict()}
    if args.design:
        design = _read_design(args.design)
        if original.direction == DIRECTION_REMOVE:
            if len(set(design)) != len(design):
                raise ArgumentError("design may not repeat candidate indices")
            if len(design) != original.k:
                raise ArgumentError(
                    f"design has {len(design)} removals, the budget is k={original.k}"
                )
            bad = [i for i in design if not 0 <= i < original.num_candidates]
            if bad:
                raise ArgumentError(f"design indices out of range: {bad}")
            kept = [i for i in range(original.num_candidates) if i not in set(design)]
            gap = gap_for_design(work, kept, bundle)
        else:
            gap = gap_for_design(work, design, bundle)
        doc["gap"] = gap.to_dict()
    _emit_json(doc, args.output)
    _say(
        f"lower={bundle.lower!r} upper={bundle.upper!r} "
        f"(greedy={bundle.tau_greedy!r}, rounded={bundle.tau_cvx!r}, "
        f"relaxed={bundle.tau_cvx_star!r})",
        to_stderr=args.output is None,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# evaluate


def cmd_evaluate(args) -> int:
    if getattr(args, "g2o", None):
        path = find_dataset(args.g2o)
        if path is None:
            raise DataError(
                f"dataset not found: {args.g2o} (also looked under $TREECONN_DATA_DIR)"
            )
        base_pairs = _load_base_pairs(args.base_edges) if args.base_edges else None
        ds = parse_g2o(path, normalize=args.normalize, base_pairs=base_pairs)
        edges = ds.odometry + ds.loop_closures
        from .graphs import WeightedGraph  # local to keep the import list honest

        gp = WeightedGraph(ds.poses, tuple((u, v, wp) for u, v, wp, _ in edges))
        gt = WeightedGraph(ds.poses, tuple((u, v, wt) for u, v, _, wt in edges))
        if not gp.connected:
            raise DataError(f"graph is disconnected ({gp.component_count} components)")
        tau_p = tree_connectivity(gp).tau
        tau_t = tree_connectivity(gt).tau
        doc = {
            "poses": ds.poses,
            "odometry_edges": len(ds.odometry),
            "loop_closures": len(ds.loop_closures),
            "ignored_lines": ds.report.ignored_lines,
            "offdiag_flagged": ds.report.offdiag_flagged,
            "normalization_alpha": ds.report.alpha,
            "tau_p": tau_p,
            "tau_theta": tau_t,
            "dopt_proxy": 2.0 * tau_p + tau_t,
        }
    else:
        inst = _load_instance_from_args(args, need_k=False)
        doc = {"instance": inst.describe()}
        if inst.objective == OBJECTIVE_SINGLE:
            base = inst.base_graph()
            full = base.with_edges(inst.candidate_edges(range(inst.num_candidates)))
            doc["tau_base"] = tree_connectivity(base).tau
            doc["tau_full"] = tree_connectivity(full).tau
        else:
            taus = {}
            proxy_base = 0.0
            proxy_full = 0.0
            for channel, mult in inst.channels:
                base = inst.base_graph(channel)
                full = base.with_edges(
                    inst.candidate_edges(range(inst.num_candidates), channel)
                )
                tb = tree_connectivity(base).tau
                tf = tree_connectivity(full).tau
                taus[f"tau_{channel}_base"] = tb
                taus[f"tau_{channel}_full"] = tf
                proxy_base += mult * tb
                proxy_full += mult * tf
            doc.update(taus)
            doc["dopt_proxy_base"] = proxy_base
            doc["dopt_proxy_full"] = proxy_full
    _emit_json(doc, args.output)
    if args.output is None:
        pass
    else:
        _say(f"wrote {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench


def _parse_sweep(spec: str, what: str) -> list[int]:
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise ArgumentError(f"{what} must look like LO:HI or LO:HI:STEP, got {spec!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError:
        raise ArgumentError(f"{what} bounds must be integers, got {spec!r}") from None
    if step < 1:
        raise ArgumentError(f"{what} step must be >= 1, got {step}")
    values = list(range(lo, hi + 1, step))
    if not values:
        raise ArgumentError(f"{what} {spec!r} is an empty range")
    return values


def _bench_row(inst: EdgeSelectionInstance, sweep: str, value: int, args) -> dict:
    t0 = time.perf_counter()
    greedy = greedy_select(inst)
    t_greedy = time.perf_counter() - t0

    t0 = time.perf_counter()
    relaxed = solve_p2(inst, tolerance=args.tolerance, max_iters=args.max_iters)
    rounded = round_deterministic(inst, relaxed.pi)
    t_convex = time.perf_counter() - t0

    bundle = build_bundle(
        greedy.baseline, greedy.tau_achieved, rounded.tau_achieved, relaxed.tau_cvx_star
    )

    opt: float | None = None
    t_oracle: float | None = None
    if args.oracle and math.comb(inst.num_candidates, inst.k) <= EXHAUSTIVE_MAX_SUBSETS:
        t0 = time.perf_counter()
        opt = exhaustive_select(inst).tau_achieved
        t_oracle = time.perf_counter() - t0

    d = inst.describe()
    return {
        "sweep": sweep,
        "value": value,
        "n": d["n"],
        "m_init": d["m_init"],
        "c": d["c"],
        "k": d["k"],
        "tau_init": bundle.tau_init,
        "tau_greedy": bundle.tau_greedy,
        "tau_cvx": bundle.tau_cvx,
        "tau_cvx_star": bundle.tau_cvx_star,
        "u_greedy": bundle.u_greedy,
        "lower": bundle.lower,
        "upper": bundle.upper,
        "opt": opt,
        "t_greedy_s": t_greedy if args.timings else None,
        "t_convex_s": t_convex if args.timings else None,
        "t_oracle_s": t_oracle if args.timings else None,
    }


def _write_bench(rows: list[dict], args) -> None:
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(BENCH_COLUMNS)
        for row in rows:
            writer.writerow(
                "" if row[col] is None else repr(row[col]) if isinstance(row[col], float) else row[col]
                for col in BENCH_COLUMNS
            )
        text = buf.getvalue()
    if args.output:
        Path(args.output).write_text(text)
        _say(f"wrote {args.output}: {len(rows)} sweep points")
    else:
        sys.stdout.write(text)


def cmd_bench(args) -> int:
    if bool(args.k_sweep) == bool(args.m_init_sweep):
        raise ArgumentError("pass exactly one of --k-sweep and --m-init-sweep")

    rows = []
    if args.k_sweep:
        values = _parse_sweep(args.k_sweep, "--k-sweep")
        if args.instance or args.g2o:
            setattr(args, "k", getattr(args, "k", None))
            base_inst = _load_instance_from_args(args, need_k=False)
        else:
            if args.n is None or args.m_init is None:
                raise ArgumentError("generated bench instances need --n and --m-init")
            base_inst = random_instance(
                n=args.n,
                m_init=args.m_init,
                candidate_mode=args.mode,
                weight_range=tuple(args.weight_range),
                seed=args.seed,
                k=0,
                sample_size=args.c,
            )
        if base_inst.direction == DIRECTION_REMOVE:
            base_inst = reduce_removal_to_addition(base_inst)
        for kk in values:
            if kk > base_inst.num_candidates:
                raise ArgumentError(
                    f"sweep point k={kk} exceeds the {base_inst.num_candidates} candidates"
                )
            inst = dataclasses.replace(base_inst, k=kk)
            rows.append(_bench_row(inst, "k", kk, args))
    else:
        values = _parse_sweep(args.m_init_sweep, "--m-init-sweep")
        if args.n is None or args.k is None:
            raise ArgumentError("--m-init-sweep needs --n and --k")
        children = np.random.SeedSequence(args.seed).spawn(len(values))
        for child, m in zip(children, values):
            inst = random_instance(
                n=args.n,
                m_init=m,
                candidate_mode=args.mode,
                weight_range=tuple(args.weight_range),
                seed=int(child.generate_state(1)[0]),
                k=args.k,
                sample_size=args.c,
            )
            rows.append(_bench_row(inst, "m_init", m, args))

    _write_bench(rows, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treesynth",
        description="Synthesize sparse graphs with maximum tree-connectivity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--instance", help="JSON instance file")
    source.add_argument("--g2o", help="g2o pose graph (path or name under $TREECONN_DATA_DIR)")
    source.add_argument("--k", type=int, help="selection budget (overrides the instance file)")
    source.add_argument(
        "--normalize",
        action="store_true",
        help="globally rescale dataset weights below 1 up to 1",
    )
    source.add_argument(
        "--base-edges",
        help="JSON [i, j] pose-id pairs overriding the odometry convention",
    )

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--seed", type=int, default=0, help="master random seed")
    solver.add_argument("--tolerance", type=float, default=1e-7, help="solver KKT tolerance")
    solver.add_argument("--max-iters", type=int, default=5000, help="solver iteration cap")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--output", help="write the artifact here instead of stdout")

    p = sub.add_parser("gen", parents=[out], help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m-init", type=int, required=True, dest="m_init")
    p.add_argument("--mode", choices=["complement", "sampled"], default="complement")
    p.add_argument("--c", type=int, help="candidate count for --mode sampled")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--weight-range", type=float, nargs=2, default=[1.0, 1.0], metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("synthesize", parents=[source, solver, out], help="select edges")
    p.add_argument(
        "--algorithm",
        choices=["greedy", "convex", "exhaustive", "all"],
        default="greedy",
    )
    p.add_argument("--tau-min", type=float, dest="tau_min", help="greedy gain threshold instead of a budget")
    p.add_argument("--lambda", type=float, dest="lam", help="L1 penalty for the box relaxation")
    p.add_argument("--repeat", type=int, default=1, help="median-of-N wall-clock timing")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("certify", parents=[source, solver, out], help="bound OPT")
    p.add_argument("--design", help="JSON candidate-index list to judge against the bounds")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("evaluate", parents=[source, out], help="inspect a graph or dataset")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", parents=[source, solver, out], help="sweep tables")
    p.add_argument("--n", type=int)
    p.add_argument("--m-init", type=int, dest="m_init")
    p.add_argument("--mode", choices=["complement", "sampled"], default="complement")
    p.add_argument("--c", type=int)
    p.add_argument("--weight-range", type=float, nargs=2, default=[1.0, 1.0], metavar=("LO", "HI"))
    p.add_argument("--k-sweep", dest="k_sweep", help="LO:HI[:STEP] budget sweep")
    p.add_argument("--m-init-sweep", dest="m_init_sweep", help="LO:HI[:STEP] base-size sweep")
    p.add_argument("--oracle", action="store_true", help="add exhaustive OPT when small enough")
    p.add_argument("--timings", action="store_true", help="include wall-clock columns")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ArgumentError as exc:
        _say(f"error: {exc}", to_stderr=True)
        return EXIT_ARGUMENT
    except (DataError, NumericalError) as exc:
        _say(f"error: {exc}", to_stderr=True)
        return EXIT_DATA
    except ConvergenceError as exc:
        _say(f"error: {exc}", to_stderr=True)
        return EXIT_CONVERGENCE
    except TreesynthError as exc:
        _say(f"error: {exc}", to_stderr=True)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
