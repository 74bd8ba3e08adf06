"""Command-line entry point: ``rtprof <command> [options]``.

Every run writes a manifest (config, versions, elapsed time) beside its
outputs. Exit codes: 0 success, 2 invalid input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .budget import BudgetExceeded, budget_from_env
from .cantor import CantorSpace, ahlfors_report, ball_measure, build_cone_graph, enumerated_ball_measure
from .congestion import ShortestPathSystem, YkPathSystem, build_coloring, compute_congestion, lemma_bound, loads_sampled
from .graph import Graph, dumps_graph, from_dot, read_graph_json, to_dot
from .poincare import h1_sweep, h2_exact, hp_minimize
from .profiles import (
    cut_exact,
    cut_heuristic,
    fit_exponent,
    fit_log_model,
    profile_csv_text,
    read_profile_csv,
    sweep_yk,
    EXACT_CUT_CAP,
)
from .roundtree import RoundTreeGraph, build_half_plane, build_round_tree, build_yk, validate_round_tree

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


class ValidationFailed(Exception):
    pass


def parse_k_range(text: str) -> list[int]:
    """``"a..b"`` (inclusive) or a single integer."""
    if ".." in text:
        a, _, b = text.partition("..")
        lo, hi = int(a), int(b)
    else:
        lo = hi = int(text)
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _k_range(text: str) -> list[int]:
    try:
        return parse_k_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}: {exc}") from None


# ---------------------------------------------------------------- io helpers


def _dump_json(obj, path: str | None) -> str:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    return text


def _write_graph(g: Graph, path: str | None, fmt: str, extra: dict | None = None) -> None:
    text = to_dot(g) if fmt == "dot" else dumps_graph(g, extra)
    _write_text(text, path)


def _write_rt(rt: RoundTreeGraph, path: str | None, fmt: str) -> None:
    if fmt == "dot":
        labelled = Graph(rt.n, rt.graph.edges, {i: rt.label(i) for i in range(rt.n)})
        _write_text(to_dot(labelled), path)
    else:
        _write_text(json.dumps(rt.to_dict(), separators=(",", ":")) + "\n", path)


def _write_text(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _read_graph(path: str) -> tuple[Graph, dict]:
    if path.endswith(".dot") or path.endswith(".gv"):
        return from_dot(Path(path).read_text()), {}
    return read_graph_json(path)


def _emit(record: dict, args) -> None:
    text = _dump_json(record, getattr(args, "out", None))
    sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_rt_build(args, budget) -> dict:
    rt = build_round_tree(args.H, args.V, args.depth, budget)
    _write_rt(rt, args.out, args.format)
    return {"n": rt.n, "m": rt.graph.m}


def cmd_rt_validate(args, budget) -> dict:
    _, doc = read_graph_json(args.input)
    rt = RoundTreeGraph.from_dict(doc)
    report = validate_round_tree(rt)
    _emit(report.to_dict(), args)
    if not report.ok:
        raise ValidationFailed(f"round tree axioms violated: {report.failed()}")
    return {"ok": True}


def cmd_yk_build(args, budget) -> dict:
    yk = build_yk(args.H, args.V, args.p, args.k, budget)
    extra = {"H": yk.H, "V": yk.V, "p": yk.p, "k": yk.k, "T": yk.T, "t": yk.t}
    _write_graph(yk.graph, args.out, args.format, extra)
    return {"n": yk.n, "T": yk.T, "t": yk.t}


def cmd_half_plane(args, budget) -> dict:
    rt = build_half_plane(args.H, args.depth, budget)
    _write_rt(rt, args.out, args.format)
    return {"n": rt.n, "m": rt.graph.m}


def _witness_csv(res, path: str | None) -> None:
    if not path:
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex", "value"])
        for i, x in enumerate(res.witness):
            w.writerow([i, repr(float(x))])


def cmd_hp(args, budget) -> dict:
    g, _ = _read_graph(args.input)
    res = hp_minimize(g, args.p, restarts=args.restarts, seed=args.seed)
    _witness_csv(res, args.witness)
    _emit(res.to_record(), args)
    return res.to_record()


def cmd_h1(args, budget) -> dict:
    g, _ = _read_graph(args.input)
    res = h1_sweep(g)
    _witness_csv(res, args.witness)
    _emit(res.to_record(), args)
    return res.to_record()


def cmd_h2(args, budget) -> dict:
    g, _ = _read_graph(args.input)
    res = h2_exact(g)
    _witness_csv(res, args.witness)
    _emit(res.to_record(), args)
    return res.to_record()


def cmd_congestion(args, budget) -> dict:
    if args.input:
        g, _ = _read_graph(args.input)
        system = ShortestPathSystem(g)
    else:
        if None in (args.H, args.V, args.k):
            raise ValueError("give --in GRAPH or all of --H, --V, --k")
        yk = build_yk(args.H, args.V, args.p, args.k, budget)
        system = YkPathSystem(yk, build_coloring(yk))
    if args.sample:
        loads = loads_sampled(system, args.sample, args.seed)
        cert = lemma_bound(system, args.p, loads=loads, budget=budget, certified=False)
    elif args.input:
        cert = lemma_bound(system, args.p, budget=budget)
    else:
        loads = compute_congestion(system.yk, system.coloring, budget)
        cert = lemma_bound(system, args.p, loads=loads, budget=budget)
    if args.loads:
        with open(args.loads, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "v", "M_e"])
            for (u, v), x in zip(system.graph.edges.tolist(), cert.loads.tolist()):
                w.writerow([u, v, x])
    rec = cert.to_record()
    _emit(rec, args)
    return {"bound": cert.bound, "elapsed": cert.elapsed}


def cmd_sweep(args, budget) -> dict:
    pts = sweep_yk(args.H, args.V, args.p, args.k, upper=not args.no_upper, budget=budget,
                   seed=args.seed, restarts=args.restarts)
    text = profile_csv_text(pts)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return {"points": len(pts)}


def cmd_fit(args, budget) -> dict:
    pts = read_profile_csv(args.input)
    fit = fit_exponent(pts)
    rec = {"power": fit.to_record(), "log": fit_log_model(pts).to_record()}
    _emit(rec, args)
    return rec


def cmd_cut(args, budget) -> dict:
    g, _ = _read_graph(args.input)
    method = args.method
    if method == "auto":
        method = "exact" if g.n <= EXACT_CUT_CAP else "heuristic"
    res = cut_exact(g, args.epsilon) if method == "exact" else cut_heuristic(g, args.epsilon)
    _emit(res.to_record(), args)
    return {"size": res.size}


def cmd_sep_scan(args, budget) -> dict:
    rows = []
    for d in args.depths:
        rt = build_half_plane(args.H, d, budget)
        res = cut_heuristic(rt.graph, args.epsilon)
        rows.append((d, rt.n, res.size, res.max_component_fraction))
    fit = fit_exponent([(r, c) for _, r, c, _ in rows]) if len(rows) >= 2 else None
    logm = fit_log_model([(r, c) for _, r, c, _ in rows]) if len(rows) >= 2 else None
    lines = ["depth,r,cut_size,max_component_fraction"]
    lines += [f"{d},{r},{c},{f!r}" for d, r, c, f in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    summary = {}
    if fit:
        summary = {"power_slope": fit.slope, "power_r2": fit.r_squared, "log_r2": logm.r_squared}
        sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return summary


def cmd_cantor_check(args, budget) -> dict:
    space = CantorSpace(args.H, args.V, args.depth)
    budget.check_vertices(space.size * (2 * args.depth + 1), "cantor enumeration")
    pts = space.points()
    mismatches = 0
    for k in range(args.depth + 1):
        for i in range(0, len(pts), max(1, len(pts) // 16)):
            if enumerated_ball_measure(space, pts[i], float(args.H) ** -k) != ball_measure(space, pts[i], k):
                mismatches += 1
    rec = ahlfors_report(space)
    rec["ball_measure_mismatches"] = mismatches
    rec["H"], rec["V"], rec["depth"] = args.H, args.V, args.depth
    _emit(rec, args)
    if mismatches:
        raise ValidationFailed(f"{mismatches} ball measures disagree with enumeration")
    return rec


def cmd_cone_build(args, budget) -> dict:
    space = CantorSpace(args.H, args.V, args.depth)
    g = build_cone_graph(space, args.depth, budget)
    _write_graph(g, args.out, args.format, {"H": args.H, "V": args.V, "depth": args.depth})
    return {"n": g.n, "m": g.m}


# ---------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _p_value(text: str) -> float:
    v = float(text)
    if not (v >= 1 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"p must be a finite real >= 1, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rtprof", description="Poincare profile experiments on round trees.")
    ap.add_argument("--version", action="version", version=f"rtprof {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out=True, fmt=False, manifest=True):
        if out:
            p.add_argument("--out", help="output file (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=["json", "dot"], default="json")
        p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
        return p

    p = common(sub.add_parser("rt-build", help="build RT^{H,V} up to a depth"), fmt=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--V", type=_positive_int, required=True)
    p.add_argument("--depth", type=_nonneg_int, required=True)

    p = common(sub.add_parser("rt-validate", help="check the round-tree axioms of a graph JSON file"))
    p.add_argument("--in", dest="input", required=True)

    p = common(sub.add_parser("yk-build", help="build the witness subgraph Y_k"), fmt=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--V", type=_positive_int, required=True)
    p.add_argument("--p", type=_p_value, required=True)
    p.add_argument("--k", type=_nonneg_int, required=True)

    p = common(sub.add_parser("half-plane", help="build RT^{H,1}"), fmt=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--depth", type=_nonneg_int, required=True)

    for name, helptext in (("hp", "numeric upper estimate of h^p"), ("h1", "two-valued h^1 estimate"),
                           ("h2", "spectral h^2")):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--witness", help="write the witness function as CSV")
        if name == "hp":
            p.add_argument("--p", type=_p_value, required=True)
            p.add_argument("--restarts", type=_positive_int, default=16)
            p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("congestion", help="path-counting lower bound on h^p"))
    p.add_argument("--in", dest="input", help="graph file (shortest-path system)")
    p.add_argument("--H", type=int)
    p.add_argument("--V", type=_positive_int)
    p.add_argument("--k", type=_nonneg_int)
    p.add_argument("--p", type=_p_value, required=True)
    p.add_argument("--loads", help="write per-edge loads as CSV")
    p.add_argument("--sample", type=_positive_int, help="estimate loads from this many random pairs (not certified)")
    p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("sweep", help="profile points along Y_k"))
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--V", type=_positive_int, required=True)
    p.add_argument("--p", type=_p_value, required=True)
    p.add_argument("--k", type=_k_range, required=True, help="inclusive range a..b")
    p.add_argument("--no-upper", action="store_true", help="skip numeric upper estimates")
    p.add_argument("--restarts", type=_positive_int, default=16)
    p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("fit", help="fit growth exponents to a sweep CSV"))
    p.add_argument("--in", dest="input", required=True)

    p = common(sub.add_parser("cut", help="epsilon-cut size of a graph"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--epsilon", default="2/3")
    p.add_argument("--method", choices=["auto", "exact", "heuristic"], default="auto")

    p = common(sub.add_parser("sep-scan", help="heuristic cut sizes of RT^{H,1} balls over depths"))
    p.add_argument("--H", type=int, default=2)
    p.add_argument("--depths", type=_k_range, required=True, help="inclusive range a..b")
    p.add_argument("--epsilon", default="2/3")

    p = common(sub.add_parser("cantor-check", help="ball measures and Ahlfors regularity of Z^{H,V}"))
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--V", type=int, required=True)
    p.add_argument("--depth", type=_positive_int, required=True)

    p = common(sub.add_parser("cone-build", help="discrete cone graph over Z^{H,V} x [0,1]"), fmt=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--V", type=int, required=True)
    p.add_argument("--depth", type=_nonneg_int, required=True)
    return ap


COMMANDS = {
    "rt-build": cmd_rt_build,
    "rt-validate": cmd_rt_validate,
    "yk-build": cmd_yk_build,
    "half-plane": cmd_half_plane,
    "hp": cmd_hp,
    "h1": cmd_h1,
    "h2": cmd_h2,
    "congestion": cmd_congestion,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "cut": cmd_cut,
    "sep-scan": cmd_sep_scan,
    "cantor-check": cmd_cantor_check,
    "cone-build": cmd_cone_build,
}


def _manifest_path(args) -> Path:
    if getattr(args, "manifest", None):
        return Path(args.manifest)
    out = getattr(args, "out", None)
    if out:
        return Path(str(out) + ".manifest.json")
    return Path(f"rtprof-{args.command}.manifest.json")


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        cfg[k] = v
    return cfg


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    budget = budget_from_env()
    manifest = {
        "command": args.command,
        "config": _config(args),
        "budget": {"vertices": budget.vertices, "work": budget.work},
        "versions": {
            "rtprof": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        manifest["result"] = COMMANDS[args.command](args, budget)
        manifest["status"] = "ok"
    except BudgetExceeded as exc:
        code = EXIT_BUDGET
        manifest["status"] = "budget_exceeded"
        manifest["error"] = str(exc)
        print(f"rtprof: {exc}", file=sys.stderr)
    except (ValueError, ValidationFailed, OSError, KeyError) as exc:
        code = EXIT_INVALID
        manifest["status"] = "invalid"
        manifest["error"] = str(exc)
        print(f"rtprof: {exc}", file=sys.stderr)
    manifest["elapsed"] = time.perf_counter() - t0
    manifest["exit_code"] = code
    _manifest_path(args).write_text(json.dumps(manifest, sort_keys=True, indent=2, default=str) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
