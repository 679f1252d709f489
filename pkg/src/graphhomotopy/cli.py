"""Command-line entry point: ``graphhomotopy {demo,analyze,simulate,estimate}``."""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from . import synthetic as syn
from .errors import GraphHomotopyError, GridExhausted, PropertyViolation
from .estimation import (LASSO_GRID, THRESHOLD_GRID, StarsConfig, discrepancy_table,
                         sample_gaussian, stars_select)
from .fixtures import (BRIDGE_OMEGA_Y13, PRINTED_OMEGA_Y_MEAN, PRINTED_OMEGA_Y_PCA,
                       asymmetric_bridge_fixture, worked_example)
from .graphs import model_from_covariance, model_from_precision, to_dot
from .homotopy import (Status, analyze_reduction, build_latent_rotation, check_latent_rotation,
                       spectral_chord_weak_homotopy)
from .reduction import SAMPLE_METHODS, build_mean, build_pca, sample_reduce

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WEAK = 10
EXIT_NOT = 11
EXIT_GRID = 12
VERDICT_EXIT = {Status.HOMOTOPIC: EXIT_OK, Status.WEAKLY_HOMOTOPIC: EXIT_WEAK,
                Status.NOT_HOMOTOPIC: EXIT_NOT}


def _matrix_text(m, digits: int = 6) -> list[str]:
    a = np.asarray(m, dtype=np.float64)
    a = np.where(np.abs(a) < 0.5 * 10.0 ** -digits, 0.0, a)
    return ["  [" + ", ".join(f"{v:>{digits + 4}.{digits}f}" for v in row) + "]" for row in a]


def _emit(report: dict, out: Path | None, name: str = "report.json") -> None:
    text = io.dumps_json(report)
    if out is not None:
        io.atomic_write(out / name, text)
    sys.stdout.write(text)


# ---------------------------------------------------------------------- demo

def cmd_demo(args) -> int:
    model = worked_example()
    part = model.partition
    lines = ["Worked example: clusters {1}, {2,3}, {4}", "", "Omega:", *_matrix_text(model.omega),
             "Sigma = Omega^-1:", *_matrix_text(model.sigma)]
    payload = {"worked_example": {"sigma": model.sigma.values, "omega": model.omega.values}}
    printed = {"mean": PRINTED_OMEGA_Y_MEAN, "pca": PRINTED_OMEGA_Y_PCA}
    for tag, red in (("mean", build_mean(part)), ("pca", build_pca(model, 1))):
        analysis, reduced = analyze_reduction(model, red, "conditional")
        lines += ["", f"[{tag}] directions: " + "; ".join(
                      "(" + ", ".join(f"{v:.6f}" for v in w) + ")" for w in red.directions),
                  f"[{tag}] Sigma_Y:", *_matrix_text(reduced.sigma_y),
                  f"[{tag}] Omega_Y (recomputed):", *_matrix_text(reduced.omega_y),
                  f"[{tag}] Omega_Y as originally printed:", *_matrix_text(printed[tag], 2),
                  f"[{tag}] note: the printed matrix has a nonzero (1,3) entry; the recomputed "
                  f"one has (1,3) = 0, so the reduced graph keeps X_1 and X_4 separated.",
                  f"[{tag}] E_C = {analysis.e_c.sorted()}  E_DR = {analysis.e_dr.sorted()}",
                  f"[{tag}] verdict: {analysis.status}"]
        payload[tag] = {"sigma_y": reduced.sigma_y.values, "omega_y": reduced.omega_y.values,
                        "omega_y_as_originally_printed": printed[tag],
                        "verdict": analysis.verdict.to_json(),
                        "e_c": analysis.e_c.to_json(), "e_dr": analysis.e_dr.to_json()}
    bridge, _ = asymmetric_bridge_fixture()
    analysis, reduced = analyze_reduction(bridge, build_mean(bridge.partition), "conditional")
    w13 = reduced.omega_y.values[0, 2]
    lines += ["", "Asymmetric bridge: X_1 - X_2 only, X_4 - X_2 and X_3", "Omega:",
              *_matrix_text(bridge.omega), "[mean] Omega_Y:", *_matrix_text(reduced.omega_y),
              f"[mean] Omega_Y[1,3] = {w13:.10f} (1/12 = {BRIDGE_OMEGA_Y13:.10f})",
              f"[mean] E_C = {analysis.e_c.sorted()}  E_DR = {analysis.e_dr.sorted()}",
              f"[mean] verdict: {analysis.status}  spurious: {list(analysis.verdict.spurious_edges)}"]
    payload["asymmetric_bridge"] = {"omega": bridge.omega.values, "omega_y": reduced.omega_y.values,
                                    "omega_y_13": w13, "verdict": analysis.verdict.to_json()}
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out is not None:
        payload["manifest"] = io.manifest("demo")
        io.atomic_write(args.out / "demo.txt", text)
        io.atomic_write(args.out / "demo.json", io.dumps_json(payload))
    return EXIT_OK


# ------------------------------------------------------------------- analyze

def _parse_indices(text: str | None):
    if text is None:
        return 1
    vals = [int(v) for v in text.split(",")]
    return vals[0] if len(vals) == 1 else vals


def cmd_analyze(args) -> int:
    mat = io.read_matrix(args.matrix)
    part = io.read_partition(args.partition)
    if args.kind == "omega":
        model = model_from_precision(mat, part)
    else:
        model = model_from_covariance(mat, part)
    if args.method == "mean":
        red = build_mean(part)
    elif args.method == "pca":
        red = build_pca(model, _parse_indices(args.component))
    else:
        raise ValueError(f"method {args.method!r} is sample-only; population analysis supports mean and pca")
    analysis, reduced = analyze_reduction(model, red, args.graph, args.tol)
    report = {
        "graph": args.graph,
        "method": args.method,
        "partition": part.to_json(),
        "e_r": analysis.notes["e_r"].to_json(),
        "e_c": analysis.e_c.to_json(),
        "e_dr": analysis.e_dr.to_json(),
        "verdict": analysis.verdict.to_json(),
        "directions": [w.tolist() for w in red.directions],
        "manifest": io.manifest("analyze", {"matrix": args.matrix, "partition": args.partition},
                                {"kind": args.kind, "method": args.method, "graph": args.graph,
                                 "tol": args.tol, "component": args.component}),
    }
    if args.emit_matrices:
        report["matrices"] = analysis.matrices
    if args.out is not None:
        io.atomic_write(args.out / "e_c.dot", to_dot(analysis.e_c, name="E_C"))
        io.atomic_write(args.out / "e_dr.dot", to_dot(analysis.e_dr, name="E_DR"))
    _emit(report, args.out)
    return VERDICT_EXIT[analysis.status]


# ------------------------------------------------------------------ simulate

def _sim_spectral_chord(args):
    rows = [["trial", "K", "d1", "status", "spurious", "missing"]]
    failures = 0
    for t in range(1, args.trials + 1):
        spec = syn.random_spectral_chord(syn.stream(args.seed, t))
        try:
            a = spectral_chord_weak_homotopy(spec, 1e-9)
            status, spur, miss = a.status.value, [], list(a.verdict.missing_edges)
        except PropertyViolation:
            failures += 1
            status, spur, miss = Status.NOT_HOMOTOPIC.value, [], []
        rows.append([t, spec.K, spec.d1, status, _pairs(spur), _pairs(miss)])
    return rows, failures, {}


def _pairs(edges) -> str:
    return " ".join(f"{j}-{k}" for j, k in edges)


def _sim_latent_rotation(args):
    rows = [["trial", "K", "d_f", "coupling", "indices", "latent_coordinates", "status", "spurious", "missing"]]
    failures, non_identical, non_leading = 0, 0, 0
    for t in range(1, args.trials + 1):
        s = syn.stream(args.seed, t)
        coupling = "dominant" if t % 2 else "m-matrix"
        spec = syn.random_latent_rotation(s, coupling=coupling)
        if args.eigen_index == "random":
            idx = spec.component_indices(s.integers(1, spec.d_f + 1))
        elif args.eigen_index == "independent":
            idx = [s.integers(1, spec.d_f + 1) for _ in range(spec.K)]
        else:
            idx = [1] * spec.K
        non_identical += len(set(idx)) > 1
        non_leading += any(i != 1 for i in idx)
        a = check_latent_rotation(spec, idx)
        failures += a.status is not Status.HOMOTOPIC
        rows.append([t, spec.K, spec.d_f, coupling, " ".join(map(str, idx)),
                     " ".join(map(str, a.notes["latent_coordinates"])), a.status.value,
                     _pairs(list(a.verdict.spurious_edges)), _pairs(list(a.verdict.missing_edges))])
    return rows, failures, {"trials_with_non_identical_indices": non_identical,
                            "trials_with_non_leading_indices": non_leading}


def _sim_table1(args, out: Path):
    spec = syn.random_latent_rotation(syn.stream(args.seed, 0), K=args.K, d_f=args.d_f,
                                      coupling="m-matrix", density=0.6, margin=(0.05, 0.15))
    model = build_latent_rotation(spec)
    data = sample_gaussian(model.sigma, args.n, args.seed)
    methods = tuple(args.methods.split(","))
    summary = {"K": spec.K, "d_f": spec.d_f, "n": args.n, "methods": list(methods)}
    for kind in ("conditional", "marginal"):
        table = discrepancy_table(data, model.partition, methods, kind, seed=args.seed, rule=args.rule)
        io.atomic_write(out / f"discrepancy_{kind}.csv", io.format_rows(table.csv_rows()))
        for m in methods:
            res = table.stars[m]
            io.atomic_write(out / f"graph_{kind}_{m}.dot", to_dot(res.graph, name=f"{kind}_{m}"))
            io.atomic_write(out / f"instability_{kind}_{m}.csv", io.format_rows(
                [["param", "instability", "monotone"], *res.curve_rows()]))
        summary[kind] = {"rates": table.rates,
                         "selected": {m: table.stars[m].selected for m in methods},
                         "exhausted": {m: table.stars[m].exhausted for m in methods},
                         "edges": {m: table.graphs[m].to_json() for m in methods}}
    return summary


def cmd_simulate(args) -> int:
    out = args.out
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    if args.scenario == "table1-style":
        for m in args.methods.split(","):
            if m not in SAMPLE_METHODS:
                raise ValueError(f"unknown method {m!r}")
        if out is None:
            raise ValueError("table1-style needs --out")
        summary = _sim_table1(args, out)
        report = {"scenario": args.scenario, "summary": summary,
                  "manifest": io.manifest("simulate", config=config, seed=args.seed)}
        _emit(report, out)
        return EXIT_OK
    if args.trials < 1:
        raise ValueError("--trials must be positive")
    if args.scenario == "spectral-chord":
        rows, failures, extra = _sim_spectral_chord(args)
    else:
        rows, failures, extra = _sim_latent_rotation(args)
    if out is not None:
        io.atomic_write(out / "trials.csv", io.format_rows(rows))
    report = {"scenario": args.scenario, "trials": args.trials, "failures": failures,
              "all_hold": failures == 0, **extra,
              "manifest": io.manifest("simulate", config=config, seed=args.seed)}
    _emit(report, out)
    return EXIT_OK if failures == 0 else EXIT_ERROR


# ------------------------------------------------------------------ estimate

def cmd_estimate(args) -> int:
    data = io.read_dataset(args.data)
    part = io.read_partition(args.partition)
    reduced = sample_reduce(data, part, args.method)
    estimator = "neighborhood" if args.graph == "conditional" else "threshold"
    grid = tuple(float(v) for v in args.grid.split(",")) if args.grid else (
        LASSO_GRID if estimator == "neighborhood" else THRESHOLD_GRID)
    config = StarsConfig(grid, args.subsamples, args.subsample_size, args.beta)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GridExhausted)
        res = stars_select(reduced, estimator, config, args.seed, args.rule)
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    labels = [f"C{j + 1}" for j in range(part.K)]
    report = {
        "graph": args.graph, "method": args.method, "estimator": estimator, "rule": args.rule,
        "selected": res.selected, "exhausted": res.exhausted, "subsample_size": res.subsample_size,
        "edges": res.graph.to_json(), "vertices": part.K,
        "manifest": io.manifest("estimate", {"data": args.data, "partition": args.partition},
                                {"method": args.method, "graph": args.graph, "rule": args.rule,
                                 "grid": list(grid), "subsamples": args.subsamples,
                                 "subsample_size": args.subsample_size, "beta": args.beta},
                                args.seed),
    }
    out = args.out
    if out is not None:
        io.atomic_write(out / "graph.dot", to_dot(res.graph, labels, name=args.graph))
        io.atomic_write(out / "edges.json", io.dumps_json(res.graph.to_json()))
        io.atomic_write(out / "instability.csv", io.format_rows(
            [["param", "instability", "monotone"], *res.curve_rows()]))
    _emit(report, out)
    return EXIT_GRID if res.exhausted else EXIT_OK


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphhomotopy",
                                description="Check whether cluster-wise reductions preserve Gaussian graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("demo", help="worked example and non-homotopy witness")
    d.add_argument("--out", type=Path)
    d.set_defaults(func=cmd_demo)

    a = sub.add_parser("analyze", help="verdict for a population model and a linear reduction")
    a.add_argument("matrix", help="CSV covariance or concentration matrix")
    a.add_argument("partition", help="JSON partition, e.g. [[1],[2,3],[4]]")
    a.add_argument("--kind", choices=("sigma", "omega"), default="omega")
    a.add_argument("--method", choices=SAMPLE_METHODS, default="mean")
    a.add_argument("--component", help="PCA eigenvector index (1 = leading), one or comma list per cluster")
    a.add_argument("--graph", choices=("conditional", "marginal"), default="conditional")
    a.add_argument("--tol", type=float, default=1e-8)
    a.add_argument("--emit-matrices", action="store_true")
    a.add_argument("--out", type=Path)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="seeded property runs and the discrepancy-table scenario")
    s.add_argument("scenario", choices=("spectral-chord", "latent-rotation", "table1-style"))
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--eigen-index", choices=("random", "independent", "leading"), default="random",
                   help="random: one latent coordinate per trial, matching eigenvector per cluster; "
                        "independent: unrelated random index per cluster")
    s.add_argument("--n", type=int, default=2000)
    s.add_argument("--K", type=int, default=5)
    s.add_argument("--d-f", dest="d_f", type=int, default=4)
    s.add_argument("--methods", default="median,pca,factor")
    s.add_argument("--rule", choices=("or", "and"), default="or")
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="reduce a dataset and estimate the cluster graph with StARS")
    e.add_argument("data", help="CSV dataset, rows are observations")
    e.add_argument("partition")
    e.add_argument("--method", choices=SAMPLE_METHODS, default="mean")
    e.add_argument("--graph", choices=("conditional", "marginal"), default="conditional")
    e.add_argument("--rule", choices=("or", "and"), default="or")
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--grid", help="comma-separated penalties or thresholds")
    e.add_argument("--subsamples", type=int, default=20)
    e.add_argument("--subsample-size", type=int)
    e.add_argument("--beta", type=float, default=0.05)
    e.add_argument("--out", type=Path)
    e.set_defaults(func=cmd_estimate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphHomotopyError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
