"""Command line front end: solve, bench, fit, distance and report pipelines.

Exit codes: 0 success, 1 usage/validation/data error, 2 truncated run.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, infogeo, plots, stats
from .cubes import SearchRange, validate_k
from .pso import SwarmConfig
from .sa import AnnealConfig

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TRUNCATED = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _parse_range(text: str) -> SearchRange:
    try:
        return SearchRange.from_tag(text)
    except ValueError:
        pass
    parts = text.split(":")
    if len(parts) != 4:
        raise ValueError(
            f"range must be R3/R4/R5 or xmin:xmax:ymin:ymax, got {text!r}")
    x_min, x_max, y_min, y_max = (int(p) for p in parts)
    return SearchRange(x_min, x_max, y_min, y_max)


def _default_seed() -> int:
    env = os.environ.get("CUBESEEK_SEED")
    return int(env) if env else 0


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=2, help="target integer k (default 2)")
    p.add_argument("--range", default="R3",
                   help="R3/R4/R5 or explicit xmin:xmax:ymin:ymax (default R3)")
    p.add_argument("--algo", choices=("pso", "sa", "rsa"), required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $CUBESEEK_SEED or 0)")
    p.add_argument("--thr", type=float, default=1e-4,
                   help="fitness threshold triggering exact verification (default 1e-4)")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--swarm-size", type=int, default=50, help="PSO swarm size (default 50)")
    p.add_argument("--radius", type=int, default=10,
                   help="SA neighbourhood radius (default 10)")
    p.add_argument("--rtm", type=int, default=None,
                   help="rSA restart threshold (default 30)")
    p.add_argument("--cooling-offset", type=float, default=0.01)


def _solver_config(args):
    box = _parse_range(args.range)
    seed = args.seed if args.seed is not None else _default_seed()
    if args.algo == "pso":
        return SwarmConfig(k=args.k, range=box, swarm_size=args.swarm_size,
                           threshold=args.thr, max_iterations=args.max_iterations,
                           seed=seed)
    return AnnealConfig(k=args.k, range=box, threshold=args.thr,
                        neighbourhood_radius=args.radius,
                        cooling_offset=args.cooling_offset, rtm=args.rtm,
                        max_iterations=args.max_iterations, seed=seed)


def _cmd_solve(args) -> int:
    if validate_k(args.k) == "insoluble":
        print(f"error: k={args.k} = {args.k % 9} (mod 9); no sum of three cubes "
              f"can be 4 or 5 (mod 9)", file=sys.stderr)
        return EXIT_ERROR
    cfg = _solver_config(args)
    record = bench._solver_for(args.algo)(cfg)
    if record.truncated:
        print(f"no solution within {record.iterations} iterations (truncated)",
              file=sys.stderr)
        return EXIT_TRUNCATED
    s = record.solution
    print(f"algorithm: {record.algorithm}")
    print(f"k: {s.k}")
    print(f"solution: x={s.x} y={s.y} z={s.z}")
    print(f"iterations: {record.iterations}")
    print(f"restarts: {record.restarts}")
    print(f"elapsed_seconds: {record.elapsed:.6f}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    if validate_k(args.k) == "insoluble":
        print(f"error: k={args.k} is in an insoluble congruence class", file=sys.stderr)
        return EXIT_ERROR
    cfg = _solver_config(args)
    seed = args.seed if args.seed is not None else _default_seed()
    ds = bench.run_batch(args.algo, cfg, args.n, seed, parallelism=args.parallelism)
    bench.save_dataset(ds, args.out)
    sidecar = Path(args.out).name + ".json"
    print(f"wrote {ds.n} trials to {args.out} (sidecar {sidecar})")
    times = ds.times()
    if len(times) > args.ell:
        try:
            hist = bench.histogram(ds, args.ell)
        except bench.DegenerateDataError as e:
            print(f"histogram skipped: {e}")
            return EXIT_OK
        print(f"histogram: n={hist.n} min={times.min():.6f}s max={times.max():.6f}s "
              f"bins={args.ell} width={hist.bin_width:.6f}s")
        for lo, hi, d in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.densities):
            print(f"  [{lo:.6f}, {hi:.6f}]  {d:.6f}")
    else:
        print(f"histogram skipped: need more than {args.ell} samples for {args.ell} bins")
    return EXIT_OK


def _write_plot_data(path, hist, exp_model, logn_model) -> None:
    centers = (hist.bin_edges[:-1] + hist.bin_edges[1:]) / 2.0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_center", "density", "fitted_pdf_exponential", "fitted_pdf_lognormal"])
        for c, d in zip(centers, hist.densities):
            w.writerow([
                np.format_float_positional(c, unique=True, pad_right=6),
                np.format_float_positional(d, unique=True, pad_right=6),
                np.format_float_positional(plots._exp_pdf(exp_model, np.array([c]))[0],
                                           unique=True, pad_right=6),
                np.format_float_positional(plots._lognormal_pdf(logn_model, np.array([c]))[0],
                                           unique=True, pad_right=6),
            ])


def _cmd_fit(args) -> int:
    ds = bench.load_dataset(args.data)
    exp_model = stats.fit_exponential(ds)
    logn_model = stats.fit_lognormal(ds)
    reports = [stats.exp_summary(exp_model), stats.lognormal_summary(logn_model)]
    out = {
        "algorithm": ds.algorithm,
        "range_tag": ds.meta.get("range_tag"),
        "k": ds.meta.get("k"),
        "n": ds.n,
        "models": [r.to_dict() for r in reports],
    }
    Path(args.out).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
    print(stats.summary_table(reports))
    print(f"wrote report to {args.out}")
    if args.emit_plot_data or args.plot:
        hist = bench.histogram(ds, args.ell)
        if args.emit_plot_data:
            _write_plot_data(args.emit_plot_data, hist, exp_model, logn_model)
            print(f"wrote plot data to {args.emit_plot_data}")
        if args.plot:
            plots.render_fit_figure(hist, exp_model, logn_model, args.plot,
                                    title=f"{ds.algorithm} ({ds.meta.get('range_tag') or 'custom'})")
            print(f"wrote figure to {args.plot}")
    return EXIT_OK


def _load_model_points(paths, family: str):
    """Model points plus labels from fit reports or bare model JSON files."""
    points, labels = [], []
    for path in paths:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = doc.get("models", [doc])
        match = [e for e in entries if e.get("model") == family]
        if not match:
            present = sorted({e.get("model") for e in entries})
            raise ValueError(
                f"{path}: no {family} model (contains {present}); "
                f"all inputs must provide the same family")
        params = match[0]["params"]
        if family == "exponential":
            points.append(infogeo.ModelPoint.exponential(params["rate"]))
        else:
            points.append(infogeo.ModelPoint.lognormal(params["alpha"], params["beta"]))
        labels.append(doc.get("algorithm") or Path(path).stem)
    return points, labels


def _cmd_distance(args) -> int:
    points, labels = _load_model_points(args.models, args.family)
    mat = infogeo.distance_matrix(points)
    out = {
        "family": args.family,
        "algorithms": labels,
        "matrix": mat.tolist(),
        "pairs": {
            f"L{i + 1}{j + 1}": mat[i, j]
            for i in range(len(points)) for j in range(i + 1, len(points))
        },
    }
    if args.family == "lognormal" and len(points) > 1:
        residuals = {}
        paths = {}
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                path = infogeo.lognormal_geodesic(points[i], points[j],
                                                  tolerance=args.tolerance)
                closed = infogeo.lognormal_distance_closed_form(points[i], points[j])
                residuals[f"L{i + 1}{j + 1}"] = abs(
                    infogeo.geodesic_length(path) - closed)
                paths[(i, j)] = path
        out["bvp_vs_closed_form_residuals"] = residuals
        if args.plot:
            plots.render_geodesic_profiles(
                list(paths.values()),
                [f"{labels[i]} -> {labels[j]}" for (i, j) in paths],
                args.plot,
            )
            print(f"wrote geodesic profiles to {args.plot}")
    Path(args.out).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
    for key, val in out["pairs"].items():
        print(f"{key} = {val:.6f}")
    print(f"wrote distance matrix to {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    models = {}
    for path in args.fits:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        key = (doc.get("algorithm") or Path(path).stem, doc.get("range_tag"))
        fitted = {}
        for entry in doc.get("models", []):
            n = entry["summary"]["n"]
            if entry["model"] == "exponential":
                fitted["exponential"] = stats.ExpModel(entry["params"]["rate"], n)
            elif entry["model"] == "lognormal":
                fitted["lognormal"] = stats.LogNormalModel(
                    entry["params"]["alpha"], entry["params"]["beta"], n)
        models[key] = fitted
    report = stats.performance_report(models, taus=tuple(args.tau))
    Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
    with open(args.ratios, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["family", "range", "numerator", "denominator", "ratio"])
        for row in report["ratios"]:
            w.writerow([row["family"], row["range"] or "", row["numerator"],
                        row["denominator"], f"{row['ratio']:.6f}"])
    print(f"wrote report to {args.out} and ratio table to {args.ratios}")
    for row in report["fast_run_probabilities"]:
        print(f"P_{row['algorithm']}(t <= {row['tau']}) = {row['probability']:.6g} "
              f"[{row['family']}, {row['range']}]")
    if args.plot:
        plots.render_ratio_figure(report, args.plot)
        print(f"wrote ratio figure to {args.plot}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cubeseek",
                     description="Sum-of-three-cubes search and running-time analytics")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one seeded solver trial")
    _add_solver_args(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_bench = sub.add_parser("bench", help="run a seeded batch and write the dataset")
    _add_solver_args(p_bench)
    p_bench.add_argument("--n", type=int, required=True, help="number of trials")
    p_bench.add_argument("--out", required=True, help="output CSV path")
    p_bench.add_argument("--ell", type=int, default=50, help="histogram bins (default 50)")
    p_bench.add_argument("--parallelism", type=int, default=1)
    p_bench.set_defaults(func=_cmd_bench)

    p_fit = sub.add_parser("fit", help="fit exponential and log-normal models to a dataset")
    p_fit.add_argument("--data", required=True, help="dataset CSV from bench")
    p_fit.add_argument("--out", required=True, help="output JSON report")
    p_fit.add_argument("--ell", type=int, default=50)
    p_fit.add_argument("--emit-plot-data", metavar="CSV",
                       help="write bin_center/density/fitted-PDF columns")
    p_fit.add_argument("--plot", metavar="PNG", help="render histogram + fits figure")
    p_fit.set_defaults(func=_cmd_fit)

    p_dist = sub.add_parser("distance", help="Fisher-Rao distance matrix between models")
    p_dist.add_argument("models", nargs="+", help="fit-report JSON files")
    p_dist.add_argument("--family", choices=("exponential", "lognormal"), required=True)
    p_dist.add_argument("--out", required=True, help="output JSON matrix")
    p_dist.add_argument("--tolerance", type=float, default=1e-8,
                        help="BVP endpoint residual tolerance")
    p_dist.add_argument("--plot", metavar="PNG", help="render geodesic profiles")
    p_dist.set_defaults(func=_cmd_distance)

    p_rep = sub.add_parser("report", help="relative performance and fast-run probabilities")
    p_rep.add_argument("fits", nargs="+", help="fit-report JSON files")
    p_rep.add_argument("--out", required=True, help="output JSON report")
    p_rep.add_argument("--ratios", required=True, help="output CSV ratio table")
    p_rep.add_argument("--tau", type=float, action="append", default=None,
                       help="fast-run time bound(s); default 1.5")
    p_rep.add_argument("--plot", metavar="PNG", help="render ratio chart")
    p_rep.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # usage errors exit 1 via _Parser; --help exits 0
        return int(e.code or 0)
    if getattr(args, "tau", None) is None and args.command == "report":
        args.tau = [1.5]
    try:
        return args.func(args)
    except (ValueError, OverflowError, OSError, KeyError,
            infogeo.GeodesicConvergenceError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
