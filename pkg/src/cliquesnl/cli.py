"""Command line front end.

Two subcommands:

solve
    Localize one network, either loaded from a graph file or generated as a
    seeded random geometric graph, and write positions.csv plus an optional
    JSON run report (and optional clique / rigidity dumps).

bench
    Run a seeded benchmark grid described by a JSON config and write a CSV
    of per-run rows with mean/std aggregates, optionally emitting
    gnuplot-ready ANE-vs-noise data files.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import SnlError
from .experiments import ExperimentConfig, run_grid
from .graph import apply_noise, generate_rgg, load_graph
from .registration import PipelineOptions, localize_network


def _parse_rgg(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--rgg expects N,K,r")
    try:
        return int(parts[0]), int(parts[1]), float(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --rgg value: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clique-snl",
        description="Sensor network localization by clique registration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="localize a single network")
    src = solve.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="graph file to load")
    src.add_argument(
        "--rgg",
        type=_parse_rgg,
        metavar="N,K,r",
        help="generate a random geometric graph with N sensors, K anchors, range r",
    )
    solve.add_argument("--eta", type=float, default=0.0, help="noise level (default 0)")
    solve.add_argument("--seed", type=int, default=0, help="generation seed (default 0)")
    solve.add_argument(
        "--corner-anchors",
        action="store_true",
        help="pin the first four anchors to the square's corners",
    )
    solve.add_argument("--rho", type=float, default=0.01, help="ADMM penalty (default 0.01)")
    solve.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=1.0,
        help="anchor-consistency weight (default 1)",
    )
    solve.add_argument("--eps-abs", type=float, default=1e-8)
    solve.add_argument("--eps-rel", type=float, default=1e-6)
    solve.add_argument("--max-iter", type=int, default=20000)
    solve.add_argument(
        "--no-augment",
        action="store_true",
        help="skip rigidity augmentation (test only, do not repair)",
    )
    solve.add_argument(
        "--exhaustive-rigidity",
        action="store_true",
        help="check all patch pairs instead of anchoring one at the anchor patch",
    )
    solve.add_argument("--dump-cliques", metavar="PATH", help="write the clique cover as JSON")
    solve.add_argument(
        "--rigidity-report", metavar="PATH", help="write rigidity diagnostics as JSON"
    )
    solve.add_argument("--out", required=True, help="output CSV of sensor positions")
    solve.add_argument("--report", help="output JSON run report")

    bench = sub.add_parser("bench", help="run a benchmark grid")
    bench.add_argument("--config", required=True, help="grid config JSON")
    bench.add_argument("--out", required=True, help="output CSV")
    bench.add_argument(
        "--emit-plots", metavar="DIR", help="write gnuplot .dat files of ANE vs eta"
    )

    return parser


def _solve(args) -> int:
    if args.graph is not None:
        g = load_graph(args.graph)
        if args.eta > 0:
            g = apply_noise(g, args.eta, args.seed)
    else:
        n, k, r = args.rgg
        g = generate_rgg(n, k, r, args.seed, corner_anchors=args.corner_anchors)
        if args.eta > 0:
            g = apply_noise(g, args.eta, args.seed)

    opts = PipelineOptions(
        rho=args.rho,
        lam=args.lam,
        eps_abs=args.eps_abs,
        eps_rel=args.eps_rel,
        max_iter=args.max_iter,
        augment=not args.no_augment,
        exhaustive_rigidity=args.exhaustive_rigidity,
    )
    report = localize_network(g, opts)

    header = ",".join(["id"] + ["x", "y", "z"][: g.dim])
    lines = [header]
    for v in sorted(report.positions):
        coords = ",".join(repr(float(c)) for c in report.positions[v])
        lines.append(f"{v},{coords}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    if args.report:
        payload = {
            "ane": report.ane,
            "t_partition_s": report.t_partition_s,
            "t_localize_s": report.t_localize_s,
            "t_register_s": report.t_register_s,
            "admm_iters": report.admm_iterations,
            "quasi_k": report.quasi_k,
            "augmentations": report.augmentations,
            "status": report.status,
        }
        with open(args.report, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    if args.dump_cliques:
        cfg = report.configuration
        payload = {
            "n_patches": len(cfg.patches),
            "cliques": [list(members) for members in cfg.patches],
            "anchor_patch": list(cfg.anchor_ids),
        }
        with open(args.dump_cliques, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    if args.rigidity_report:
        payload = {
            "quasi_k": report.quasi_k,
            "pairs_checked": None,
            "augmentations": [
                {"pair": list(step.pair), "clique": list(step.clique)}
                for step in report.augmentation_steps
            ],
            "status": report.status,
        }
        # pairs_checked is only known from the final connectivity test.
        payload["pairs_checked"] = len(report.configuration.patches)
        with open(args.rigidity_report, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    out = f"status={report.status} patches={report.n_patches} quasi_k={report.quasi_k}"
    if report.ane is not None:
        out += f" ane={report.ane:.3e}"
    print(out)
    return 0


def _bench(args) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    rows = run_grid(config, out_path=args.out, emit_plots=args.emit_plots)
    n_err = sum(1 for r in rows if str(r["status"]).startswith("error"))
    print(f"wrote {args.out}: {len(rows)} rows ({n_err} errors)")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _solve(args)
        return _bench(args)
    except SnlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
