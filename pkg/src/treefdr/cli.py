"""Command-line front end.

Three subcommands:

* ``test``     -- run a hierarchical procedure on a p-value tree file and
  report per-node decisions.
* ``simulate`` -- run a built-in or custom Monte-Carlo study and report
  per-method, per-level error rates and power.
* ``metrics``  -- recompute FDP / selective FDP / power for a previously
  written rejection report against a truth file.

``--out PREFIX`` writes ``PREFIX.tsv`` (delimited), ``PREFIX.json``
(machine-readable, full precision) and ``PREFIX.png`` (figure) for the
report paths.  Exit codes: 0 success, 2 input or validation error,
1 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import figures, io, reporting
from .combine import Combiner, populate_internal_pvalues
from .errors import TreeFDRError
from .metrics import level_report, level_reports
from .procedures import Regime, TestConfig, tree_bh, tree_bh_arbitrary
from .scenarios import BUILTIN_SCENARIOS, resolve_scenario
from .simulate import METHODS, run_simulation


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    return n


def _q_list(value: str) -> tuple[float, ...]:
    try:
        qs = tuple(float(part) for part in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad q list {value!r}") from None
    if not qs or any(not 0.0 < q <= 1.0 for q in qs):
        raise argparse.ArgumentTypeError("q values must lie in (0, 1]")
    return qs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treefdr",
        description="Hierarchical FDR control on trees of hypotheses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser(
        "test", help="run a hierarchical procedure on a p-value tree file"
    )
    p_test.add_argument("tree", help="tab-delimited leaf file: labels... pvalue")
    p_test.add_argument(
        "--internal", help="optional tab-delimited internal p-value file"
    )
    p_test.add_argument(
        "--q", type=_q_list, required=True,
        help="comma-separated per-level bounds, e.g. 0.1,0.1,0.1",
    )
    p_test.add_argument(
        "--combiner", default="simes",
        choices=[c.value for c in Combiner],
        help="combiner for missing internal p-values",
    )
    p_test.add_argument(
        "--regime", default="prds", choices=[r.value for r in Regime],
        help="dependence regime the cascade is run under",
    )
    p_test.add_argument("--out", help="output prefix for .tsv/.json")

    p_sim = sub.add_parser(
        "simulate", help="run a built-in study or a JSON spec file"
    )
    p_sim.add_argument(
        "target",
        help=f"builtin study ({', '.join(sorted(set(BUILTIN_SCENARIOS)))}) "
             f"or path to a JSON spec file",
    )
    p_sim.add_argument("--mu", type=float, help="signal strength (mean shift)")
    p_sim.add_argument("--reps", type=_positive_int, help="replicate count")
    p_sim.add_argument("--seed", type=int, help="RNG seed")
    p_sim.add_argument("--q", type=_q_list, help="override per-level bounds")
    p_sim.add_argument(
        "--method", action="append", choices=list(METHODS),
        help="restrict to a method (repeatable)",
    )
    p_sim.add_argument(
        "--threads", type=_positive_int, default=os.cpu_count() or 1,
        help="worker processes for replicates (results do not depend on it)",
    )
    p_sim.add_argument("--out", help="output prefix for .tsv/.json/.png")
    p_sim.add_argument(
        "--no-plot", action="store_true", help="skip the figure even with --out"
    )

    p_met = sub.add_parser(
        "metrics", help="score a rejection report against a truth file"
    )
    p_met.add_argument("--report", required=True, help="rejection report JSON")
    p_met.add_argument("--truth", required=True, help="truth file: labels... 0|1")
    p_met.add_argument(
        "--level", action="append", type=_positive_int,
        help="restrict to a level (repeatable; default all)",
    )
    p_met.add_argument("--out", help="output prefix for .tsv/.json/.png")
    p_met.add_argument(
        "--no-plot", action="store_true", help="skip the figure even with --out"
    )
    return parser


def _cmd_test(args) -> int:
    tree = io.load_tree(args.tree, args.internal)
    config = TestConfig(
        q_levels=args.q, combiner=args.combiner, regime=args.regime
    )
    work = populate_internal_pvalues(tree, config.combiner)
    if config.regime is Regime.ARBITRARY:
        result = tree_bh_arbitrary(work, config)
    else:
        result = tree_bh(work, config)
    table = reporting.decisions_table(work, result)
    if args.out:
        reporting.write_text(f"{args.out}.tsv", table)
        io.write_json(f"{args.out}.json", io.result_to_document(work, result, config))
        print(f"wrote {args.out}.tsv and {args.out}.json")
    else:
        sys.stdout.write(table)
    return 0


def _cmd_simulate(args) -> int:
    spec = resolve_scenario(
        args.target, mu=args.mu, reps=args.reps, seed=args.seed,
        methods=args.method, q_levels=args.q,
    )
    report = run_simulation(spec, workers=args.threads)
    print(f"{spec.reps} replicates in {report.runtime_seconds:.2f}s", file=sys.stderr)
    sys.stdout.write(reporting.simulation_summary(report))
    if args.out:
        reporting.write_text(f"{args.out}.tsv", reporting.simulation_table(report))
        io.write_json(f"{args.out}.json", report.to_document())
        written = [f"{args.out}.tsv", f"{args.out}.json"]
        if not args.no_plot:
            figures.save_figure(figures.simulation_figure(report), f"{args.out}.png")
            written.append(f"{args.out}.png")
        print("wrote " + " ".join(written))
    return 0


def _cmd_metrics(args) -> int:
    tree, result = io.result_from_document(io.read_json(args.report))
    truth = io.read_truth_file(args.truth, tree)
    if args.level:
        reports = [level_report(tree, result, truth, lv) for lv in args.level]
    else:
        reports = level_reports(tree, result, truth)
    table = reporting.level_metrics_table(reports)
    sys.stdout.write(table)
    if args.out:
        reporting.write_text(f"{args.out}.tsv", table)
        io.write_json(
            f"{args.out}.json", reporting.level_metrics_document(reports, tree)
        )
        written = [f"{args.out}.tsv", f"{args.out}.json"]
        if not args.no_plot:
            figures.save_figure(figures.level_metrics_figure(reports), f"{args.out}.png")
            written.append(f"{args.out}.png")
        print("wrote " + " ".join(written))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "test": _cmd_test,
        "simulate": _cmd_simulate,
        "metrics": _cmd_metrics,
    }
    try:
        return handlers[args.command](args)
    except (TreeFDRError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
