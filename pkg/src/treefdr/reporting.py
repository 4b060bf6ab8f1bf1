"""Tabular output: delimited text for humans and files.

Tables print numbers with 6 significant digits; the JSON documents
produced next to them keep full precision.
"""

from __future__ import annotations

from pathlib import Path as FsPath

from .metrics import LevelReport
from .procedures import RejectionResult
from .simulate import SimulationReport
from .tree import HypothesisTree


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.6g}"


def _table(header, rows) -> str:
    lines = ["\t".join(header)]
    lines.extend("\t".join(str(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def decisions_table(tree: HypothesisTree, result: RejectionResult) -> str:
    """Per-node report: path, level, p, tested?, rejected?, family bound.

    The bound column shows the realized bound of the family the node
    belongs to (empty when that family was never examined).
    """
    rows = []
    for i in range(1, tree.n_nodes):
        parent = tree.parent[i]
        bound = result.family_bound.get(parent)
        rows.append((
            "/".join(tree.path_of(i)),
            tree.level[i],
            _fmt(tree.pvalues[i]),
            "yes" if parent in result.tested else "no",
            "yes" if i in result.rejected else "no",
            _fmt(bound),
        ))
    return _table(
        ("path", "level", "p", "tested", "rejected", "family_bound"), rows
    )


def level_metrics_table(reports: list[LevelReport]) -> str:
    rows = [
        (r.level, _fmt(r.fdp), _fmt(r.sfdp), _fmt(r.power))
        for r in reports
    ]
    return _table(("level", "fdp", "sfdp", "power"), rows)


def level_metrics_document(reports: list[LevelReport], tree: HypothesisTree) -> dict:
    return {
        "levels": [
            {
                "level": r.level,
                "fdp": float(r.fdp),
                "fdp_exact": f"{r.fdp.numerator}/{r.fdp.denominator}",
                "sfdp": float(r.sfdp),
                "sfdp_exact": f"{r.sfdp.numerator}/{r.sfdp.denominator}",
                "power": float(r.power),
                "weights": {
                    "/".join(tree.path_of(parent)) or "<root>": float(w)
                    for parent, w in sorted(r.weights.items())
                },
            }
            for r in reports
        ]
    }


def simulation_table(report: SimulationReport) -> str:
    rows = [
        (method, level, metric, _fmt(mean), _fmt(se))
        for method, level, metric, mean, se in report.rows()
    ]
    return _table(("method", "level", "metric", "mean", "se"), rows)


def simulation_summary(report: SimulationReport) -> str:
    """Human-oriented block: one line per method and level.

    Deliberately excludes runtime, keeping stdout a pure function of
    (inputs, flags, seed); the CLI reports timing on stderr.
    """
    lines = [
        f"study {report.name}: mu={report.mu:g} reps={report.reps} "
        f"seed={report.seed} q={','.join(f'{q:g}' for q in report.q_levels)}"
    ]
    for method in report.methods:
        for level in range(1, report.levels + 1):
            cells = " ".join(
                f"{metric}={report.mean(method, level, metric):.4f}"
                f"(se {report.se(method, level, metric):.4f})"
                for metric in ("fdr", "sfdr", "power")
            )
            lines.append(f"  {method:<11} level {level}: {cells}")
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> None:
    FsPath(path).write_text(text, encoding="utf-8")
