"""Reading and writing the package's file formats.

Tree input is UTF-8 tab-delimited text, one leaf per line::

    level1_label<TAB>...<TAB>levelL_label<TAB>pvalue

The optional internal-p-value file uses the same shape with the path of
an internal node, and the truth file replaces the p-value column with a
0/1 non-null flag (0 = true null).  Blank lines and ``#`` comments are
ignored everywhere.  Rejection reports round-trip through JSON so that
error measures can be recomputed later against a truth file.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path as FsPath

from .errors import EmptyInputError, ParseError, TreeMismatchError, ValidationError
from .procedures import RejectionResult
from .tree import ROOT, HypothesisTree, TruthAssignment, build_tree


def _data_lines(path):
    text = FsPath(path).read_text(encoding="utf-8")
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield line_no, line


def _parse_rows(path, value_name):
    rows = []
    for line_no, line in _data_lines(path):
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) < 2:
            raise ParseError(
                path, line_no,
                f"expected at least one label and a {value_name}, got {line!r}",
            )
        labels = tuple(fields[:-1])
        if any(not lab for lab in labels):
            raise ParseError(path, line_no, "empty label")
        rows.append((line_no, labels, fields[-1]))
    return rows


def read_tree_file(path) -> list[tuple[tuple[str, ...], float]]:
    """Parse leaf rows; raises :class:`ParseError` with the offending line."""
    out = []
    for line_no, labels, value in _parse_rows(path, "p-value"):
        try:
            p = float(value)
        except ValueError:
            raise ParseError(path, line_no, f"bad p-value {value!r}") from None
        if not 0.0 <= p <= 1.0:
            raise ParseError(path, line_no, f"p-value {p!r} out of [0, 1]")
        out.append((labels, p))
    if not out:
        raise EmptyInputError(f"{path}: no leaf rows found")
    return out


def read_pvalue_map(path) -> dict[tuple[str, ...], float]:
    """Parse an internal-p-value file into a path-keyed mapping."""
    out: dict[tuple[str, ...], float] = {}
    for line_no, labels, value in _parse_rows(path, "p-value"):
        try:
            p = float(value)
        except ValueError:
            raise ParseError(path, line_no, f"bad p-value {value!r}") from None
        if not 0.0 <= p <= 1.0:
            raise ParseError(path, line_no, f"p-value {p!r} out of [0, 1]")
        if labels in out:
            raise ParseError(path, line_no, f"duplicate path {'/'.join(labels)!r}")
        out[labels] = p
    return out


def load_tree(tree_path, internal_path=None) -> HypothesisTree:
    internal = read_pvalue_map(internal_path) if internal_path else None
    return build_tree(read_tree_file(tree_path), internal_pvalues=internal)


def read_truth_file(path, tree: HypothesisTree) -> TruthAssignment:
    """Load a truth file and check it against ``tree``.

    Every leaf must be covered; internal entries are optional but must
    agree with the OR of the leaves below them.
    """
    flags: dict[tuple[str, ...], bool] = {}
    for line_no, labels, value in _parse_rows(path, "0/1 flag"):
        if value not in {"0", "1"}:
            raise ParseError(path, line_no, f"expected 0 or 1, got {value!r}")
        if labels in flags:
            raise ParseError(path, line_no, f"duplicate path {'/'.join(labels)!r}")
        flags[labels] = value == "1"

    nonnull_leaves = []
    for leaf in tree.leaf_ids:
        leaf_path = tree.path_of(leaf)
        if leaf_path not in flags:
            raise TreeMismatchError(
                f"{path}: no truth entry for leaf {'/'.join(leaf_path)!r}"
            )
        if flags.pop(leaf_path):
            nonnull_leaves.append(leaf)
    truth = TruthAssignment.from_leaf_status(tree, nonnull_leaves)

    for labels, flag in flags.items():
        node = tree.node_at(labels)  # raises TreeMismatchError if unknown
        if truth.nonnull[node] != flag:
            raise TreeMismatchError(
                f"{path}: node {'/'.join(labels)!r} is flagged "
                f"{'non-null' if flag else 'null'} but its leaves say otherwise"
            )
    return truth


# -- rejection report JSON -------------------------------------------------

def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_fraction(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or 1))


def result_to_document(
    tree: HypothesisTree, result: RejectionResult, config=None
) -> dict:
    """JSON-ready document capturing the tree, the run and its outcome."""
    nodes = []
    for i in range(1, tree.n_nodes):
        parent = tree.parent[i]
        nodes.append({
            "path": list(tree.path_of(i)),
            "level": tree.level[i],
            "leaf": tree.is_leaf(i),
            "p": tree.pvalues[i],
            "tested": parent in result.tested,
            "rejected": i in result.rejected,
        })
    families = []
    for parent in sorted(result.tested):
        entry = {
            "parent": list(tree.path_of(parent)),
            "selected": [list(tree.path_of(c)) for c in result.selected_in(parent)],
        }
        bound = result.family_bound.get(parent)
        if bound is not None:
            entry["bound"] = float(bound)
            entry["bound_exact"] = _fraction_str(bound)
        families.append(entry)
    doc = {
        "levels": tree.levels,
        "leaves": [
            {"path": list(tree.path_of(i)), "p": tree.pvalues[i]}
            for i in tree.leaf_ids
        ],
        "internal_pvalues": [
            {"path": list(tree.path_of(i)), "p": tree.pvalues[i]}
            for i in range(1, tree.n_nodes)
            if not tree.is_leaf(i) and tree.pvalues[i] is not None
        ],
        "nodes": nodes,
        "families": families,
        "ragged_stops": [list(tree.path_of(i)) for i in sorted(result.ragged_stops)],
    }
    if config is not None:
        doc["config"] = {
            "q_levels": list(config.q_levels),
            "combiner": config.combiner.value,
            "regime": config.regime.value,
        }
    return doc


def result_from_document(doc: dict) -> tuple[HypothesisTree, RejectionResult]:
    """Rebuild the tree and rejection result from a report document."""
    try:
        leaves = [(tuple(e["path"]), float(e["p"])) for e in doc["leaves"]]
        internal = {
            tuple(e["path"]): float(e["p"]) for e in doc.get("internal_pvalues", [])
        }
        tree = build_tree(leaves, internal_pvalues=internal or None)
        tested, bounds, selections = set(), {}, {}
        for entry in doc["families"]:
            parent = tree.node_at(entry["parent"]) if entry["parent"] else ROOT
            tested.add(parent)
            selections[parent] = tuple(
                tree.node_at(p) for p in entry["selected"]
            )
            if "bound_exact" in entry:
                bounds[parent] = _parse_fraction(entry["bound_exact"])
            elif "bound" in entry:
                bounds[parent] = Fraction(float(entry["bound"]))
        rejected = frozenset(
            tree.node_at(n["path"]) for n in doc["nodes"] if n["rejected"]
        )
        result = RejectionResult(
            tested=frozenset(tested),
            rejected=rejected,
            family_bound=bounds,
            selection_sets=selections,
            ragged_stops=frozenset(
                tree.node_at(p) for p in doc.get("ragged_stops", [])
            ),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed rejection report: {exc!r}") from exc
    result.validate_against(tree)
    return tree, result


def write_json(path, document: dict) -> None:
    FsPath(path).write_text(
        json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_json(path) -> dict:
    try:
        return json.loads(FsPath(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
