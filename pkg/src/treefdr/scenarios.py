"""Built-in simulation studies and the JSON spec-file loader.

Two studies ship with the package, runnable by name from the CLI:

``example5.1`` (alias ``unbalanced-families``)
    Six level-1 groups, each with six level-2 subgroups whose level-3
    families hold 2, 2, 2, 2, 2 and 90 leaves (600 leaves total).  Signal
    is heterogeneous: group 1 has the first leaf of each small family
    plus the whole 90-leaf family non-null, group 2 a single leaf in the
    big family, groups 3-5 all leaves of the small families, group 6
    nothing.  Target bounds 0.1 per level.

``example5.2`` (alias ``signal-blocks``)
    A 100 x 100 grid: rows are level-1 nodes, columns are split into 10
    groups of 10 (level 2) with single columns as leaves.  Non-null cells
    form two 15 x 15 blocks (rows 1-15 x cols 1-15 and rows 16-30 x
    cols 16-30) plus 15 diagonal cells (31,31)..(45,45), i.e. 465 cells
    across 45 distinct rows.  Target bounds 0.2 per level.

Custom studies load from a JSON file mirroring
:class:`~treefdr.simulate.SimulationSpec`.
"""

from __future__ import annotations

from pathlib import Path as FsPath

from .errors import ValidationError
from .io import read_json
from .simulate import METHODS, Dependence, SimulationSpec
from .tree import TruthAssignment, build_tree


def _spec_from_paths(name, paths, nonnull_paths, q_levels, *, mu, reps, seed,
                     methods=METHODS, dependence=Dependence()) -> SimulationSpec:
    tree = build_tree([(p, 0.5) for p in paths])
    nonnull = set(map(tuple, nonnull_paths))
    unknown = nonnull - set(map(tuple, paths))
    if unknown:
        raise ValidationError(f"non-null paths not in tree: {sorted(unknown)[:3]}")
    truth = TruthAssignment.from_leaf_status(
        tree, [tree.node_at(p) for p in nonnull]
    )
    return SimulationSpec(
        name=name,
        tree=tree,
        truth=truth,
        mu=mu,
        reps=reps,
        seed=seed,
        q_levels=tuple(q_levels),
        methods=tuple(methods),
        dependence=dependence,
    )


def unbalanced_families_spec(mu=3.0, reps=1000, seed=0, methods=METHODS,
                             q_levels=(0.1, 0.1, 0.1)) -> SimulationSpec:
    """Six-group study with level-3 family sizes (2, 2, 2, 2, 2, 90)."""
    sizes = (2, 2, 2, 2, 2, 90)
    paths, nonnull = [], []
    for g in range(1, 7):
        for b, size in enumerate(sizes, start=1):
            for t in range(1, size + 1):
                path = (f"G{g}", f"B{b}", f"T{t}")
                paths.append(path)
                if g == 1 and (b == 6 or t == 1):
                    nonnull.append(path)
                elif g == 2 and b == 6 and t == 1:
                    nonnull.append(path)
                elif g in (3, 4, 5) and b <= 5:
                    nonnull.append(path)
    return _spec_from_paths(
        "example5.1", paths, nonnull, q_levels,
        mu=mu, reps=reps, seed=seed, methods=methods,
    )


def signal_blocks_spec(mu=3.0, reps=100, seed=0, methods=METHODS,
                       q_levels=(0.2, 0.2, 0.2), n_col_groups=10) -> SimulationSpec:
    """100 x 100 grid with two 15 x 15 signal blocks and a diagonal run."""
    n_rows = n_cols = 100
    if n_cols % n_col_groups:
        raise ValidationError("column count must divide evenly into groups")
    group_size = n_cols // n_col_groups
    paths, nonnull = [], []
    for r in range(1, n_rows + 1):
        for c in range(1, n_cols + 1):
            g = (c - 1) // group_size + 1
            path = (f"R{r:03d}", f"C{g:02d}", f"K{c:03d}")
            paths.append(path)
            in_block_a = r <= 15 and c <= 15
            in_block_b = 16 <= r <= 30 and 16 <= c <= 30
            on_diagonal = 31 <= r <= 45 and r == c
            if in_block_a or in_block_b or on_diagonal:
                nonnull.append(path)
    return _spec_from_paths(
        "example5.2", paths, nonnull, q_levels,
        mu=mu, reps=reps, seed=seed, methods=methods,
    )


BUILTIN_SCENARIOS = {
    "example5.1": unbalanced_families_spec,
    "unbalanced-families": unbalanced_families_spec,
    "example5.2": signal_blocks_spec,
    "signal-blocks": signal_blocks_spec,
}


def load_spec_file(path) -> SimulationSpec:
    """Load a custom study from JSON.

    Required keys: ``tree`` (list of leaf label paths), ``q_levels``.
    Optional: ``name``, ``nonnull`` (leaf paths, default none), ``mu``,
    ``reps``, ``seed``, ``methods``, ``dependence``
    (``{"kind": "block", "rho": r, "block_size": b}``).
    """
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: spec must be a JSON object")
    try:
        paths = [tuple(map(str, p)) for p in doc["tree"]]
        q_levels = [float(q) for q in doc["q_levels"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: missing or malformed field ({exc!r})") from exc
    dep = doc.get("dependence", {})
    dependence = Dependence(
        kind=dep.get("kind", "independent"),
        rho=float(dep.get("rho", 0.0)),
        block_size=int(dep.get("block_size", 1)),
    )
    return _spec_from_paths(
        str(doc.get("name", FsPath(path).stem)),
        paths,
        [tuple(map(str, p)) for p in doc.get("nonnull", [])],
        q_levels,
        mu=float(doc.get("mu", 0.0)),
        reps=int(doc.get("reps", 100)),
        seed=int(doc.get("seed", 0)),
        methods=tuple(doc.get("methods", METHODS)),
        dependence=dependence,
    )


def resolve_scenario(target, *, mu=None, reps=None, seed=None,
                     methods=None, q_levels=None) -> SimulationSpec:
    """Builtin name or spec-file path, with CLI overrides applied."""
    builder = BUILTIN_SCENARIOS.get(str(target))
    if builder is not None:
        spec = builder()
    elif FsPath(str(target)).exists():
        spec = load_spec_file(target)
    else:
        names = ", ".join(sorted(set(BUILTIN_SCENARIOS)))
        raise ValidationError(
            f"{target!r} is neither a builtin study ({names}) nor a spec file"
        )
    return spec.override(
        mu=mu, reps=reps, seed=seed,
        methods=tuple(methods) if methods else None,
        q_levels=tuple(q_levels) if q_levels else None,
    )
