"""Tree-of-families data model.

Hypotheses are organized in a rooted tree: a synthetic root (node id 0,
level 0) indexes the coarsest real family at level 1, and the children of
any node form one family at the next level.  Rejecting a parent is a
precondition for examining the family it indexes, so the tree is the
single structure every procedure and error measure in this package is
defined on.

Trees are immutable after construction and therefore safe to share across
threads.  Use :func:`build_tree` to construct one from flat
``(path, p-value)`` rows; :meth:`HypothesisTree.with_leaf_pvalues` swaps
in a fresh p-value vector while sharing the structure (the cheap path for
simulation replicates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateLeafPathError,
    EmptyInputError,
    InconsistentDepthError,
    InvalidNodeIdError,
    PvalueOutOfRangeError,
    TreeMismatchError,
    ValidationError,
)

ROOT = 0

Path = tuple[str, ...]


def _check_pvalue(p, context) -> float:
    p = float(p)
    if math.isnan(p) or p < 0.0 or p > 1.0:
        raise PvalueOutOfRangeError(f"p-value {p!r} out of [0, 1] for {context}")
    return p


@dataclass(frozen=True)
class HypothesisTree:
    """Immutable node arena for a tree of hypothesis families.

    Node ids are dense integers ``0..n_nodes-1`` with id 0 the synthetic
    root.  ``levels`` is the depth L of the deepest leaf; real hypotheses
    live at levels ``1..L``.  Leaves always carry a p-value; internal
    nodes may carry one (user supplied) or leave it to a combiner.
    """

    levels: int
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    level: tuple[int, ...]
    labels: tuple[str, ...]
    pvalues: tuple[float | None, ...]
    internal_supplied: frozenset[int]
    _path_index: dict[Path, int] = field(repr=False, compare=False)

    # -- basic queries ------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.parent)

    def _check_node(self, node: int) -> int:
        node = int(node)
        if not 0 <= node < self.n_nodes:
            raise InvalidNodeIdError(node)
        return node

    def is_leaf(self, node: int) -> bool:
        return not self.children[self._check_node(node)]

    @property
    def leaf_ids(self) -> tuple[int, ...]:
        return self._leaves

    def family_of(self, parent: int) -> tuple[int, ...]:
        """Children of ``parent``: the family it indexes (empty for leaves)."""
        return self.children[self._check_node(parent)]

    def ancestors_of(self, node: int) -> tuple[int, ...]:
        """Ancestor ids of ``node`` ordered parent first, root last."""
        node = self._check_node(node)
        if node == ROOT:
            raise ValidationError("the root has no ancestors")
        out = []
        while node != ROOT:
            node = self.parent[node]
            out.append(node)
        return tuple(out)

    def path_of(self, node: int) -> Path:
        """Label path from level 1 down to ``node`` (empty for the root)."""
        node = self._check_node(node)
        out = []
        while node != ROOT:
            out.append(self.labels[node])
            node = self.parent[node]
        return tuple(reversed(out))

    def node_at(self, path: Sequence[str]) -> int:
        try:
            return self._path_index[tuple(path)]
        except KeyError:
            raise TreeMismatchError(f"no node with path {'/'.join(path)!r}") from None

    def descendant_leaves(self, node: int) -> tuple[int, ...]:
        """Leaf ids under ``node`` in construction order (itself if a leaf)."""
        node = self._check_node(node)
        out = []
        stack = [node]
        while stack:
            cur = stack.pop()
            kids = self.children[cur]
            if kids:
                stack.extend(reversed(kids))
            else:
                out.append(cur)
        return tuple(out)

    def leaf_rows(self) -> list[tuple[Path, float]]:
        """Re-enumerate the ``(path, p-value)`` rows the tree was built from."""
        return [(self.path_of(i), self.pvalues[i]) for i in self._leaves]

    @property
    def internal_complete(self) -> bool:
        """True when every real node carries a p-value."""
        return all(self.pvalues[i] is not None for i in range(1, self.n_nodes))

    # -- derived construction ------------------------------------------

    def with_leaf_pvalues(self, values: Sequence[float]) -> "HypothesisTree":
        """New tree with leaf p-values replaced (in ``leaf_ids`` order).

        Derived internal p-values are dropped; user-supplied internal
        p-values are kept.  Structure is shared, not copied.
        """
        if len(values) != len(self._leaves):
            raise ValidationError(
                f"expected {len(self._leaves)} leaf p-values, got {len(values)}"
            )
        pvalues: list[float | None] = [None] * self.n_nodes
        for i in self.internal_supplied:
            pvalues[i] = self.pvalues[i]
        for i, p in zip(self._leaves, values):
            pvalues[i] = _check_pvalue(p, f"leaf {'/'.join(self.path_of(i))}")
        return HypothesisTree(
            levels=self.levels,
            parent=self.parent,
            children=self.children,
            level=self.level,
            labels=self.labels,
            pvalues=tuple(pvalues),
            internal_supplied=self.internal_supplied,
            _path_index=self._path_index,
        )

    def with_pvalues(self, pvalues: Sequence[float | None]) -> "HypothesisTree":
        """New tree with the full per-node p-value tuple replaced."""
        if len(pvalues) != self.n_nodes:
            raise ValidationError("p-value vector length does not match node count")
        return HypothesisTree(
            levels=self.levels,
            parent=self.parent,
            children=self.children,
            level=self.level,
            labels=self.labels,
            pvalues=tuple(pvalues),
            internal_supplied=self.internal_supplied,
            _path_index=self._path_index,
        )

    def __post_init__(self):
        leaves = tuple(i for i in range(self.n_nodes) if not self.children[i] and i != ROOT)
        object.__setattr__(self, "_leaves", leaves)


def build_tree(
    leaf_rows: Iterable[tuple[Sequence[str], float]],
    internal_pvalues: Mapping[Sequence[str], float] | None = None,
) -> HypothesisTree:
    """Build a validated tree from flat ``(path-of-labels, p-value)`` rows.

    Rows sharing a label prefix share ancestors; levels are assigned by
    path depth and the root is synthesized as node 0.  Children keep the
    order in which their label first appears, which fixes report layout
    (procedure outcomes never depend on it).

    ``internal_pvalues`` optionally assigns p-values to internal nodes,
    keyed by their label path; these are preserved by
    :func:`treefdr.combine.populate_internal_pvalues`.
    """
    rows = [(tuple(str(x) for x in path), p) for path, p in leaf_rows]
    if not rows:
        raise EmptyInputError("no leaf rows supplied")

    parent: list[int] = [-1]
    children: list[list[int]] = [[]]
    level: list[int] = [0]
    labels: list[str] = [""]
    pvalues: list[float | None] = [None]
    index: dict[Path, int] = {(): ROOT}
    leaf_paths: set[Path] = set()

    def child_of(node: int, label: str, path: Path) -> int:
        found = index.get(path)
        if found is not None:
            return found
        node_id = len(parent)
        parent.append(node)
        children.append([])
        level.append(level[node] + 1)
        labels.append(label)
        pvalues.append(None)
        children[node].append(node_id)
        index[path] = node_id
        return node_id

    for path, p in rows:
        if not path:
            raise ValidationError("leaf path must have at least one label")
        p = _check_pvalue(p, f"leaf {'/'.join(path)}")
        if path in leaf_paths:
            raise DuplicateLeafPathError(f"duplicate leaf path {'/'.join(path)!r}")
        node = ROOT
        for depth, label in enumerate(path, start=1):
            prefix = path[:depth]
            if prefix in leaf_paths and depth < len(path):
                raise InconsistentDepthError(
                    f"path {'/'.join(prefix)!r} is a leaf but also an ancestor of "
                    f"{'/'.join(path)!r}"
                )
            node = child_of(node, label, prefix)
        if children[node]:
            raise InconsistentDepthError(
                f"leaf path {'/'.join(path)!r} already has descendants"
            )
        leaf_paths.add(path)
        pvalues[node] = p

    internal_supplied: set[int] = set()
    if internal_pvalues:
        for path, p in internal_pvalues.items():
            path = tuple(str(x) for x in path)
            node = index.get(path)
            if node is None:
                raise TreeMismatchError(
                    f"internal p-value path {'/'.join(path)!r} not in tree"
                )
            if not children[node]:
                raise ValidationError(
                    f"path {'/'.join(path)!r} is a leaf; its p-value belongs in the "
                    f"tree input"
                )
            pvalues[node] = _check_pvalue(p, f"internal node {'/'.join(path)}")
            internal_supplied.add(node)

    return HypothesisTree(
        levels=max(level),
        parent=tuple(parent),
        children=tuple(tuple(c) for c in children),
        level=tuple(level),
        labels=tuple(labels),
        pvalues=tuple(pvalues),
        internal_supplied=frozenset(internal_supplied),
        _path_index=index,
    )


@dataclass(frozen=True)
class TruthAssignment:
    """Null / non-null status per node, consistent with the tree logic.

    A node is non-null exactly when at least one of its leaf descendants
    is non-null; when a null hypothesis is true so are all hypotheses
    below it.  The root entry is the OR over all leaves.
    """

    nonnull: tuple[bool, ...]

    def is_null(self, node: int) -> bool:
        return not self.nonnull[node]

    def nonnull_count(self, tree: HypothesisTree, level: int) -> int:
        return sum(
            1 for i in range(1, tree.n_nodes)
            if tree.level[i] == level and self.nonnull[i]
        )

    @classmethod
    def from_leaf_status(
        cls, tree: HypothesisTree, nonnull_leaves: Iterable[int]
    ) -> "TruthAssignment":
        """Derive internal labels from a set of non-null leaf ids."""
        nonnull = [False] * tree.n_nodes
        leaf_set = set(nonnull_leaves)
        for leaf in leaf_set:
            tree._check_node(leaf)
            if not tree.is_leaf(leaf):
                raise ValidationError(f"node {leaf} is not a leaf")
            node = leaf
            while node != -1 and not nonnull[node]:
                nonnull[node] = True
                node = tree.parent[node]
        return cls(nonnull=tuple(nonnull))

    @classmethod
    def from_node_status(
        cls, tree: HypothesisTree, nonnull: Sequence[bool]
    ) -> "TruthAssignment":
        """Validate a full per-node assignment against the tree logic."""
        if len(nonnull) != tree.n_nodes:
            raise ValidationError("truth vector length does not match node count")
        truth = cls(nonnull=tuple(bool(x) for x in nonnull))
        truth.validate(tree)
        return truth

    def validate(self, tree: HypothesisTree) -> None:
        if len(self.nonnull) != tree.n_nodes:
            raise ValidationError("truth vector length does not match node count")
        for i in range(tree.n_nodes):
            kids = tree.children[i]
            if not kids and i != ROOT:
                continue
            expected = any(self.nonnull[c] for c in kids)
            if bool(self.nonnull[i]) != expected:
                raise ValidationError(
                    f"node {'/'.join(tree.path_of(i)) or '<root>'} is labelled "
                    f"{'non-null' if self.nonnull[i] else 'null'} but its leaf "
                    f"descendants say otherwise"
                )
