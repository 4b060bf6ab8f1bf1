"""Step-up testing engines and the hierarchical procedures.

``bh_stepup`` / ``by_stepup`` are the per-family primitives.  ``tree_bh``
runs the hierarchical cascade: level 1 is tested with the level-1 bound,
and each deeper family is tested only once every ancestor is rejected,
at a bound shrunk by the product of rejection proportions accumulated
along its branch.  ``tree_bh_arbitrary`` additionally divides every
family bound by the harmonic factor of the product of family sizes along
the path, which buys validity under arbitrary dependence (and reduces to
Benjamini-Yekutieli on a single family).

Family bounds are carried as exact :class:`fractions.Fraction` values so
the recorded bound satisfies both the product form and the recursive
form of the shrinkage identically; the step-up comparison itself runs in
floating point with a 1e-12 relative cushion so that decimally-entered
p-values sitting exactly on a threshold are not dropped by round-off.

Engines are pure functions of ``(tree, config)``: identical inputs give
identical results regardless of how callers parallelize around them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .combine import Combiner, harmonic_number, populate_internal_pvalues
from .errors import PvalueOutOfRangeError, ValidationError
from .tree import ROOT, HypothesisTree

#: Relative cushion on step-up threshold comparisons; the underlying math
#: is exact but file input is decimal.
REL_TOL = 1e-12


def _check_bound(q: float) -> float:
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValidationError(f"bound must lie in (0, 1], got {q!r}")
    return q


def bh_stepup(pvals: Sequence[float], q: float) -> frozenset[int]:
    """Benjamini-Hochberg step-up on one family.

    With ``m`` p-values and ``k = max{j : p_(j) <= j*q/m}`` (0 if none),
    rejects exactly the indices with ``p_i <= k*q/m``.  Returns the set
    of rejected positions in the input order.
    """
    q = _check_bound(q)
    p = np.asarray(pvals, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("expected a nonempty 1-d sequence of p-values")
    if np.any(np.isnan(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise PvalueOutOfRangeError("p-values must lie in [0, 1]")
    m = p.size
    thresholds = q * np.arange(1, m + 1) / m
    ok = np.sort(p) <= thresholds * (1.0 + REL_TOL)
    if not ok.any():
        return frozenset()
    k = int(np.nonzero(ok)[0].max()) + 1
    cutoff = (k * q / m) * (1.0 + REL_TOL)
    return frozenset(int(i) for i in np.nonzero(p <= cutoff)[0])


def by_stepup(pvals: Sequence[float], q: float) -> frozenset[int]:
    """Benjamini-Yekutieli step-up: BH at ``q / g(m)``.

    Valid under arbitrary dependence among the p-values.
    """
    q = _check_bound(q)
    p = np.asarray(pvals, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("expected a nonempty 1-d sequence of p-values")
    return bh_stepup(p, q / harmonic_number(p.size))


class Regime(str, enum.Enum):
    """Dependence assumption the hierarchical cascade is run under."""

    PRDS = "prds"
    ARBITRARY = "arbitrary"

    @classmethod
    def parse(cls, name) -> "Regime":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            options = ", ".join(r.value for r in cls)
            raise ValueError(f"unknown regime {name!r} (choose from {options})") from None


@dataclass(frozen=True)
class TestConfig:
    """Per-level target bounds plus combiner and dependence regime.

    ``q_levels`` must have one entry per tree level, each in (0, 1].  The
    combiner is used only for internal nodes without a supplied p-value.
    """

    q_levels: tuple[float, ...]
    combiner: Combiner = Combiner.SIMES
    regime: Regime = Regime.PRDS

    def __post_init__(self):
        object.__setattr__(
            self, "q_levels", tuple(_check_bound(q) for q in self.q_levels)
        )
        object.__setattr__(self, "combiner", Combiner.parse(self.combiner))
        object.__setattr__(self, "regime", Regime.parse(self.regime))

    def validate_for(self, tree: HypothesisTree) -> None:
        if len(self.q_levels) != tree.levels:
            raise ValidationError(
                f"config has {len(self.q_levels)} level bounds but the tree has "
                f"{tree.levels} levels"
            )


@dataclass(frozen=True)
class RejectionResult:
    """Outcome of a hierarchical run.

    ``tested`` holds the parents whose family was examined (the root
    counts as rejected, so it is always present).  ``family_bound`` maps
    each tested parent to the exact realized bound its family was tested
    at; ``selection_sets`` maps it to the rejected members in family
    order.  ``ragged_stops`` records rejected leaves above the deepest
    level, where a branch terminates because there is no family to test.
    """

    tested: frozenset[int]
    rejected: frozenset[int]
    family_bound: Mapping[int, Fraction]
    selection_sets: Mapping[int, tuple[int, ...]]
    ragged_stops: frozenset[int] = frozenset()

    def selected_in(self, parent: int) -> tuple[int, ...]:
        return self.selection_sets.get(parent, ())

    def rejected_at(self, tree: HypothesisTree, level: int) -> list[int]:
        return [i for i in sorted(self.rejected) if tree.level[i] == level]

    def validate_against(self, tree: HypothesisTree) -> None:
        """Check the structural invariants every result must satisfy."""
        for node in self.rejected:
            parent = tree.parent[node]
            if parent != ROOT and parent not in self.rejected:
                raise ValidationError(
                    f"rejected node {node} has an unrejected parent {parent}"
                )
        for parent, selected in self.selection_sets.items():
            fam = set(tree.family_of(parent))
            if not set(selected) <= fam:
                raise ValidationError(f"selection set of {parent} escapes its family")
            if not set(selected) == fam & self.rejected:
                raise ValidationError(
                    f"selection set of {parent} disagrees with the rejected set"
                )


def _exact(x: float) -> Fraction:
    return Fraction(float(x))


def tree_bh(tree: HypothesisTree, config: TestConfig) -> RejectionResult:
    """Hierarchical BH cascade under positive dependence (PRDS).

    Level 1 is tested at ``q_levels[0]``.  A family at level ``l`` is
    tested only when all its ancestors are rejected, at the bound

        q_i = (product of |selected| / |family| along the branch) * q_levels[l-1]

    When the per-level bounds are nondecreasing and internal p-values are
    Simes-combined from the leaves, every tested family at level > 1
    yields at least one rejection (asserted in debug runs).
    """
    if config.regime is not Regime.PRDS:
        raise ValidationError("tree_bh runs the PRDS regime; see tree_bh_arbitrary")
    return _hierarchical_stepup(tree, config, arbitrary=False)


def tree_bh_arbitrary(tree: HypothesisTree, config: TestConfig) -> RejectionResult:
    """Hierarchical BH cascade valid under arbitrary dependence.

    Identical to :func:`tree_bh` except that each family bound is divided
    by ``g`` of the product of family sizes along the path, including the
    tested family itself.  With a single level this is exactly
    Benjamini-Yekutieli; its rejections are always a subset of
    :func:`tree_bh`'s on identical input.
    """
    if config.regime is not Regime.ARBITRARY:
        raise ValidationError(
            "tree_bh_arbitrary runs the arbitrary-dependence regime"
        )
    return _hierarchical_stepup(tree, config, arbitrary=True)


def _hierarchical_stepup(
    tree: HypothesisTree, config: TestConfig, arbitrary: bool
) -> RejectionResult:
    config.validate_for(tree)
    derived_internals = not tree.internal_complete
    work = populate_internal_pvalues(tree, config.combiner)

    tested: set[int] = set()
    rejected: set[int] = set()
    bounds: dict[int, Fraction] = {}
    selections: dict[int, tuple[int, ...]] = {}
    ragged: set[int] = set()

    # (node, product of |S|/|F| along its branch, product of family sizes)
    frontier: list[tuple[int, Fraction, int]] = [(ROOT, Fraction(1), 1)]
    for level in range(1, tree.levels + 1):
        q_target = _exact(config.q_levels[level - 1])
        next_frontier: list[tuple[int, Fraction, int]] = []
        for node, ratio, size_prod in frontier:
            family = work.family_of(node)
            if not family:
                ragged.add(node)
                continue
            bound = ratio * q_target
            sizes = size_prod * len(family)
            if arbitrary:
                bound = bound / _exact(harmonic_number(sizes))
            pvals = [work.pvalues[c] for c in family]
            picked = bh_stepup(pvals, float(bound))
            selected = tuple(family[i] for i in sorted(picked))
            tested.add(node)
            bounds[node] = bound
            selections[node] = selected
            rejected.update(selected)
            if selected and level < tree.levels:
                child_ratio = ratio * Fraction(len(selected), len(family))
                for child in selected:
                    next_frontier.append((child, child_ratio, sizes))
        frontier = next_frontier

    if (
        not arbitrary
        and derived_internals
        and not tree.internal_supplied
        and config.combiner is Combiner.SIMES
        and all(a <= b for a, b in zip(config.q_levels, config.q_levels[1:]))
    ):
        # consonance: a Simes parent p-value is the family's minimal
        # BH-adjusted p-value, so a tested family must reject something
        assert all(
            selections[parent] for parent in tested if parent != ROOT
        ), "consonance violated for Simes-combined nondecreasing bounds"

    return RejectionResult(
        tested=frozenset(tested),
        rejected=frozenset(rejected),
        family_bound=bounds,
        selection_sets=selections,
        ragged_stops=frozenset(ragged),
    )


def bh_pooled(tree: HypothesisTree, q: float) -> frozenset[int]:
    """BH step-up across the pooled set of all leaf p-values.

    Returns the rejected leaf ids; this is the no-structure comparator.
    """
    leaves = tree.leaf_ids
    picked = bh_stepup([tree.pvalues[i] for i in leaves], q)
    return frozenset(leaves[i] for i in picked)


def bb_two_level(
    tree: HypothesisTree,
    q1: float,
    q2: float,
    combiner: Combiner = Combiner.SIMES,
) -> RejectionResult:
    """Two-level selective comparator on a flattened tree.

    The tree is reinterpreted with its level-1 nodes on top and, beneath
    each, the pooled set of all its descendant leaves as one family.
    Running the hierarchical cascade on that flattening gives: BH at
    ``q1`` over the level-1 p-values (combined from the pooled leaves
    when not supplied), then BH at ``q2 * |selected| / |level-1 family|``
    within each selected node's pooled leaf family.

    The result is expressed with the original node ids: selection sets
    exist for the root and each selected level-1 node, whose "children"
    here are its pooled leaves.  On a genuinely two-level tree this is
    exactly ``tree_bh`` with bounds ``(q1, q2)``.
    """
    q1 = _check_bound(q1)
    q2 = _check_bound(q2)
    combiner = Combiner.parse(combiner)
    top = tree.family_of(ROOT)
    pooled = {node: tree.descendant_leaves(node) for node in top}
    top_p = [
        tree.pvalues[node]
        if tree.pvalues[node] is not None
        else combiner([tree.pvalues[leaf] for leaf in pooled[node]])
        for node in top
    ]

    picked = bh_stepup(top_p, q1)
    selected_top = tuple(top[i] for i in sorted(picked))
    tested: set[int] = {ROOT}
    rejected: set[int] = set(selected_top)
    bounds: dict[int, Fraction] = {ROOT: _exact(q1)}
    selections: dict[int, tuple[int, ...]] = {ROOT: selected_top}

    ratio = Fraction(len(selected_top), len(top))
    for node in selected_top:
        leaves = pooled[node]
        bound = ratio * _exact(q2)
        leaf_picked = bh_stepup([tree.pvalues[leaf] for leaf in leaves], float(bound))
        selected = tuple(leaves[i] for i in sorted(leaf_picked))
        tested.add(node)
        bounds[node] = bound
        selections[node] = selected
        rejected.update(selected)

    return RejectionResult(
        tested=frozenset(tested),
        rejected=frozenset(rejected),
        family_bound=bounds,
        selection_sets=selections,
    )


def from_leaf_rejections(
    tree: HypothesisTree,
    rejected_leaves: Iterable[int],
    extra_rejected: Iterable[int] = (),
) -> RejectionResult:
    """Coherent tree-wide result implied by a set of rejected leaves.

    A node is rejected when it has a rejected descendant leaf (plus any
    ``extra_rejected`` nodes, e.g. a comparator's own coarse selections,
    closed upward as well); a family counts as tested when its parent is
    rejected.  This is how flat comparators are lifted onto the tree so
    the selective error measures apply to them.
    """
    rejected: set[int] = set()

    def close_up(node: int) -> None:
        node = tree._check_node(node)
        while node != ROOT and node not in rejected:
            rejected.add(node)
            node = tree.parent[node]

    for leaf in rejected_leaves:
        if not tree.is_leaf(leaf):
            raise ValidationError(f"node {leaf} is not a leaf")
        close_up(leaf)
    for node in extra_rejected:
        close_up(node)

    tested = {ROOT} | {i for i in rejected if tree.children[i]}
    selections = {
        parent: tuple(c for c in tree.family_of(parent) if c in rejected)
        for parent in tested
    }
    return RejectionResult(
        tested=frozenset(tested),
        rejected=frozenset(rejected),
        family_bound={},
        selection_sets=selections,
    )
