"""Error measures over a rejection pattern: FDP, selective FDP, power.

The selective false discovery proportion at level ``l`` averages the
per-family FDPs of the families actually tested at that level, each
weighted by the reciprocal of the number of rejections along the branch
that led to it.  It has two equivalent formulations, both implemented:

* ``sfdp_weighted``  -- the explicit weighted sum over tested families;
* ``sfdp_recursive`` -- assign each rejected level-``l`` node its null
  indicator, then average upward over selection sets until the root.

Both return exact :class:`fractions.Fraction` values, so equality between
the two formulations is testable without tolerance.  Conventions: the
FDP of a tested family with no rejections is 0 (``max{|S|, 1}``
denominators), and a rejected leaf sitting above the deepest level has no
family, so it contributes nothing at deeper levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import ValidationError
from .procedures import RejectionResult
from .tree import ROOT, HypothesisTree, TruthAssignment


def _check_level(tree: HypothesisTree, level: int) -> int:
    level = int(level)
    if not 1 <= level <= tree.levels:
        raise ValidationError(
            f"level {level} out of range 1..{tree.levels}"
        )
    return level


def _family_fdp(selected, truth: TruthAssignment) -> Fraction:
    nulls = sum(1 for c in selected if truth.is_null(c))
    return Fraction(nulls, max(len(selected), 1))


def family_weights(
    tree: HypothesisTree, result: RejectionResult, level: int
) -> dict[int, Fraction]:
    """Branch weight of every family tested at ``level``, keyed by parent.

    The weight is the reciprocal of the product of selection-set sizes
    along the ancestor chain; the level-1 family always has weight 1.
    Weights sum to 1 when every selected node one level up indexes a
    tested family, and to at most 1 otherwise.
    """
    level = _check_level(tree, level)
    weights: dict[int, Fraction] = {}
    for parent in result.tested:
        if tree.level[parent] != level - 1:
            continue
        w = Fraction(1)
        node = parent
        while node != ROOT:
            node = tree.parent[node]
            w /= len(result.selected_in(node))
        weights[parent] = w
    return weights


def sfdp_weighted(
    tree: HypothesisTree,
    result: RejectionResult,
    truth: TruthAssignment,
    level: int,
) -> Fraction:
    """Selective FDP at ``level`` as the weighted sum over tested families."""
    weights = family_weights(tree, result, level)
    return sum(
        (w * _family_fdp(result.selected_in(parent), truth)
         for parent, w in weights.items()),
        start=Fraction(0),
    )


def recursive_error_values(
    tree: HypothesisTree,
    result: RejectionResult,
    truth: TruthAssignment,
    level: int,
) -> dict[int, Fraction]:
    """Per-node error measures of the upward-averaging recursion.

    Rejected level-``level`` nodes carry their null indicator; every
    selected node above carries the average over its selection set (0
    when the set is empty or absent), up to the root at key ``ROOT``.
    """
    level = _check_level(tree, level)
    values: dict[int, Fraction] = {
        i: Fraction(1 if truth.is_null(i) else 0)
        for i in result.rejected
        if tree.level[i] == level
    }
    for k in range(level - 1, -1, -1):
        nodes = [ROOT] if k == 0 else [
            i for i in result.rejected if tree.level[i] == k
        ]
        for node in nodes:
            selected = result.selected_in(node)
            total = sum((values[c] for c in selected), start=Fraction(0))
            values[node] = total / max(len(selected), 1)
    return values


def sfdp_recursive(
    tree: HypothesisTree,
    result: RejectionResult,
    truth: TruthAssignment,
    level: int,
) -> Fraction:
    """Selective FDP at ``level`` as the root value of the upward recursion."""
    return recursive_error_values(tree, result, truth, level)[ROOT]


def level_fdp(
    tree: HypothesisTree,
    result: RejectionResult,
    truth: TruthAssignment,
    level: int,
) -> Fraction:
    """Level-restricted FDP: false / total rejections pooled at ``level``."""
    level = _check_level(tree, level)
    picked = [i for i in result.rejected if tree.level[i] == level]
    return _family_fdp(picked, truth)


def level_power(
    tree: HypothesisTree,
    result: RejectionResult,
    truth: TruthAssignment,
    level: int,
) -> Fraction:
    """Share of non-null level-``level`` hypotheses rejected (0 when none exist)."""
    level = _check_level(tree, level)
    nonnull = truth.nonnull_count(tree, level)
    if nonnull == 0:
        return Fraction(0)
    hits = sum(
        1 for i in result.rejected
        if tree.level[i] == level and not truth.is_null(i)
    )
    return Fraction(hits, nonnull)


@dataclass(frozen=True)
class LevelReport:
    """Per-level error and power summary for one rejection pattern."""

    level: int
    fdp: Fraction
    sfdp: Fraction
    power: Fraction
    weights: Mapping[int, Fraction]


def level_report(
    tree: HypothesisTree,
    result: RejectionResult,
    truth: TruthAssignment,
    level: int,
) -> LevelReport:
    return LevelReport(
        level=_check_level(tree, level),
        fdp=level_fdp(tree, result, truth, level),
        sfdp=sfdp_weighted(tree, result, truth, level),
        power=level_power(tree, result, truth, level),
        weights=family_weights(tree, result, level),
    )


def level_reports(
    tree: HypothesisTree,
    result: RejectionResult,
    truth: TruthAssignment,
) -> list[LevelReport]:
    return [level_report(tree, result, truth, lv) for lv in range(1, tree.levels + 1)]
