"""Parent p-values from child p-values.

A parent hypothesis is treated as the intersection of its children, so
its p-value is a combination of the family's p-values:

* ``simes``          -- min over sorted order of ``p_(j) * k / j``; valid
  under independence or positive regression dependence within the family.
* ``bonferroni``     -- ``min(p) * k``; valid under arbitrary dependence.
* ``simes_adjusted`` -- Simes inflated by the harmonic factor ``g(k)``,
  which restores validity under arbitrary dependence.
* ``fisher``         -- chi-square survival of ``-2 * sum(log p)`` with
  ``2k`` degrees of freedom; valid under independence.

All combiners cap their output at 1, are monotone nondecreasing in every
input and invariant to permutation of the inputs.
"""

from __future__ import annotations

import enum
import math
import warnings
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special

from .errors import EmptyInputError, MissingPvalueError, PvalueOutOfRangeError
from .tree import HypothesisTree


def _as_pvalues(pvals: Sequence[float]) -> np.ndarray:
    p = np.asarray(pvals, dtype=float)
    if p.ndim != 1:
        raise ValueError("expected a 1-d sequence of p-values")
    if p.size == 0:
        raise EmptyInputError("empty family: no p-values to combine")
    if np.any(np.isnan(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise PvalueOutOfRangeError("p-values must lie in [0, 1]")
    return p


def simes(pvals: Sequence[float]) -> float:
    """Simes combination: ``min_j p_(j) * k / j``, capped at 1."""
    p = np.sort(_as_pvalues(pvals))
    k = p.size
    scaled = p * (k / np.arange(1, k + 1))
    return float(min(scaled.min(), 1.0))


def bonferroni(pvals: Sequence[float]) -> float:
    """Bonferroni combination: ``min(p) * k``, capped at 1."""
    p = _as_pvalues(pvals)
    return float(min(p.min() * p.size, 1.0))


@lru_cache(maxsize=None)
def harmonic_number(m: int) -> float:
    """Partial harmonic sum ``g(m) = 1 + 1/2 + ... + 1/m``.

    ``g(m)`` is the penalty under which Simes and BH-type procedures stay
    valid under arbitrary dependence; ``g(m) ~ log(m) + 1/2`` for large m.
    """
    m = int(m)
    if m < 1:
        raise ValueError(f"harmonic_number requires m >= 1, got {m}")
    return math.fsum(1.0 / i for i in range(1, m + 1))


def simes_adjusted(pvals: Sequence[float]) -> float:
    """Simes combination times ``g(k)``, capped at 1 (arbitrary dependence)."""
    p = _as_pvalues(pvals)
    return float(min(simes(p) * harmonic_number(p.size), 1.0))


def fisher(pvals: Sequence[float]) -> float:
    """Fisher combination via the chi-square survival function.

    Zero inputs are clamped to the smallest positive normal float before
    taking logs, which keeps the statistic finite while preserving the
    certain-rejection behaviour of a zero p-value.
    """
    p = _as_pvalues(pvals)
    k = p.size
    if k == 1:
        return float(p[0])
    stat = -2.0 * math.fsum(math.log(x) for x in np.maximum(p, np.finfo(float).tiny))
    # survival of chi-square with 2k dof = regularized upper incomplete gamma
    return float(special.gammaincc(k, stat / 2.0))


class Combiner(str, enum.Enum):
    """Available parent p-value constructions."""

    SIMES = "simes"
    FISHER = "fisher"
    BONFERRONI = "bonferroni"
    SIMES_ADJUSTED = "simes-adjusted"

    def __call__(self, pvals: Sequence[float]) -> float:
        return _COMBINER_FUNCS[self](pvals)

    @classmethod
    def parse(cls, name) -> "Combiner":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower().replace("_", "-"))
        except ValueError:
            options = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown combiner {name!r} (choose from {options})") from None


_COMBINER_FUNCS = {
    Combiner.SIMES: simes,
    Combiner.FISHER: fisher,
    Combiner.BONFERRONI: bonferroni,
    Combiner.SIMES_ADJUSTED: simes_adjusted,
}


def populate_internal_pvalues(
    tree: HypothesisTree, kind: Combiner = Combiner.SIMES
) -> HypothesisTree:
    """Fill in missing internal p-values bottom-up from the leaves.

    Each internal node receives ``kind`` applied to its children's
    (possibly already combined) p-values, starting from the deepest level
    and working up.  User-supplied internal p-values are preserved; a
    warning records that they took precedence over combination.
    """
    kind = Combiner.parse(kind)
    if tree.internal_complete:
        return tree
    pvalues = list(tree.pvalues)
    order = sorted(range(1, tree.n_nodes), key=lambda i: -tree.level[i])
    for node in order:
        kids = tree.children[node]
        if not kids or pvalues[node] is not None:
            continue
        child_p = [pvalues[c] for c in kids]
        if any(p is None for p in child_p):
            missing = next(c for c, p in zip(kids, child_p) if p is None)
            raise MissingPvalueError(
                f"node {'/'.join(tree.path_of(missing))!r} has no p-value"
            )
        pvalues[node] = kind(child_p)
    if tree.internal_supplied:
        warnings.warn(
            f"{len(tree.internal_supplied)} user-supplied internal p-values were "
            f"kept; only missing ones were combined with {kind.value}",
            UserWarning,
            stacklevel=2,
        )
    return tree.with_pvalues(pvalues)
