"""Monte-Carlo harness comparing the procedures on synthetic trees.

Each replicate draws one p-value per leaf from the location-shift model

    X ~ mu * 1{non-null} + N(0, 1),    p = 1 - Phi(X),

runs the requested methods, scores them against the truth with the
level-restricted FDP, the selective FDP and power, and aggregates means
with Monte-Carlo standard errors.  Replicates use counter-based RNG
streams keyed by ``(seed, replicate)``, so reports are bit-identical
regardless of how many workers run them.

Leaf draws are independent by default; the block-equicorrelated option
mixes a shared per-block factor into consecutive leaves
(``Z = sqrt(rho) * W_block + sqrt(1 - rho) * eps``) as a synthetic
stand-in for the strong local dependence of genotype data.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy import special

from .errors import SimulationError, ValidationError
from .metrics import level_fdp, level_power, sfdp_weighted
from .procedures import (
    Regime,
    RejectionResult,
    TestConfig,
    bb_two_level,
    bh_pooled,
    from_leaf_rejections,
    tree_bh,
    tree_bh_arbitrary,
)
from .tree import ROOT, HypothesisTree, TruthAssignment

METHODS = ("treebh", "treebh-arb", "bb", "bh-pooled")
METRICS = ("fdr", "sfdr", "power")


@dataclass(frozen=True)
class Dependence:
    """Leaf-score dependence model; ``rho == 0`` means independent draws."""

    kind: str = "independent"
    rho: float = 0.0
    block_size: int = 1

    def __post_init__(self):
        if self.kind not in {"independent", "block"}:
            raise ValidationError(f"unknown dependence kind {self.kind!r}")
        if self.kind == "block":
            if not 0.0 <= self.rho < 1.0:
                raise ValidationError("rho must lie in [0, 1)")
            if self.block_size < 1:
                raise ValidationError("block_size must be >= 1")

INDEPENDENT = Dependence()


@dataclass(frozen=True)
class SimulationSpec:
    """Everything needed to reproduce one simulation study."""

    name: str
    tree: HypothesisTree
    truth: TruthAssignment
    mu: float
    reps: int
    seed: int
    q_levels: tuple[float, ...]
    methods: tuple[str, ...] = METHODS
    dependence: Dependence = INDEPENDENT

    def __post_init__(self):
        if self.reps < 1:
            raise ValidationError("reps must be >= 1")
        if self.mu < 0:
            raise ValidationError("mu must be >= 0")
        object.__setattr__(self, "methods", tuple(self.methods))
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValidationError(
                f"unknown methods {sorted(unknown)}; choose from {list(METHODS)}"
            )
        object.__setattr__(
            self, "q_levels", tuple(float(q) for q in self.q_levels)
        )
        if any(not 0.0 < q <= 1.0 for q in self.q_levels):
            raise ValidationError("q_levels entries must lie in (0, 1]")
        if len(self.q_levels) != self.tree.levels:
            raise ValidationError(
                f"spec has {len(self.q_levels)} level bounds but the tree has "
                f"{self.tree.levels} levels"
            )
        self.truth.validate(self.tree)

    def override(self, **kwargs) -> "SimulationSpec":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs) if kwargs else self


def normal_sf(x) -> np.ndarray:
    """Upper-tail probability of the standard normal, elementwise."""
    return special.ndtr(-np.asarray(x, dtype=float))


def generate_pvalues(
    tree: HypothesisTree,
    truth: TruthAssignment,
    mu: float,
    rng: np.random.Generator,
    dependence: Dependence = INDEPENDENT,
) -> np.ndarray:
    """One leaf p-value draw, ordered like ``tree.leaf_ids``."""
    n = len(tree.leaf_ids)
    shift = np.fromiter(
        (mu if truth.nonnull[i] else 0.0 for i in tree.leaf_ids), float, count=n
    )
    noise = rng.standard_normal(n)
    if dependence.kind == "block" and dependence.rho > 0.0:
        n_blocks = -(-n // dependence.block_size)
        shared = rng.standard_normal(n_blocks)
        block_of = np.arange(n) // dependence.block_size
        noise = (
            math.sqrt(dependence.rho) * shared[block_of]
            + math.sqrt(1.0 - dependence.rho) * noise
        )
    return normal_sf(shift + noise)


def _evaluation_result(method: str, tree: HypothesisTree, spec) -> RejectionResult:
    """Run ``method`` and lift its rejections onto the full tree."""
    q = spec.q_levels
    if method == "treebh":
        return tree_bh(tree, TestConfig(q_levels=q))
    if method == "treebh-arb":
        return tree_bh_arbitrary(
            tree, TestConfig(q_levels=q, regime=Regime.ARBITRARY)
        )
    if method == "bb":
        flat = bb_two_level(tree, q[0], q[-1])
        leaves = frozenset(i for i in flat.rejected if tree.is_leaf(i))
        top = flat.selected_in(ROOT)
        return from_leaf_rejections(tree, leaves, extra_rejected=top)
    if method == "bh-pooled":
        return from_leaf_rejections(tree, bh_pooled(tree, q[-1]))
    raise ValidationError(f"unknown method {method!r}")


def replicate_metrics(spec: SimulationSpec, rep: int) -> list[float]:
    """Metric vector for one replicate, ordered by (method, level, metric)."""
    try:
        rng = np.random.default_rng([spec.seed, rep])
        pvals = generate_pvalues(spec.tree, spec.truth, spec.mu, rng, spec.dependence)
        tree = spec.tree.with_leaf_pvalues(pvals)
        out: list[float] = []
        for method in spec.methods:
            result = _evaluation_result(method, tree, spec)
            for level in range(1, tree.levels + 1):
                out.append(float(level_fdp(tree, result, spec.truth, level)))
                out.append(float(sfdp_weighted(tree, result, spec.truth, level)))
                out.append(float(level_power(tree, result, spec.truth, level)))
        return out
    except Exception as exc:
        raise SimulationError(
            f"replicate {rep} of {spec.name!r} (seed {spec.seed}) failed: {exc}"
        ) from exc


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    se: float


@dataclass(frozen=True)
class SimulationReport:
    """Aggregated per-method, per-level error and power estimates."""

    name: str
    reps: int
    seed: int
    mu: float
    q_levels: tuple[float, ...]
    levels: int
    methods: tuple[str, ...]
    cells: Mapping[tuple[str, int, str], MetricSummary]
    runtime_seconds: float = field(compare=False)

    def mean(self, method: str, level: int, metric: str) -> float:
        return self.cells[(method, level, metric)].mean

    def se(self, method: str, level: int, metric: str) -> float:
        return self.cells[(method, level, metric)].se

    def rows(self) -> list[tuple[str, int, str, float, float]]:
        return [
            (method, level, metric, cell.mean, cell.se)
            for (method, level, metric), cell in sorted(self.cells.items())
        ]

    def to_document(self) -> dict:
        """Machine-readable form; excludes runtime so equal seeds give
        byte-identical output."""
        return {
            "name": self.name,
            "reps": self.reps,
            "seed": self.seed,
            "mu": self.mu,
            "q_levels": list(self.q_levels),
            "levels": self.levels,
            "methods": list(self.methods),
            "results": [
                {
                    "method": method,
                    "level": level,
                    "metric": metric,
                    "mean": cell.mean,
                    "se": cell.se,
                }
                for (method, level, metric), cell in sorted(self.cells.items())
            ],
        }


def _summaries(samples: Sequence[Sequence[float]]) -> list[MetricSummary]:
    n = len(samples)
    out = []
    for col in range(len(samples[0])):
        vals = [row[col] for row in samples]
        mean = math.fsum(vals) / n
        var = math.fsum((v - mean) ** 2 for v in vals) / n
        out.append(MetricSummary(mean=mean, se=math.sqrt(var / n)))
    return out


def run_simulation(spec: SimulationSpec, workers: int = 1) -> SimulationReport:
    """Run all replicates and aggregate; deterministic given ``spec.seed``.

    ``workers > 1`` fans replicates out to processes; the reduction is
    ordered by replicate index so the report does not depend on the
    worker count.
    """
    start = time.perf_counter()
    reps = range(spec.reps)
    if workers > 1 and spec.reps > 1:
        chunk = max(1, spec.reps // (workers * 4))
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_set_worker_spec, initargs=(spec,)
        ) as pool:
            samples = list(pool.map(_replicate_worker, reps, chunksize=chunk))
    else:
        samples = [replicate_metrics(spec, r) for r in reps]

    summaries = _summaries(samples)
    cells: dict[tuple[str, int, str], MetricSummary] = {}
    idx = 0
    for method in spec.methods:
        for level in range(1, spec.tree.levels + 1):
            for metric in METRICS:
                cells[(method, level, metric)] = summaries[idx]
                idx += 1
    return SimulationReport(
        name=spec.name,
        reps=spec.reps,
        seed=spec.seed,
        mu=spec.mu,
        q_levels=spec.q_levels,
        levels=spec.tree.levels,
        methods=spec.methods,
        cells=cells,
        runtime_seconds=time.perf_counter() - start,
    )


# the spec is shipped to each worker once at pool start, not per task
_worker_spec: SimulationSpec | None = None


def _set_worker_spec(spec: SimulationSpec) -> None:
    global _worker_spec
    _worker_spec = spec


def _replicate_worker(rep: int) -> list[float]:
    return replicate_metrics(_worker_spec, rep)
