"""Hierarchical false-discovery-rate control on trees of hypotheses.

Build a tree of p-values with :func:`build_tree`, pick per-level bounds
in a :class:`TestConfig`, and run :func:`tree_bh` (positive dependence)
or :func:`tree_bh_arbitrary` (arbitrary dependence).  Score any rejection
pattern with the level-restricted and selective error measures in
:mod:`treefdr.metrics`, or compare procedures end to end with the
Monte-Carlo harness in :mod:`treefdr.simulate`.
"""

from .combine import (
    Combiner,
    bonferroni,
    fisher,
    harmonic_number,
    populate_internal_pvalues,
    simes,
    simes_adjusted,
)
from .errors import TreeFDRError, ValidationError
from .metrics import (
    LevelReport,
    family_weights,
    level_fdp,
    level_power,
    level_report,
    level_reports,
    recursive_error_values,
    sfdp_recursive,
    sfdp_weighted,
)
from .procedures import (
    Regime,
    RejectionResult,
    TestConfig,
    bb_two_level,
    bh_pooled,
    bh_stepup,
    by_stepup,
    from_leaf_rejections,
    tree_bh,
    tree_bh_arbitrary,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    load_spec_file,
    signal_blocks_spec,
    unbalanced_families_spec,
)
from .simulate import (
    Dependence,
    SimulationReport,
    SimulationSpec,
    generate_pvalues,
    normal_sf,
    run_simulation,
)
from .tree import ROOT, HypothesisTree, TruthAssignment, build_tree

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_SCENARIOS",
    "Combiner",
    "Dependence",
    "HypothesisTree",
    "LevelReport",
    "ROOT",
    "Regime",
    "RejectionResult",
    "SimulationReport",
    "SimulationSpec",
    "TestConfig",
    "TreeFDRError",
    "TruthAssignment",
    "ValidationError",
    "bb_two_level",
    "bh_pooled",
    "bh_stepup",
    "bonferroni",
    "build_tree",
    "by_stepup",
    "family_weights",
    "fisher",
    "from_leaf_rejections",
    "generate_pvalues",
    "harmonic_number",
    "level_fdp",
    "level_power",
    "level_report",
    "level_reports",
    "load_spec_file",
    "recursive_error_values",
    "normal_sf",
    "populate_internal_pvalues",
    "run_simulation",
    "sfdp_recursive",
    "sfdp_weighted",
    "signal_blocks_spec",
    "simes",
    "simes_adjusted",
    "tree_bh",
    "tree_bh_arbitrary",
    "unbalanced_families_spec",
]
