import random
from fractions import Fraction

import pytest

import treefdr as t
from treefdr.errors import PvalueOutOfRangeError, ValidationError
from treefdr.procedures import Regime

from conftest import WORKED_REJECTED, WORKED_TESTED_PARENTS
from gen import bh_oracle, by_oracle, random_tree, signal_pvalue


def test_bh_stepup_examples():
    assert t.bh_stepup([0.01, 0.04, 0.03, 0.5], 0.1) == {0, 1, 2}
    assert t.bh_stepup([1.0, 1.0, 1.0], 0.1) == frozenset()
    assert t.bh_stepup([0.04], 0.05) == {0}
    assert t.bh_stepup([0.06], 0.05) == frozenset()


def test_bh_stepup_ties_at_threshold_all_rejected():
    # k = 2, cutoff 0.05; both values at the cutoff go
    assert t.bh_stepup([0.05, 0.05, 0.9, 0.9], 0.1) == {0, 1}


def test_bh_stepup_validation():
    with pytest.raises(ValidationError):
        t.bh_stepup([], 0.1)
    with pytest.raises(ValidationError):
        t.bh_stepup([0.5], 0.0)
    with pytest.raises(ValidationError):
        t.bh_stepup([0.5], 1.5)
    with pytest.raises(PvalueOutOfRangeError):
        t.bh_stepup([0.5, 2.0], 0.1)


def test_by_stepup_examples():
    assert t.by_stepup([0.04], 0.05) == {0}  # g(1) = 1
    assert t.by_stepup([0.01, 0.04, 0.03, 0.5], 0.1) == {0}
    assert t.by_stepup([0.0, 0.0, 0.0], 0.05) == {0, 1, 2}


def test_stepup_against_brute_force():
    rnd = random.Random(1)
    for _ in range(1000):
        m = rnd.randint(1, 30)
        pvals = [signal_pvalue(rnd) for _ in range(m)]
        q = rnd.uniform(0.01, 1.0)
        assert t.bh_stepup(pvals, q) == bh_oracle(pvals, q)
        assert t.by_stepup(pvals, q) == by_oracle(pvals, q)


def test_tree_bh_reproduces_fixture_pattern(worked_tree):
    result = t.tree_bh(worked_tree, t.TestConfig(q_levels=(0.1, 0.1, 0.1)))
    result.validate_against(worked_tree)
    assert {worked_tree.path_of(i) for i in result.rejected} == WORKED_REJECTED
    assert {worked_tree.path_of(i) for i in result.tested} == WORKED_TESTED_PARENTS
    # H2's and H6's families never examined
    h6 = worked_tree.node_at(("H2", "H6"))
    assert h6 not in result.tested
    assert result.selected_in(worked_tree.node_at(("H3", "H7"))) == ()


def test_tree_bh_fixture_bounds_exact(worked_tree, worked_result):
    q = Fraction(0.1)
    root_bound = worked_result.family_bound[t.ROOT]
    assert root_bound == q
    h3 = worked_tree.node_at(("H3",))
    h8 = worked_tree.node_at(("H3", "H8"))
    assert worked_result.family_bound[h3] == Fraction(2, 3) * q
    assert worked_result.family_bound[h8] == Fraction(2, 3) * Fraction(2, 2) * q


def test_tree_bh_bound_product_and_recursive_forms_agree():
    rnd = random.Random(3)
    for _ in range(200):
        tree = random_tree(rnd, p_gen=signal_pvalue)
        q_levels = tuple(
            sorted(round(rnd.uniform(0.05, 0.5), 3) for _ in range(tree.levels))
        )
        result = t.tree_bh(tree, t.TestConfig(q_levels=q_levels))
        result.validate_against(tree)
        for parent, bound in result.family_bound.items():
            level = tree.level[parent] + 1
            # product form along the ancestor chain
            prod = Fraction(1)
            node = parent
            while node != t.ROOT:
                holder = tree.parent[node]
                prod *= Fraction(
                    len(result.selected_in(holder)), len(tree.family_of(holder))
                )
                node = holder
            assert bound == prod * Fraction(q_levels[level - 1])
            # recursive form through the parent family's bound
            if parent != t.ROOT:
                holder = tree.parent[parent]
                assert bound == (
                    result.family_bound[holder]
                    * Fraction(
                        len(result.selected_in(holder)), len(tree.family_of(holder))
                    )
                    * Fraction(q_levels[level - 1])
                    / Fraction(q_levels[level - 2])
                )


def test_tree_bh_single_level_reduces_to_bh():
    rnd = random.Random(11)
    for _ in range(300):
        m = rnd.randint(1, 25)
        pvals = [signal_pvalue(rnd) for _ in range(m)]
        q = rnd.uniform(0.02, 0.9)
        tree = t.build_tree([((f"t{i}",), p) for i, p in enumerate(pvals)])
        result = t.tree_bh(tree, t.TestConfig(q_levels=(q,)))
        expected = {tree.node_at((f"t{i}",)) for i in bh_oracle(pvals, q)}
        assert set(result.rejected) == expected
        arb = t.tree_bh_arbitrary(
            tree, t.TestConfig(q_levels=(q,), regime=Regime.ARBITRARY)
        )
        expected_by = {tree.node_at((f"t{i}",)) for i in by_oracle(pvals, q)}
        assert set(arb.rejected) == expected_by


def test_tree_bh_no_signal_tests_only_top(worked_tree):
    flat = worked_tree.with_leaf_pvalues([1.0] * 14)
    # drop supplied internals so the Simes combination drives everything
    bare = t.build_tree(flat.leaf_rows())
    result = t.tree_bh(bare, t.TestConfig(q_levels=(0.1, 0.1, 0.1)))
    assert result.rejected == frozenset()
    assert result.tested == frozenset({t.ROOT})


def test_tree_bh_arbitrary_bound_divisor(worked_tree):
    # same cascade, every bound divided by g(product of family sizes on path)
    config = t.TestConfig(q_levels=(0.9, 0.9, 0.9), regime=Regime.ARBITRARY)
    result = t.tree_bh_arbitrary(worked_tree, config)
    q = Fraction(0.9)
    assert result.family_bound[t.ROOT] == q / Fraction(t.harmonic_number(3))
    # two of three rejected at the top, both members of H3's family kept:
    # bounds (2/3) q / g(3*2) at level 2 and (2/3)(2/2) q / g(3*2*2) below
    assert len(result.selected_in(t.ROOT)) == 2
    h3 = worked_tree.node_at(("H3",))
    assert result.family_bound[h3] == \
        Fraction(2, 3) * q / Fraction(t.harmonic_number(6))
    h8 = worked_tree.node_at(("H3", "H8"))
    assert result.family_bound[h8] == \
        Fraction(2, 3) * Fraction(2, 2) * q / Fraction(t.harmonic_number(12))


def test_tree_bh_arbitrary_subset_of_prds():
    rnd = random.Random(23)
    for _ in range(200):
        tree = random_tree(rnd, p_gen=signal_pvalue)
        q_levels = tuple(rnd.uniform(0.05, 0.6) for _ in range(tree.levels))
        prds = t.tree_bh(tree, t.TestConfig(q_levels=q_levels))
        arb = t.tree_bh_arbitrary(
            tree, t.TestConfig(q_levels=q_levels, regime=Regime.ARBITRARY)
        )
        assert arb.rejected <= prds.rejected


def test_consonance_with_simes_and_equal_bounds():
    rnd = random.Random(31)
    for _ in range(300):
        tree = random_tree(rnd, p_gen=signal_pvalue)
        q = rnd.uniform(0.05, 0.5)
        result = t.tree_bh(tree, t.TestConfig(q_levels=(q,) * tree.levels))
        for parent in result.tested:
            if parent != t.ROOT:
                assert result.selected_in(parent), (
                    "tested family above level 1 with no rejection"
                )


def test_per_branch_termination():
    # branch A carries signal three levels down; branch B dies at level 2
    tree = t.build_tree(
        [
            (("A", "x", "u"), 0.001), (("A", "x", "v"), 0.002),
            (("B", "y", "w"), 0.9), (("B", "y", "z"), 0.95),
        ],
        internal_pvalues={
            ("A",): 0.001, ("B",): 0.002, ("A", "x"): 0.001, ("B", "y"): 0.9,
        },
    )
    result = t.tree_bh(tree, t.TestConfig(q_levels=(0.1, 0.1, 0.1)))
    b = tree.node_at(("B",))
    by = tree.node_at(("B", "y"))
    assert b in result.rejected and b in result.tested
    assert result.selected_in(b) == ()          # family tested, nothing rejected
    assert by not in result.tested              # branch stopped below
    ax = tree.node_at(("A", "x"))
    assert ax in result.tested and result.selected_in(ax)


def test_ragged_leaf_stops_branch():
    tree = t.build_tree(
        [(("A", "a"), 0.001), (("A", "b"), 0.002), (("B",), 0.001)]
    )
    result = t.tree_bh(tree, t.TestConfig(q_levels=(0.1, 0.1)))
    b = tree.node_at(("B",))
    assert b in result.rejected
    assert b in result.ragged_stops
    assert b not in result.tested


def test_config_validation(worked_tree):
    with pytest.raises(ValidationError):
        t.TestConfig(q_levels=(0.1, 0.0, 0.1))
    with pytest.raises(ValidationError):
        t.tree_bh(worked_tree, t.TestConfig(q_levels=(0.1, 0.1)))  # length 2 != 3
    with pytest.raises(ValidationError):
        t.tree_bh(
            worked_tree,
            t.TestConfig(q_levels=(0.1,) * 3, regime=Regime.ARBITRARY),
        )
    with pytest.raises(ValidationError):
        t.tree_bh_arbitrary(worked_tree, t.TestConfig(q_levels=(0.1,) * 3))


def test_bh_pooled(worked_tree):
    # every leaf clears the smallest threshold
    tiny = worked_tree.with_leaf_pvalues([0.001] * 14)
    assert len(t.bh_pooled(tiny, 0.05)) == 14
    # a single family pools to plain BH
    rnd = random.Random(13)
    for _ in range(100):
        pvals = [signal_pvalue(rnd) for _ in range(rnd.randint(1, 20))]
        tree = t.build_tree([((f"t{i}",), p) for i, p in enumerate(pvals)])
        got = {tree.path_of(i)[0] for i in t.bh_pooled(tree, 0.2)}
        assert got == {f"t{i}" for i in bh_oracle(pvals, 0.2)}


def _bb_oracle(tree, q1, q2):
    """Independent re-implementation of the two-level comparator."""
    rows = tree.family_of(t.ROOT)
    pooled = {r: tree.descendant_leaves(r) for r in rows}
    row_p = [
        sorted(tree.pvalues[l] for l in pooled[r]) for r in rows
    ]
    simes_p = [
        min(min(p * len(ps) / (j + 1) for j, p in enumerate(ps)), 1.0)
        for ps in row_p
    ]
    picked = bh_oracle(simes_p, q1)
    selected = {rows[i] for i in picked}
    out = {}
    for r in selected:
        leaves = pooled[r]
        sub = bh_oracle([tree.pvalues[l] for l in leaves],
                        q2 * len(selected) / len(rows))
        out[r] = {leaves[i] for i in sub}
    return selected, out


def test_bb_pooled_family_structure(worked_tree):
    result = t.bb_two_level(worked_tree, 0.1, 0.1)
    h1 = worked_tree.node_at(("H1",))
    pooled = worked_tree.descendant_leaves(h1)
    assert {worked_tree.path_of(i)[-1] for i in pooled} == {
        "H9", "H10", "H11", "H12", "H13", "H14", "H15"
    }
    assert set(result.selected_in(h1)) <= set(pooled)


def test_bb_matches_independent_oracle():
    rnd = random.Random(17)
    for _ in range(1000):
        tree = random_tree(rnd, max_leaves=20, max_depth=3, p_gen=signal_pvalue)
        q1, q2 = rnd.uniform(0.05, 0.5), rnd.uniform(0.05, 0.5)
        got = t.bb_two_level(tree, q1, q2)
        want_rows, want_leaves = _bb_oracle(tree, q1, q2)
        assert set(got.selected_in(t.ROOT)) == want_rows
        for r in want_rows:
            assert set(got.selected_in(r)) == want_leaves[r]


def test_bb_equals_tree_bh_on_two_level_trees():
    rnd = random.Random(19)
    for _ in range(300):
        tree = random_tree(rnd, max_leaves=25, max_depth=2,
                           p_gen=signal_pvalue, full_depth=True)
        if tree.levels != 2:
            continue
        q1, q2 = rnd.uniform(0.05, 0.5), rnd.uniform(0.05, 0.5)
        bb = t.bb_two_level(tree, q1, q2)
        hier = t.tree_bh(tree, t.TestConfig(q_levels=(q1, q2)))
        assert bb.rejected == hier.rejected
        assert bb.selection_sets == hier.selection_sets
        assert bb.family_bound == hier.family_bound


def test_from_leaf_rejections_coherence(worked_tree):
    leaves = [worked_tree.node_at(("H1", "H4", "H9")),
              worked_tree.node_at(("H3", "H8", "H21"))]
    result = t.from_leaf_rejections(worked_tree, leaves)
    result.validate_against(worked_tree)
    assert {worked_tree.path_of(i) for i in result.rejected} == {
        ("H1",), ("H1", "H4"), ("H1", "H4", "H9"),
        ("H3",), ("H3", "H8"), ("H3", "H8", "H21"),
    }
    with pytest.raises(ValidationError):
        t.from_leaf_rejections(worked_tree, [worked_tree.node_at(("H1",))])


def test_determinism(worked_tree):
    config = t.TestConfig(q_levels=(0.1, 0.1, 0.1))
    a = t.tree_bh(worked_tree, config)
    b = t.tree_bh(worked_tree, config)
    assert a == b
