"""Random-instance generators and independent oracles shared by the tests.

The oracles here are deliberately naive re-implementations of the
definitions (O(m^2) scans, literal formulas) so the fast engines are
checked against something that cannot share their bugs.
"""

import random

import treefdr as t


def bh_oracle(pvals, q):
    """Literal step-up definition: k = max{j : p_(j) <= j*q/m}."""
    m = len(pvals)
    s = sorted(pvals)
    k = 0
    for j in range(1, m + 1):
        if s[j - 1] <= j * q / m:
            k = j
    if k == 0:
        return frozenset()
    return frozenset(i for i, p in enumerate(pvals) if p <= k * q / m)


def by_oracle(pvals, q):
    g = sum(1.0 / i for i in range(1, len(pvals) + 1))
    return bh_oracle(pvals, q / g)


def random_tree(rnd: random.Random, max_leaves=40, max_depth=4,
                p_gen=None, full_depth=False):
    """Random tree via random label paths.

    Intermediate labels come from a small alphabet so branches merge;
    terminal labels are unique per leaf, which rules out duplicate and
    prefix-conflicting paths by construction.  ``full_depth`` pins every
    leaf to the same depth (no ragged branches).
    """
    n_leaves = rnd.randint(1, max_leaves)
    depth = rnd.randint(1, max_depth)
    rows = []
    for i in range(n_leaves):
        d = depth if full_depth else rnd.randint(1, depth)
        labels = tuple(f"g{rnd.randint(1, 3)}" for _ in range(d - 1)) + (f"t{i}",)
        p = p_gen(rnd) if p_gen else rnd.random()
        rows.append((labels, p))
    return t.build_tree(rows)


def signal_pvalue(rnd: random.Random) -> float:
    """Mixture of small and uniform p-values, so cascades go deep."""
    return rnd.random() ** 4 if rnd.random() < 0.6 else rnd.random()


def random_truth(rnd: random.Random, tree, rate=0.4):
    leaves = [i for i in tree.leaf_ids if rnd.random() < rate]
    return t.TruthAssignment.from_leaf_status(tree, leaves)


def random_pattern(rnd: random.Random, tree, consonant=False):
    """Random coherent rejection pattern.

    Families are tested exactly below rejected parents (root included);
    selections are random subsets, empty ones allowed unless
    ``consonant`` forces at least one rejection per tested family.
    """
    tested, rejected, selections = set(), set(), {}
    frontier = [t.ROOT]
    while frontier:
        node = frontier.pop()
        family = tree.family_of(node)
        if not family:
            continue
        tested.add(node)
        sel = [c for c in family if rnd.random() < 0.55]
        if consonant and not sel:
            sel = [rnd.choice(family)]
        selections[node] = tuple(sel)
        rejected.update(sel)
        frontier.extend(sel)
    return t.RejectionResult(
        tested=frozenset(tested),
        rejected=frozenset(rejected),
        family_bound={},
        selection_sets=selections,
    )
