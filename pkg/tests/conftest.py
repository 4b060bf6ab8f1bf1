from pathlib import Path

import pytest

import treefdr as t
from treefdr import io

DATA = Path(__file__).parent / "data"

# Rejection pattern the fixture tree was crafted to realize with
# q = (0.1, 0.1, 0.1): two of three level-1 nodes rejected, both their
# level-2 families fully rejected except that H3/H7's level-3 family is
# tested with zero rejections and H3/H8 keeps only its first leaf.
WORKED_REJECTED = {
    ("H1",), ("H3",),
    ("H1", "H4"), ("H1", "H5"), ("H3", "H7"), ("H3", "H8"),
    ("H1", "H4", "H9"), ("H1", "H4", "H10"), ("H1", "H4", "H11"),
    ("H1", "H5", "H12"), ("H1", "H5", "H13"), ("H1", "H5", "H14"),
    ("H1", "H5", "H15"),
    ("H3", "H8", "H21"),
}

WORKED_TESTED_PARENTS = {
    (),
    ("H1",), ("H3",),
    ("H1", "H4"), ("H1", "H5"), ("H3", "H7"), ("H3", "H8"),
}


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def worked_tree():
    return io.load_tree(DATA / "worked_tree.tsv", DATA / "worked_internal.tsv")


@pytest.fixture(scope="session")
def worked_truth(worked_tree):
    return io.read_truth_file(DATA / "worked_truth.tsv", worked_tree)


@pytest.fixture(scope="session")
def worked_result(worked_tree):
    return t.tree_bh(worked_tree, t.TestConfig(q_levels=(0.1, 0.1, 0.1)))
