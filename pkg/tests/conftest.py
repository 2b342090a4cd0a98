import numpy as np
import pytest

from vilenkin_mra import PTree, derive
from vilenkin_mra.tree import tree_from_paths

# The p=3, N=2 example tree: root chain 0 -> 0, then 2 with children 1, 0, 2;
# 1 -> 0 is a leaf, 0 -> 1 -> {1, 2}.
SAMPLE_PATHS = [(0, 0, 2, 1, 0), (0, 0, 2, 0, 1, 1), (0, 0, 2, 0, 1, 2), (0, 0, 2, 2)]

SAMPLE_WINDOWS = {(0, 0, 0), (0, 0, 2), (0, 2, 1), (0, 2, 0), (0, 2, 2),
                (2, 1, 0), (2, 0, 1), (0, 1, 1), (0, 1, 2)}

# support words (beta_1, beta_0, beta_-1, beta_-2), highest index first
SAMPLE_SUPPORT = [(0, 0, 0, 0), (0, 0, 0, 2), (0, 0, 2, 0), (0, 0, 2, 1), (0, 0, 2, 2),
                (0, 2, 0, 1), (0, 2, 1, 0), (2, 0, 1, 1), (2, 0, 1, 2)]


def sample_tree():
    return tree_from_paths(SAMPLE_PATHS, 3, 2)


def haar_tree(p=3):
    return PTree(p, 1, [(0, 0, None)] + [(c, c, 0) for c in range(1, p)])


def duplicate_window_tree():
    """p=3, N=1: root 0 -> {1, 2}, 2 -> 1.  Label 1 appears twice, 0 only at the root."""
    return PTree(3, 1, [(0, 0, None), (1, 1, 0), (2, 2, 0), (3, 1, 2)])


@pytest.fixture(scope="session")
def sample():
    return sample_tree()


@pytest.fixture(scope="session")
def haar():
    return haar_tree()


@pytest.fixture(scope="session")
def sample_mra():
    return derive(sample_tree())


@pytest.fixture(scope="session")
def haar_mra():
    return derive(haar_tree())


@pytest.fixture(scope="session")
def sample_bank(sample_mra):
    return sample_mra.bank()


@pytest.fixture(scope="session")
def haar_bank(haar_mra):
    return haar_mra.bank()


@pytest.fixture(scope="session")
def negative_mra():
    return derive(duplicate_window_tree(), strict=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
