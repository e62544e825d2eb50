"""Pytest configuration shared across the test suite.

Channel noise and info words are always drawn from explicit seeded
generators, but a few tests fall back on the global ``random`` /
``numpy.random`` state for parameter picks. Seeding both before each test
keeps every run reproducible.
"""
import os
import random

import numpy as np
import pytest

# Default seed; override with POLAR_TEST_SEED to reproduce a specific run.
TEST_RANDOM_SEED = int(os.getenv("POLAR_TEST_SEED", "20140601"))


@pytest.fixture(autouse=True)
def _seed_test_randomness():
    random.seed(TEST_RANDOM_SEED)
    np.random.seed(TEST_RANDOM_SEED)


@pytest.fixture
def test_rng():
    """Fresh generator per test so parametrized cases do not share a stream."""
    return np.random.default_rng(TEST_RANDOM_SEED)
