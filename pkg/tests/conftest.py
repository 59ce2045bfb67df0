"""Shared fixtures for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from wfeq import SimplexVector, SurvivalMatrix


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240817))


@pytest.fixture
def canonical_W():
    """The worked two-state example used across modules."""
    return SurvivalMatrix([[0.4, 1.0], [1.0, 0.8]])


@pytest.fixture
def canonical_p():
    return SimplexVector([0.5, 0.5])
