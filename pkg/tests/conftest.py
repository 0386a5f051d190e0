"""Shared pytest fixtures for seeded numerical tests."""

from __future__ import annotations

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    """Fresh generator with a fixed seed so sampling tests are reproducible."""
    return np.random.default_rng(20240607)
