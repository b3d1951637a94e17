import numpy as np
import pytest

from ballerg.spaces import Vector


@pytest.fixture
def rng():
    """A seeded generator so every test sees the same draws."""
    return np.random.default_rng(20240601)


@pytest.fixture
def random_ball_vector(rng):
    """Factory for random complex l_2 vectors with a given norm."""

    def make(dim: int, size: float) -> Vector:
        raw = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return Vector(raw / np.linalg.norm(raw) * size)

    return make
