import numpy as np
import pytest


class ForcedRng:
    """Feeds a fixed sequence of uniforms to samplers under test."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, size=None):
        if size is None:
            return self.values.pop(0)
        if isinstance(size, tuple):
            n = int(np.prod(size))
            out = np.array([self.values.pop(0) for _ in range(n)])
            return out.reshape(size)
        return np.array([self.values.pop(0) for _ in range(int(size))])


@pytest.fixture
def forced_rng():
    return ForcedRng
