"""
Set up fixtures for testing
"""

import pytest

import numpy as np

from etea.cipher.core import Key128

MASK = 0xFFFFFFFF


def reference_tea_encrypt(v0, v1, k):
    """Straight transcription of the published reference encrypt routine."""
    s = 0
    for _ in range(32):
        s = (s + 0x9E3779B9) & MASK
        v0 = (v0 + (((v1 << 4) + k[0]) ^ (v1 + s) ^ ((v1 >> 5) + k[1]))) & MASK
        v1 = (v1 + (((v0 << 4) + k[2]) ^ (v0 + s) ^ ((v0 >> 5) + k[3]))) & MASK
    return v0, v1


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def zero_key():
    return Key128((0, 0, 0, 0))


@pytest.fixture
def sample_key():
    return Key128((0x00112233, 0x44556677, 0x8899AABB, 0xCCDDEEFF))


@pytest.fixture
def reference_encrypt():
    return reference_tea_encrypt


@pytest.fixture
def random_keys():
    """Return a helper drawing n random Key128 values from an rng."""

    def draw(rng, n):
        return [
            Key128(tuple(int(w) for w in row))
            for row in rng.integers(0, 2**32, size=(n, 4), dtype=np.uint32)
        ]

    return draw
