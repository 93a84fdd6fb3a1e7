"""
Set up fixtures for testing
"""

import pytest

import numpy as np


@pytest.fixture
def rng():
    return np.random.default_rng(77)


@pytest.fixture
def video_carrier():
    """Bytes shaped like the start of an MP4 file."""
    ftyp = b"\x00\x00\x00\x18ftypmp42\x00\x00\x00\x00mp42isom"
    mdat = b"\x00\x00\x01\x00mdat" + bytes(range(256))[: 0x100 - 8]
    return ftyp + mdat
