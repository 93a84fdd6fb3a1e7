"""
Test etea/analysis/avalanche.py
"""

import inspect

import numpy as np
import pandas as pd
import pytest

from etea.analysis import AvalancheReport
from etea.analysis import avalanche as av


def test_analysis_package_exposes_avalanche_module():
    assert inspect.ismodule(av)
    assert callable(av.avalanche)
    assert av.AvalancheReport is AvalancheReport


def test_zero_cycles_has_no_mixing():
    report = av.avalanche(trials=1, seed=0, cycles=0)
    assert report.mean_flipped_bits == 1.0
    assert report.histogram[1] == 1
    assert report.histogram.sum() == 1


def test_full_cipher_mean_near_half():
    report = av.avalanche(trials=10_000, seed=123)
    assert 28 <= report.mean_flipped_bits <= 36
    assert 3 <= report.stddev <= 5
    assert report.histogram.shape == (65,)
    assert report.histogram.sum() == 10_000


def test_key_bit_flips_also_avalanche():
    report = av.avalanche(trials=5_000, seed=4, flip="key")
    assert 28 <= report.mean_flipped_bits <= 36


def test_same_seed_same_report():
    first = av.avalanche(trials=2_000, seed=42)
    second = av.avalanche(trials=2_000, seed=42)
    assert first == second
    assert np.array_equal(first.histogram, second.histogram)
    assert first.to_text() == second.to_text()


def test_different_seed_different_report():
    assert av.avalanche(trials=2_000, seed=1) != av.avalanche(trials=2_000, seed=2)


def test_mixing_grows_with_cycles():
    table = av.avalanche_by_cycles(trials=2_000, seed=3, cycles=[0, 1, 2, 32])
    assert list(table.columns) == ["cycles", "mean_flipped_bits", "stddev"]
    means = table.set_index("cycles")["mean_flipped_bits"]
    assert means[0] == 1.0
    assert means[1] < means[32]
    assert 28 <= means[32] <= 36


def test_report_frame():
    report = av.avalanche(trials=500, seed=8)
    frame = report.to_frame()
    assert isinstance(frame, pd.DataFrame)
    assert list(frame.columns) == ["flipped_bits", "count", "fraction"]
    assert len(frame) == 65
    assert frame["count"].sum() == 500
    assert frame["fraction"].sum() == pytest.approx(1.0)


def test_report_text():
    text = av.avalanche(trials=100, seed=8).to_text()
    assert "mean flipped bits" in text
    assert "trials:" in text


def test_plot_histogram(tmp_path):
    path = tmp_path / "avalanche.png"
    av.plot_histogram(av.avalanche(trials=100, seed=8), str(path))
    assert path.exists()
    assert path.stat().st_size > 0


@pytest.mark.parametrize(
    "kwargs",
    [{"trials": 0}, {"trials": 10, "flip": "nonce"}, {"trials": 10, "cycles": -1}],
)
def test_bad_arguments(kwargs):
    with pytest.raises(ValueError):
        av.avalanche(seed=0, **kwargs)
