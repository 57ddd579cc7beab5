"""Shared fixtures and statistical helpers for the test suite."""

import numpy as np
import pytest

from asrfcap.cli import bundled_table_path
from asrfcap.portfolio import expand_granular, load_grade_table


def ks_one_sample(sample, cdf):
    """Exact Kolmogorov-Smirnov distance of a sample against a CDF.

    cdf must accept a sorted array and return F evaluated pointwise.
    Ties are handled by taking the empirical CDF jump extremes.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(np.max(np.maximum(hi - f, f - lo)))


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov distance between loss samples."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


@pytest.fixture(scope="session")
def table_rows():
    return load_grade_table(bundled_table_path())


@pytest.fixture(scope="session")
def granular_portfolio(table_rows):
    # 1 bp cap on the bundled table: 10,000 credits in 18 blocks
    return expand_granular(table_rows, 1e-4)


@pytest.fixture(scope="session")
def coarse_portfolio(table_rows):
    # 1% cap keeps runs with the per-credit path affordable
    return expand_granular(table_rows, 0.01)
