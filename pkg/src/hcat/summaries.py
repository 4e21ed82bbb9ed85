"""Small numeric aggregation helpers shared by the null-model reports."""

from __future__ import annotations

import warnings

import numpy as np


def nan_mean_std_exact(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """nanmean / nanstd (ddof=1) over axis 0, exact on constant cells.

    When every replicate agrees on a cell, its mean is that value by
    definition and its spread is zero; computing them by summation
    instead would leak rounding noise into identity baselines, which
    are required to reproduce the observed values exactly.
    """
    samples = np.asarray(samples, dtype=np.float64)
    with warnings.catch_warnings():
        # all-NaN cells legitimately yield NaN mean/std
        warnings.simplefilter("ignore", RuntimeWarning)
        mean = np.nanmean(samples, axis=0)
        std = np.nanstd(samples, axis=0, ddof=1)
    first = samples[0]
    all_equal = np.ones_like(first, dtype=bool)
    for i in range(samples.shape[0]):
        cell = samples[i]
        all_equal &= (cell == first) | (np.isnan(cell) & np.isnan(first))
    constant = all_equal & ~np.isnan(first)
    mean = np.where(constant, first, mean)
    std = np.where(constant, 0.0, std)
    # preserve NaN for all-NaN cells
    mean = np.where(all_equal & np.isnan(first), np.nan, mean)
    std = np.where(all_equal & np.isnan(first), np.nan, std)
    return mean, std


def spawn_seeds(master_seed: int, count: int) -> list:
    """Independent derived integer seeds, stable across platforms."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]
