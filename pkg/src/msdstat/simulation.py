"""Seeded Monte Carlo experiments: critical values, power, and guidelines.

Replicates are partitioned into fixed blocks of 4096. Each block draws
from its own counter-based stream derived from (seed, block index), and
grid experiments key streams by (grid point, block). Results therefore
depend only on the configuration, never on scheduling or worker count,
and any block can be recomputed in isolation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .statistic import pwch_values, qe_values

__all__ = [
    "BLOCK",
    "SimConfig",
    "PowerCurve",
    "QuantileEstimate",
    "HeteroStudy",
    "simulate_multi_quantiles",
    "simulate_power",
    "simulate_resistance",
    "simulate_hetero_guideline",
    "calibrate_pwch_quantile",
]

BLOCK = 4096

_STATISTICS = {"msd": qe_values, "pwch": pwch_values}


@dataclass(frozen=True)
class SimConfig:
    """Common run parameters; equal configs give bit-identical results."""

    n: int
    replicates: int
    seed: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 3):
            raise DataError(f"n must be an integer >= 3, got {self.n!r}")
        if not (isinstance(self.replicates, int) and self.replicates >= 1):
            raise DataError(
                f"replicates must be a positive integer, got {self.replicates!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise DataError(f"seed must be a 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class QuantileEstimate:
    """One empirical quantile with an order-statistic bracket error."""

    p: float
    value: float
    std_error: float


@dataclass(frozen=True)
class PowerCurve:
    """Detection proportions along a displacement / contamination grid."""

    statistic: str
    grid: np.ndarray
    proportion: np.ndarray
    std_error: np.ndarray
    critical: float
    n: int
    replicates: int
    seed: int

    def __post_init__(self):
        if np.any(self.proportion < 0.0) or np.any(self.proportion > 1.0):
            raise DataError("proportions must lie in [0, 1]")


@dataclass(frozen=True)
class HeteroStudy:
    """Rule-of-thumb exceedance rates under chi-squared(3) variances."""

    sizes: tuple[int, ...]
    value_rate: np.ndarray      # share of individual statistics above 2.0
    value_se: np.ndarray
    dataset_rate: np.ndarray    # share of datasets with any statistic above 2.5
    dataset_se: np.ndarray
    replicates: int
    seed: int


def _stream(seed: int, key: tuple[int, ...]) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _blocks(replicates: int):
    full, rem = divmod(replicates, BLOCK)
    for b in range(full):
        yield b, BLOCK
    if rem:
        yield full, rem


def _validate_stat(statistic: str):
    if statistic not in _STATISTICS:
        raise DataError(
            f"statistic must be one of {sorted(_STATISTICS)}, got {statistic!r}")
    return _STATISTICS[statistic]


def _quantile_floor(replicates: int):
    if replicates < 1000:
        raise DataError(
            f"replicates={replicates} is too few for quantile estimation; "
            "need at least 1000")


def _bracket_se(sorted_vals: np.ndarray, p: float) -> float:
    # one-sigma order-statistic bracket around the p-th sample quantile
    r = sorted_vals.size
    half = math.sqrt(p * (1.0 - p) / r)
    lo = int(np.clip(round(r * (p - half)), 0, r - 1))
    hi = int(np.clip(round(r * (p + half)), 0, r - 1))
    return 0.5 * float(sorted_vals[hi] - sorted_vals[lo])


def _dataset_maxima_block(seed: int, n: int, block: int, count: int) -> np.ndarray:
    rng = _stream(seed, (block,))
    z = rng.standard_normal((count, n))
    return qe_values(z, np.ones(n)).max(axis=1)


def simulate_multi_quantiles(n: int, ps, replicates: int,
                             seed: int) -> tuple[QuantileEstimate, ...]:
    """Empirical quantiles of the per-dataset maximum statistic under IID data.

    One row of the multiple-observation critical value table: a proportion
    p of null datasets contain no statistic above the returned values.
    """
    cfg = SimConfig(n, replicates, seed)
    _quantile_floor(replicates)
    ps = [float(p) for p in ps]
    if any(not 0.0 < p < 1.0 for p in ps):
        raise DataError("quantile levels must lie strictly inside (0, 1)")
    maxima = np.concatenate([
        _dataset_maxima_block(cfg.seed, cfg.n, b, c)
        for b, c in _blocks(cfg.replicates)])
    maxima.sort()
    out = []
    for p in ps:
        val = float(np.quantile(maxima, p, method="linear"))
        out.append(QuantileEstimate(p, val, _bracket_se(maxima, p)))
    return tuple(out)


def _grid_exceedance(statistic: str, n: int, grid, replicates: int, seed: int,
                     critical: float, contaminated_index: int) -> PowerCurve:
    stat_fn = _validate_stat(statistic)
    cfg = SimConfig(n, replicates, seed)
    if not (math.isfinite(critical) and critical > 0):
        raise DataError(f"critical value must be positive, got {critical}")
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise DataError("displacement grid must be non-empty and finite")
    if contaminated_index >= n:
        raise DataError(f"dataset size {n} has no index {contaminated_index}")
    u = np.ones(n)
    counts = np.zeros(grid.size, dtype=np.int64)
    for j, delta in enumerate(grid):
        for b, c in _blocks(cfg.replicates):
            rng = _stream(cfg.seed, (j, b))
            z = rng.standard_normal((c, n))
            z[:, contaminated_index] += delta
            subject = stat_fn(z, u)[:, 0]
            counts[j] += int((subject > critical).sum())
    prop = counts / cfg.replicates
    se = np.sqrt(prop * (1.0 - prop) / cfg.replicates)
    return PowerCurve(statistic, grid, prop, se, float(critical),
                      cfg.n, cfg.replicates, cfg.seed)


def simulate_power(statistic: str, n: int, grid, replicates: int, seed: int,
                   critical: float) -> PowerCurve:
    """Detection rate for a subject point displaced along the grid.

    All other points are standard normal; the subject's statistic is
    compared against the supplied critical value.
    """
    return _grid_exceedance(statistic, n, grid, replicates, seed, critical,
                            contaminated_index=0)


def simulate_resistance(statistic: str, n: int, grid, replicates: int,
                        seed: int, critical: float) -> PowerCurve:
    """False-positive rate for a null subject while another point wanders.

    The subject stays at its null location; a second point is moved along
    the grid. A resistant statistic keeps the subject's exceedance rate
    near its nominal level no matter where the contaminant sits.
    """
    return _grid_exceedance(statistic, n, grid, replicates, seed, critical,
                            contaminated_index=1)


def simulate_hetero_guideline(sizes, replicates: int, seed: int) -> HeteroStudy:
    """Exceedance rates when each observation's variance is chi-squared(3).

    For each dataset size, draws datasets with per-observation standard
    deviations sqrt(V), V a sum of three squared standard normals, and
    evaluates the screening thresholds: how often an individual statistic
    exceeds 2.0, and how often a dataset contains any value above 2.5.
    """
    sizes = tuple(int(n) for n in sizes)
    if not sizes:
        raise DataError("need at least one dataset size")
    for n in sizes:
        if not 5 <= n <= 25:
            raise DataError(f"guideline study covers sizes 5..25, got {n}")
    if not (isinstance(replicates, int) and replicates >= 1):
        raise DataError(
            f"replicates must be a positive integer, got {replicates!r}")
    value_rate = np.empty(len(sizes))
    value_se = np.empty(len(sizes))
    dataset_rate = np.empty(len(sizes))
    dataset_se = np.empty(len(sizes))
    for j, n in enumerate(sizes):
        value_hits = 0
        dataset_hits = 0
        for b, c in _blocks(replicates):
            rng = _stream(seed, (j, b))
            z3 = rng.standard_normal((c, n, 3))
            v = (z3 * z3).sum(axis=-1)
            u = np.sqrt(v)
            z = rng.standard_normal((c, n))
            x = u * z
            qe = qe_values(x, u)
            value_hits += int((qe > 2.0).sum())
            dataset_hits += int((qe > 2.5).any(axis=1).sum())
        value_rate[j] = value_hits / (replicates * n)
        value_se[j] = math.sqrt(value_rate[j] * (1 - value_rate[j])
                                / (replicates * n))
        dataset_rate[j] = dataset_hits / replicates
        dataset_se[j] = math.sqrt(dataset_rate[j] * (1 - dataset_rate[j])
                                  / replicates)
    return HeteroStudy(sizes, value_rate, value_se, dataset_rate, dataset_se,
                       replicates, seed)


def calibrate_pwch_quantile(n: int, p: float, replicates: int,
                            seed: int) -> float:
    """Self-calibrated critical value for the mean-of-squares comparator.

    Pools every observation's comparator value across replicates of an
    all-null study and returns the empirical p-quantile of the pool.
    """
    cfg = SimConfig(n, replicates, seed)
    _quantile_floor(replicates)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DataError(f"quantile level must lie strictly inside (0, 1), got {p}")
    u = np.ones(n)
    pool = np.concatenate([
        pwch_values(_stream(cfg.seed, (b,)).standard_normal((c, n)), u).ravel()
        for b, c in _blocks(cfg.replicates)])
    return float(np.quantile(pool, p, method="linear"))
