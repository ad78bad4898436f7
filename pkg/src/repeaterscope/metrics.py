"""Operational cost accounting and ratio helpers for medium comparisons.

Costs count the expected repeater operations actually performed in a burst:
each swap is one Bell measurement worth of gates, each distillation attempt
consumes a pair of two-qubit gates plus its herald measurements.  Level
totals are weighted by the probability that the burst is still running when
the level executes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .cascade import CascadeReport, pair_minimum

if TYPE_CHECKING:  # pragma: no cover
    from .protocol import LevelTrace, PerformancePoint


@dataclass(frozen=True)
class CostModel:
    """Gate and measurement counts charged per operation type."""

    swap_gates: int = 1
    swap_measurements: int = 2
    distill_gates: int = 2
    distill_measurements: int = 2

    def __post_init__(self) -> None:
        if min(
            self.swap_gates,
            self.swap_measurements,
            self.distill_gates,
            self.distill_measurements,
        ) < 0:
            raise ValueError("operation costs must be non-negative")


@dataclass(frozen=True)
class OpCounts:
    """Expected per-burst operation totals."""

    swaps: float
    distill_attempts: float
    two_qubit_gates: float
    measurements: float


def ops_per_burst(
    report: CascadeReport,
    trace: "LevelTrace",
    n_links: int,
    cost: CostModel | None = None,
) -> OpCounts:
    """Expected swap and distillation operations in one burst.

    At level i the chain holds ``n_links / 2**i`` segments; a scheduled
    distillation runs E[floor(k/2)] attempts per segment and every pairing
    performs min(left, right) swaps.  Each level is weighted by the
    probability that no segment has run dry before it executes.
    """
    cost = cost or CostModel()
    flags = trace.distill_flags
    n = report.config.n
    running = (1.0 - report.r[0]) ** n_links

    swaps = 0.0
    distills = 0.0
    for level in range(n + 1):
        segments = max(n_links >> level, 1)
        if flags[level]:
            distills += running * segments * report.p_cond[level].mean_floor_half()
        if level < n:
            merged = pair_minimum(report.q_cond[level])
            swaps += running * (segments // 2) * merged.mean()
            zero = float(report.q_cond[level].probs[0])
            running *= ((1.0 - zero) ** 2) ** (segments // 2)
    return OpCounts(
        swaps=swaps,
        distill_attempts=distills,
        two_qubit_gates=swaps * cost.swap_gates + distills * cost.distill_gates,
        measurements=swaps * cost.swap_measurements
        + distills * cost.distill_measurements,
    )


def ops_per_secret_bit(point: "PerformancePoint") -> float:
    """Two-qubit gates spent per delivered secret bit; inf in no-key regimes."""
    secret_bits = point.skr_pcu * point.m * (1 << point.n)
    if secret_bits <= 0.0:
        return math.inf
    return point.ops.two_qubit_gates / secret_bits


def ratio_grid(numer: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """Elementwise ratio with sentinel handling for zero denominators.

    A zero denominator with positive numerator maps to +inf (the saturated
    top bin); zero over zero maps to NaN (rendered blank).
    """
    a = np.asarray(numer, dtype=np.float64)
    b = np.asarray(denom, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"grid shapes differ: {a.shape} vs {b.shape}")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a / b
    out = np.where((b == 0.0) & (a > 0.0), np.inf, out)
    out = np.where((b == 0.0) & (a == 0.0), np.nan, out)
    return out
