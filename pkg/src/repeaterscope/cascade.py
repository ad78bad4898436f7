"""Exact evolution of multiplexed Bell-pair-count distributions.

A burst starts with a binomial number of pairs on each elementary link.
Ascending the swapping hierarchy, an optional distillation step thins the
count of each segment, and pairing two adjacent segments keeps the minimum
of their counts.  Two tracks are maintained: the unconditional distributions
``p``/``q`` and the conditional track ``p_cond``/``q_cond`` which, at each
level, conditions on at least one pair surviving per segment.

The per-level reset probabilities follow the termination bookkeeping in
which a pairing of counts (0, 1) at a distilling level is excluded from the
reset event, and levels without scheduled distillation never reset.  The
pairing mass that this bookkeeping drops (instead of counting it as reset)
is renormalized away and reported per level in ``mass_defect``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

_MASS_TOL = 1e-10


def _flush_subnormal(p: float) -> float:
    # log-space binomials overflow or lose the tail on subnormal inputs
    return p if p == 0.0 or abs(p) >= sys.float_info.min else 0.0


def _binomial_row(n: int, p: float) -> np.ndarray:
    """Binomial(n, p) pmf over k = 0..n, evaluated in log space."""
    p = _flush_subnormal(p)
    if p == 0.0:
        row = np.zeros(n + 1)
        row[0] = 1.0
        return row
    if p == 1.0:
        row = np.zeros(n + 1)
        row[n] = 1.0
        return row
    k = np.arange(n + 1)
    log_comb = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    row = np.exp(log_comb + k * np.log(p) + (n - k) * np.log1p(-p))
    return row / row.sum()


@lru_cache(maxsize=128)
def _thinning_table(mmax: int, cap: int, d: float) -> np.ndarray:
    """Rows m = 0..mmax of the Binomial(m, d) pmf over k = 0..cap.

    Built by the Pascal recurrence, which only ever forms convex
    combinations and is therefore exact to rounding.
    """
    table = np.zeros((mmax + 1, cap + 1))
    table[0, 0] = 1.0
    for m in range(mmax):
        row = table[m]
        table[m + 1, : cap + 1] = (1.0 - d) * row
        table[m + 1, 1 : cap + 1] += d * row[:cap]
    table.flags.writeable = False
    return table


class CertainResetError(RuntimeError):
    """Raised when the chain resets with probability one."""


@dataclass(frozen=True)
class PairCountDistribution:
    """Probability vector over pair counts k = 0 .. len(probs) - 1."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("probs must be a non-empty 1-D vector")
        if np.any(arr < 0.0):
            raise ValueError("probabilities must be non-negative")
        if abs(arr.sum() - 1.0) > _MASS_TOL:
            raise ValueError(f"probabilities must sum to 1, got {arr.sum()!r}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)

    def __len__(self) -> int:
        return len(self.probs)

    def mean(self) -> float:
        return float(np.arange(len(self.probs)) @ self.probs)

    def mean_floor_half(self) -> float:
        """Expected number of disjoint pairs, E[floor(k / 2)]."""
        return float((np.arange(len(self.probs)) // 2) @ self.probs)


def delta_distribution(k: int, width: int | None = None) -> PairCountDistribution:
    size = (width if width is not None else k) + 1
    probs = np.zeros(size)
    probs[k] = 1.0
    return PairCountDistribution(probs)


@dataclass(frozen=True)
class CascadeConfig:
    """Static inputs of one burst evaluation.

    ``distill_flags[i]`` schedules a distillation at nesting level i (the
    top level must be False); ``distill_success[i]`` is the per-attempt
    success probability used when scheduled.  ``m`` is the multiplexing
    width and ``pi0`` the elementary success probability.
    """

    n: int
    m: int
    pi0: float
    distill_flags: tuple[bool, ...] = ()
    distill_success: tuple[float, ...] = ()
    reset_threshold: int = 1

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("nesting depth must be non-negative")
        if self.m < 1:
            raise ValueError("multiplexing width must be at least 1")
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValueError(f"pi0 must lie in [0, 1], got {self.pi0}")
        if self.reset_threshold < 1:
            raise ValueError("reset threshold must be at least 1")
        flags = tuple(bool(f) for f in self.distill_flags)
        if not flags:
            flags = (False,) * (self.n + 1)
        if len(flags) != self.n + 1:
            raise ValueError("distill_flags must have one entry per level 0..n")
        if flags[self.n]:
            raise ValueError("no distillation is allowed at the top level")
        succ = tuple(float(d) for d in self.distill_success)
        if not succ:
            succ = (1.0,) * (self.n + 1)
        if len(succ) == self.n:  # tolerate omitting the unused top entry
            succ = succ + (1.0,)
        if len(succ) != self.n + 1:
            raise ValueError("distill_success must have one entry per level 0..n")
        if any(not 0.0 <= d <= 1.0 for d in succ):
            raise ValueError("distillation success probabilities must lie in [0, 1]")
        for i, flag in enumerate(flags):
            if flag and self.level_width_for(self.m, flags, i) < 2:
                raise ValueError(
                    f"level {i} schedules distillation but has width < 2; "
                    "increase m or drop the flag"
                )
        object.__setattr__(self, "distill_flags", flags)
        object.__setattr__(self, "distill_success", succ)

    @staticmethod
    def level_width_for(m: int, flags: tuple[bool, ...], level: int) -> int:
        return m // (1 << sum(flags[:level]))

    def level_width(self, level: int) -> int:
        """Channel capacity M_i available at a level, halved per prior distillation."""
        return self.level_width_for(self.m, self.distill_flags, level)

    @property
    def n_links(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class CascadeReport:
    """Everything the recursion produces for one configuration.

    ``completion_prob`` is the product of per-level no-reset factors
    ``(1 - r_i) ** (N / 2**i)``; together with the reset probabilities ``f``
    it sums to one.  ``mass_defect[i]`` is the pairing mass at level i that
    the termination bookkeeping neither kept nor counted as reset, removed
    by renormalization (zero whenever no distillation ran below).
    """

    config: CascadeConfig
    p: tuple[PairCountDistribution, ...]
    q: tuple[PairCountDistribution, ...]
    p_cond: tuple[PairCountDistribution, ...]
    q_cond: tuple[PairCountDistribution, ...]
    r: np.ndarray
    f: np.ndarray
    completion_prob: float
    expected_end_pairs: float
    mass_defect: np.ndarray

    @property
    def end_distribution(self) -> PairCountDistribution:
        return self.p_cond[-1]


def generation_distribution(m: int, pi0: float) -> PairCountDistribution:
    """Binomial(m, pi0) count of simultaneous elementary-link successes."""
    if m < 1:
        raise ValueError("multiplexing width must be at least 1")
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError(f"pi0 must lie in [0, 1], got {pi0}")
    return PairCountDistribution(_binomial_row(m, pi0))


def distillation_thinning(
    dist: PairCountDistribution, d: float, cap: int
) -> PairCountDistribution:
    """Thin a count distribution through one round of pairwise distillation.

    k input pairs form floor(k/2) disjoint attempts, each surviving with
    probability ``d``; an odd leftover pair is consumed.  ``cap`` is the
    output support bound floor(M_i / 2).
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"d must lie in [0, 1], got {d}")
    d = _flush_subnormal(d)
    probs = dist.probs
    mmax = (len(probs) - 1) // 2
    if cap < mmax:
        raise ValueError(f"cap {cap} cannot hold up to {mmax} distilled pairs")
    # group j in {2m, 2m+1}: both feed floor(j/2) = m attempts
    grouped = np.zeros(mmax + 1)
    grouped += probs[0::2][: mmax + 1]
    odd = probs[1::2]
    grouped[: len(odd)] += odd
    out = grouped @ _thinning_table(mmax, cap, d)
    return PairCountDistribution(out / out.sum())


def pair_minimum(dist: PairCountDistribution) -> PairCountDistribution:
    """Distribution of min(K1, K2) for two i.i.d. segment counts."""
    q = dist.probs
    cum = np.cumsum(q)
    tail = cum[-1] - cum  # sum_{j > k} q_j
    out = q * q + 2.0 * q * tail
    return PairCountDistribution(out / out.sum())


def conditional_init(
    m: int, pi0: float, reset_threshold: int = 1
) -> tuple[float, PairCountDistribution]:
    """Generation reset probability and the conditioned count distribution.

    ``r0`` is the probability that a single link produces fewer than
    ``reset_threshold`` pairs; the returned distribution is the binomial
    conditioned on clearing the threshold.
    """
    if reset_threshold < 1:
        raise ValueError("reset threshold must be at least 1")
    pmf = _binomial_row(m, pi0)
    r0 = float(pmf[:reset_threshold].sum())
    kept = pmf.copy()
    kept[:reset_threshold] = 0.0
    total = kept.sum()
    if total <= 0.0:
        raise CertainResetError(
            f"generation cannot reach the threshold {reset_threshold} "
            f"(m={m}, pi0={pi0})"
        )
    return r0, PairCountDistribution(kept / total)


def conditional_level_update(
    q_prev: PairCountDistribution, distill_scheduled: bool
) -> tuple[float, PairCountDistribution, float]:
    """One level of the conditional track: pairing, reset, renormalization.

    Returns ``(r_i, p_cond_i, defect)``.  The reset probability counts the
    pairings (0, 0) and (0, >=2) and only when a distillation is scheduled
    at the destination level; the (0, 1) pairing mass and, at non-distilling
    levels, all zero-pairing mass is removed by renormalization and returned
    as ``defect``.
    """
    q = q_prev.probs
    cum = np.cumsum(q)
    tail = cum[-1] - cum
    paired = q * q + 2.0 * q * tail

    if distill_scheduled:
        q1 = q[1] if len(q) > 1 else 0.0
        r_i = float(q[0] * q[0] + 2.0 * q[0] * (tail[0] - q1))
    else:
        r_i = 0.0

    survivor = 1.0 - r_i
    if survivor <= 0.0:
        raise CertainResetError("reset occurs with probability one")
    kept = paired.copy()
    kept[0] = 0.0
    scaled_total = kept.sum() / survivor
    if scaled_total <= 0.0:
        raise CertainResetError("no pairing outcome keeps at least one pair")
    defect = max(1.0 - scaled_total, 0.0)
    return r_i, PairCountDistribution(kept / kept.sum()), defect


def reset_probability_f(r: np.ndarray, n_links: int) -> tuple[np.ndarray, float]:
    """Per-level burst reset probabilities and the completion probability.

    Level i holds ``n_links / 2**i`` independent segments, each surviving
    with probability ``1 - r[i]``; the returned vector and the completion
    probability sum to one exactly.
    """
    r = np.asarray(r, dtype=np.float64)
    if np.any((r < 0.0) | (r > 1.0)):
        raise ValueError("reset probabilities must lie in [0, 1]")
    f = np.zeros_like(r)
    carried = 1.0
    for i, ri in enumerate(r):
        segments = max(n_links >> i, 1)
        survive = (1.0 - ri) ** segments
        f[i] = carried * (1.0 - survive)
        carried *= survive
    return f, carried


def run_cascade(config: CascadeConfig) -> CascadeReport:
    """Evaluate both distribution tracks for one burst configuration."""
    n = config.n
    flags = config.distill_flags
    dsucc = config.distill_success

    # unconditional track
    p = [generation_distribution(config.m, config.pi0)]
    q: list[PairCountDistribution] = []
    for i in range(n + 1):
        if flags[i]:
            cap = config.level_width(i) // 2
            q.append(distillation_thinning(p[i], dsucc[i], cap))
        else:
            q.append(p[i])
        if i < n:
            p.append(pair_minimum(q[i]))

    # conditional track
    r0, cond = conditional_init(config.m, config.pi0, config.reset_threshold)
    p_cond = [cond]
    q_cond: list[PairCountDistribution] = []
    r = [r0]
    defects = [0.0]
    for i in range(n + 1):
        if flags[i]:
            cap = config.level_width(i) // 2
            q_cond.append(distillation_thinning(p_cond[i], dsucc[i], cap))
        else:
            q_cond.append(p_cond[i])
        if i < n:
            ri, nxt, defect = conditional_level_update(q_cond[i], flags[i + 1])
            r.append(ri)
            defects.append(defect)
            p_cond.append(nxt)

    r_arr = np.asarray(r)
    f, completion = reset_probability_f(r_arr, config.n_links)
    expected_end = completion * p_cond[n].mean()
    return CascadeReport(
        config=config,
        p=tuple(p),
        q=tuple(q),
        p_cond=tuple(p_cond),
        q_cond=tuple(q_cond),
        r=r_arr,
        f=f,
        completion_prob=float(completion),
        expected_end_pairs=float(expected_end),
        mass_defect=np.asarray(defects),
    )
