"""Static per-level schedule and end-to-end evaluation of one chain.

The schedule is precomputed once on representative (mean) states: starting
from the heralded elementary-link state, each level first waits out its
classical-confirmation time (dephasing), then distills if the fidelity has
dropped below the threshold and channel capacity permits, then swaps upward.
The resulting flags and success probabilities feed the count recursion; the
secret-key rate per channel use divides the expected secret bits of a burst
by all of its channel uses, M multiplexed attempts on each of the N
elementary links.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import metrics
from .cascade import CascadeConfig, CertainResetError, run_cascade
from .channel import LinkBudget, MediumProfile, select_wavelength
from .states import (
    BellDiagonal,
    NoiseParams,
    apply_dephasing,
    dejmps,
    initial_state,
    key_fraction,
    swap,
)


class ScheduleError(ValueError):
    """Raised when a requested schedule exceeds the channel capacity."""


@dataclass(frozen=True)
class ProtocolConfig:
    """One chain configuration: medium, link budget, noise, depth, width."""

    medium: MediumProfile
    budget: LinkBudget
    noise: NoiseParams
    n: int
    m: int
    f_th: float = 0.95

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("nesting depth must be non-negative")
        if self.m < 1:
            raise ValueError("multiplexing width must be at least 1")
        if not 0.0 <= self.f_th <= 1.0:
            raise ValueError("fidelity threshold must lie in [0, 1]")


@dataclass(frozen=True)
class LevelStep:
    """Trace entry for one nesting level of the precomputed schedule."""

    level: int
    wait_s: float
    pre_state: BellDiagonal
    distilled: bool
    distill_success: float
    post_state: BellDiagonal

    @property
    def fidelity(self) -> float:
        return self.post_state.fidelity()


@dataclass(frozen=True)
class LevelTrace:
    steps: tuple[LevelStep, ...]

    @property
    def end_state(self) -> BellDiagonal:
        return self.steps[-1].post_state

    @property
    def distill_flags(self) -> tuple[bool, ...]:
        return tuple(s.distilled for s in self.steps)

    @property
    def distill_success(self) -> tuple[float, ...]:
        return tuple(s.distill_success for s in self.steps)


@dataclass(frozen=True)
class PerformancePoint:
    """Evaluated chain outcome for one configuration."""

    skr_pcu: float
    expected_end_pairs: float
    completion_prob: float
    end_state: BellDiagonal
    ops: metrics.OpCounts
    wavelength_used_nm: int
    l0_km: float
    n: int
    m: int
    mass_defect: float = 0.0
    diagnostic: str | None = None


def wait_time(level: int, l0_km: float, velocity_kms: float) -> float:
    """Classical-signaling wait at a level, in seconds.

    Level 0 waits one link length for the midpoint herald; level i waits the
    confirmation time across its 2**i-link span.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    if level == 0:
        return l0_km / velocity_kms
    return (1 << level) * l0_km / velocity_kms


def build_schedule(config: ProtocolConfig) -> LevelTrace:
    """Precompute per-level states, distillation flags and success probs.

    Distillation is scheduled at a level when the arriving fidelity falls
    below ``f_th`` and at least two pairs of capacity remain; the top level
    never distills.
    """
    l0 = config.budget.l0_km
    velocity = config.medium.signal_velocity_kms
    state = initial_state(config.noise.eps_g)
    width = config.m
    steps: list[LevelStep] = []
    for level in range(config.n + 1):
        wait = wait_time(level, l0, velocity)
        state = apply_dephasing(state, wait, config.noise.t2)
        pre = state
        distilled = False
        succ = 1.0
        if (
            level < config.n
            and pre.fidelity() < config.f_th
            and width >= 2
        ):
            distilled = True
            state, succ = dejmps(state, state, config.noise)
            width //= 2
        steps.append(
            LevelStep(
                level=level,
                wait_s=wait,
                pre_state=pre,
                distilled=distilled,
                distill_success=succ,
                post_state=state,
            )
        )
        if level < config.n:
            state = swap(state, state, config.noise)
    return LevelTrace(steps=tuple(steps))


def evaluate_chain(
    config: ProtocolConfig, cost: metrics.CostModel | None = None
) -> PerformancePoint:
    """Full evaluation: wavelength choice, schedule, count recursion, SKR."""
    wavelength, pi0 = select_wavelength(config.medium, config.budget)
    trace = build_schedule(config)
    end_state = trace.end_state
    cost = cost or metrics.CostModel()

    try:
        cascade_config = CascadeConfig(
            n=config.n,
            m=config.m,
            pi0=pi0,
            distill_flags=trace.distill_flags,
            distill_success=trace.distill_success,
        )
        report = run_cascade(cascade_config)
    except CertainResetError as exc:
        return PerformancePoint(
            skr_pcu=0.0,
            expected_end_pairs=0.0,
            completion_prob=0.0,
            end_state=end_state,
            ops=metrics.OpCounts(0.0, 0.0, 0.0, 0.0),
            wavelength_used_nm=wavelength,
            l0_km=config.budget.l0_km,
            n=config.n,
            m=config.m,
            diagnostic=f"certain reset: {exc}",
        )
    except ValueError as exc:
        raise ScheduleError(str(exc)) from exc

    # normalize by all channel uses of the burst: M attempts on each of the
    # N elementary links
    channel_uses = config.m * cascade_config.n_links
    skr = report.expected_end_pairs * key_fraction(end_state) / channel_uses
    ops = metrics.ops_per_burst(report, trace, cascade_config.n_links, cost)
    return PerformancePoint(
        skr_pcu=skr,
        expected_end_pairs=report.expected_end_pairs,
        completion_prob=report.completion_prob,
        end_state=end_state,
        ops=ops,
        wavelength_used_nm=wavelength,
        l0_km=config.budget.l0_km,
        n=config.n,
        m=config.m,
        mass_defect=float(report.mass_defect.max()) if len(report.mass_defect) else 0.0,
    )
