"""Parameter sweeps, depth optimization, figure presets, deterministic CSV.

A sweep walks the Cartesian product of its axes in lexicographic order
(media alphabetical, numeric axes ascending), optimizes the nesting depth at
each grid point, and emits one row per point.  Output is deterministic to
the byte: fixed column order, 17-significant-digit floats, ``\\n`` line
endings, independent of the worker count.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

from . import metrics
from .channel import (
    ConfigurationError,
    LinkBudget,
    MediumProfile,
    conversion_threshold,
    default_media,
)
from .protocol import PerformancePoint, ProtocolConfig, evaluate_chain
from .states import NoiseParams

DEFAULT_N_RANGE = tuple(range(0, 11))


@dataclass(frozen=True)
class SweepSpec:
    """Axes and fixed parameters of one sweep."""

    media: tuple[str, ...] = ("HCF", "SMF")
    total_distance_km: tuple[float, ...] = ()
    conv_eff: tuple[float, ...] = (1.0,)
    eta_hardware: tuple[float, ...] = (1.0,)
    t2_s: tuple[float, ...] = (1.0,)
    eps_g: tuple[float, ...] = (1e-3,)
    f_th: float = 0.95
    m: int = 1024
    n_range: tuple[int, ...] = DEFAULT_N_RANGE
    output_path: str | None = None

    def __post_init__(self) -> None:
        if not self.media:
            raise ConfigurationError("media axis is empty")
        if not self.total_distance_km:
            raise ConfigurationError("total_distance_km axis is empty")
        if any(d <= 0 for d in self.total_distance_km):
            raise ConfigurationError("total distances must be positive")
        if not self.n_range or any(n < 0 or n > 12 for n in self.n_range):
            raise ConfigurationError("n_range entries must lie in [0, 12]")
        for name in ("conv_eff", "eta_hardware", "t2_s", "eps_g"):
            if not getattr(self, name):
                raise ConfigurationError(f"{name} axis is empty")
        object.__setattr__(self, "media", tuple(sorted(set(self.media))))
        for name in ("total_distance_km", "conv_eff", "eta_hardware", "t2_s", "eps_g"):
            vals = tuple(sorted(set(float(v) for v in getattr(self, name))))
            object.__setattr__(self, name, vals)
        object.__setattr__(self, "n_range", tuple(sorted(set(self.n_range))))


@dataclass(frozen=True)
class SweepRow:
    """One optimized grid point; field order fixes the CSV column order."""

    medium: str
    total_distance_km: float
    conv_eff: float
    eta_hardware: float
    t2_s: float
    eps_g: float
    f_th: float
    m: int
    wavelength_used_nm: int
    best_n: int
    best_l0_km: float
    skr_pcu: float
    completion_prob: float
    ops_per_secret_bit: float
    gate_ops_per_burst: float
    measurement_ops_per_burst: float
    mass_defect: float
    conv_eff_threshold: float


def optimize_depth(
    total_distance_km: float,
    medium: MediumProfile,
    conv_eff: float,
    eta_hardware: float,
    t2_s: float,
    eps_g: float,
    f_th: float = 0.95,
    m: int = 1024,
    n_range: tuple[int, ...] = DEFAULT_N_RANGE,
) -> tuple[int, float, PerformancePoint]:
    """Scan nesting depths and keep the SKR argmax; ties keep the smaller n."""
    if not n_range:
        raise ConfigurationError("n_range is empty")
    best: tuple[int, float, PerformancePoint] | None = None
    for n in sorted(n_range):
        l0 = total_distance_km / (1 << n)
        config = ProtocolConfig(
            medium=medium,
            budget=LinkBudget(eta_hardware=eta_hardware, conv_eff=conv_eff, l0_km=l0),
            noise=NoiseParams(eps_g, t2=t2_s),
            n=n,
            m=m,
        )
        point = evaluate_chain(config)
        if best is None or point.skr_pcu > best[2].skr_pcu:
            best = (n, l0, point)
    return best


def _media_table(profiles: dict[str, MediumProfile] | None) -> dict[str, MediumProfile]:
    table = default_media()
    if profiles:
        table.update(profiles)
    return table


def _evaluate_point(
    args: tuple[SweepSpec, MediumProfile, str, float, float, float, float, float],
) -> SweepRow:
    spec, medium, name, dist, conv, eta_hw, t2, eps = args
    best_n, best_l0, point = optimize_depth(
        dist,
        medium,
        conv,
        eta_hw,
        t2,
        eps,
        f_th=spec.f_th,
        m=spec.m,
        n_range=spec.n_range,
    )
    try:
        threshold = conversion_threshold(medium, best_l0)
    except ValueError:
        threshold = math.nan
    return SweepRow(
        medium=name,
        total_distance_km=dist,
        conv_eff=conv,
        eta_hardware=eta_hw,
        t2_s=t2,
        eps_g=eps,
        f_th=spec.f_th,
        m=spec.m,
        wavelength_used_nm=point.wavelength_used_nm,
        best_n=best_n,
        best_l0_km=best_l0,
        skr_pcu=point.skr_pcu,
        completion_prob=point.completion_prob,
        ops_per_secret_bit=metrics.ops_per_secret_bit(point),
        gate_ops_per_burst=point.ops.two_qubit_gates,
        measurement_ops_per_burst=point.ops.measurements,
        mass_defect=point.mass_defect,
        conv_eff_threshold=threshold,
    )


def run_sweep(
    spec: SweepSpec,
    media_profiles: dict[str, MediumProfile] | None = None,
    threads: int = 1,
) -> list[SweepRow]:
    """Evaluate every grid point; writes CSV to ``spec.output_path`` if set."""
    table = _media_table(media_profiles)
    for name in spec.media:
        if name not in table:
            raise ConfigurationError(f"unknown medium {name!r}")
    tasks = [
        (spec, table[name], name, dist, conv, eta_hw, t2, eps)
        for name in spec.media
        for dist in spec.total_distance_km
        for conv in spec.conv_eff
        for eta_hw in spec.eta_hardware
        for t2 in spec.t2_s
        for eps in spec.eps_g
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_evaluate_point, tasks))
    else:
        rows = [_evaluate_point(t) for t in tasks]
    if spec.output_path:
        write_csv(rows, spec.output_path)
    return rows


def _format_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def rows_to_csv(rows: list[SweepRow]) -> str:
    header = ",".join(f.name for f in fields(SweepRow))
    lines = [header]
    for row in rows:
        lines.append(",".join(_format_cell(getattr(row, f.name)) for f in fields(SweepRow)))
    return "\n".join(lines) + "\n"


def write_csv(rows: list[SweepRow], path: str) -> None:
    text = rows_to_csv(rows)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def spec_from_dict(raw: dict) -> SweepSpec:
    """Build a SweepSpec from parsed JSON, rejecting unknown keys."""
    known = {f.name for f in fields(SweepSpec)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown sweep config keys: {sorted(unknown)}")
    kwargs = dict(raw)
    for name in ("media", "total_distance_km", "conv_eff", "eta_hardware",
                 "t2_s", "eps_g", "n_range"):
        if name in kwargs:
            kwargs[name] = tuple(kwargs[name])
    try:
        return SweepSpec(**kwargs)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


def media_from_dict(raw: dict) -> dict[str, MediumProfile]:
    """Parse optional medium-profile overrides from a config mapping."""
    profiles = {}
    for name, entry in raw.items():
        att = {int(k): float(v) for k, v in entry["att_length_km"].items()}
        profiles[name] = MediumProfile(
            name=name,
            att_length_km=att,
            coupling_mem_fiber=float(entry["coupling_mem_fiber"]),
            signal_velocity_kms=float(
                entry.get("signal_velocity_kms", 2.0e5)
            ),
        )
    return profiles


def load_config(path: str) -> tuple[SweepSpec, dict[str, MediumProfile]]:
    """Read a sweep config file: SweepSpec keys plus optional media_profiles."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("sweep config must be a JSON object")
    media_raw = raw.pop("media_profiles", {})
    profiles = media_from_dict(media_raw) if media_raw else {}
    return spec_from_dict(raw), profiles


def resolve_threads(cli_value: int | None) -> int:
    """Worker count: explicit flag wins, then the THREADS variable, then 1."""
    if cli_value is not None:
        return max(1, cli_value)
    env = os.environ.get("THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigurationError(f"bad THREADS value {env!r}") from exc
    return 1


_DISTANCES = tuple(float(d) for d in range(100, 1001, 100))


def figure_preset(name: str) -> SweepSpec:
    """Hard-coded sweep grids matching the published comparison figures."""
    presets = {
        # wavelength-choice boundary: single links, fine spacing grid
        "fig3": SweepSpec(
            media=("HCF", "SMF"),
            total_distance_km=tuple(float(x) for x in range(1, 101)),
            conv_eff=(0.3, 0.5, 0.7, 0.9, 1.0),
            eps_g=(1e-3,),
            n_range=(0,),
        ),
        # SKR ratio over distance x conversion efficiency
        "fig5": SweepSpec(
            media=("HCF", "SMF"),
            total_distance_km=_DISTANCES,
            conv_eff=(0.3, 0.5, 0.7, 1.0),
            eps_g=(1e-4, 1e-3),
        ),
        # SKR ratio over distance x hardware efficiency at conv_eff 0.5
        "fig6": SweepSpec(
            media=("HCF", "SMF"),
            total_distance_km=_DISTANCES,
            conv_eff=(0.5,),
            eta_hardware=(0.1, 0.2, 0.4, 0.6, 0.8, 1.0),
            eps_g=(1e-4, 1e-3),
        ),
        # operations per delivered key on the fig5 grid
        "fig7": SweepSpec(
            media=("HCF", "SMF"),
            total_distance_km=_DISTANCES,
            conv_eff=(0.3, 0.5, 0.7, 1.0),
            eps_g=(1e-4, 1e-3),
        ),
        # optimal spacing vs distance for both conversion rows
        "fig8": SweepSpec(
            media=("HCF", "SMF"),
            total_distance_km=_DISTANCES,
            conv_eff=(0.5, 1.0),
            eps_g=(1e-4, 1e-3, 1e-2),
        ),
        # SKR vs distance with memory-quality sweep
        "skr_curves": SweepSpec(
            media=("HCF", "SMF"),
            total_distance_km=tuple(float(d) for d in range(50, 1001, 50)),
            conv_eff=(0.5, 1.0),
            t2_s=(0.01, 0.1, 1.0),
            eps_g=(1e-4, 1e-3, 1e-2),
        ),
    }
    try:
        return presets[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown figure preset {name!r}; choose from {sorted(presets)}"
        ) from None
