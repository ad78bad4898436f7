"""Command-line interface.

Subcommands: ``link`` (elementary-link budget numbers), ``couple`` (facet
coupling vs tilt angle), ``chain`` (one end-to-end evaluation), ``sweep``
(grid sweep from a JSON config) and ``figure`` (named preset sweeps).

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import coupling, metrics, sweep
from .channel import (
    ConfigurationError,
    LinkBudget,
    UnsupportedWavelengthError,
    conversion_threshold,
    default_media,
    elementary_success,
    select_wavelength,
)
from .coupling import QuadratureError, SolverError
from .protocol import ProtocolConfig, build_schedule, evaluate_chain
from .states import NoiseParams, key_fraction

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _medium(name: str):
    media = default_media()
    key = name.upper()
    if key not in media:
        raise ConfigurationError(f"unknown medium {name!r}; choose from {sorted(media)}")
    return media[key]


def _emit(payload: dict, fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=2, default=float) + "\n"
    else:
        # nested structures (trace, oracle) only fit the json format
        keys = [k for k, v in payload.items() if not isinstance(v, (dict, list))]
        text = ",".join(keys) + "\n"
        text += ",".join(_cell(payload[k]) for k in keys) + "\n"
    _write(text, out)


def _cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_link(args: argparse.Namespace) -> None:
    medium = _medium(args.medium)
    budget = LinkBudget(
        eta_hardware=args.eta_hardware, conv_eff=args.conv_eff, l0_km=args.l0
    )
    wavelength, pi0 = select_wavelength(medium, budget)
    payload = {
        "medium": medium.name,
        "l0_km": budget.l0_km,
        "eta_hardware": budget.eta_hardware,
        "conv_eff": budget.conv_eff,
        "wavelength_nm": wavelength,
        "pi0": pi0,
    }
    for wl in sorted(medium.allowed_wavelengths):
        payload[f"pi0_{wl}nm"] = elementary_success(medium, budget, wl)
    try:
        payload["conv_eff_threshold"] = conversion_threshold(medium, budget.l0_km)
    except UnsupportedWavelengthError:
        payload["conv_eff_threshold"] = math.nan
    _emit(payload, args.format, args.out)


def _cmd_couple(args: argparse.Namespace) -> None:
    fiber = coupling.near_cutoff_smf(args.wavelength)
    mode = coupling.fiber_mode(fiber, args.wavelength)
    w_opt, _ = coupling.optimize_waist(fiber, mode)
    beam = coupling.GaussianBeam(waist_um=w_opt, wavelength_nm=args.wavelength)
    thetas = np.linspace(0.0, args.theta_max, args.points)
    lines = ["theta_rad,eta_smf_1550,eta_constants_hcf"]
    facet = coupling.facet_transmission(fiber)
    for theta in thetas:
        eta_smf = coupling.tilted_eta(beam, fiber, mode, float(theta)) * facet
        eta_hcf = coupling.effective_coupling("HCF", float(theta))
        lines.append(
            f"{format(float(theta), '.17g')},{format(eta_smf, '.17g')},"
            f"{format(eta_hcf, '.17g')}"
        )
    _write("\n".join(lines) + "\n", args.out)


def _chain_payload(args: argparse.Namespace) -> dict:
    medium = _medium(args.medium)
    config = ProtocolConfig(
        medium=medium,
        budget=LinkBudget(
            eta_hardware=args.eta_hardware, conv_eff=args.conv_eff, l0_km=args.l0
        ),
        noise=NoiseParams(args.eps_g, t2=args.t2),
        n=args.n,
        m=args.m,
        f_th=args.f_th,
    )
    point = evaluate_chain(config)
    payload = {
        "medium": medium.name,
        "n": point.n,
        "m": point.m,
        "l0_km": point.l0_km,
        "total_distance_km": point.l0_km * (1 << point.n),
        "wavelength_used_nm": point.wavelength_used_nm,
        "skr_pcu": point.skr_pcu,
        "expected_end_pairs": point.expected_end_pairs,
        "completion_prob": point.completion_prob,
        "end_fidelity": point.end_state.fidelity(),
        "key_fraction": key_fraction(point.end_state),
        "ops_per_secret_bit": metrics.ops_per_secret_bit(point),
        "two_qubit_gates_per_burst": point.ops.two_qubit_gates,
        "measurements_per_burst": point.ops.measurements,
        "mass_defect": point.mass_defect,
    }
    if point.diagnostic:
        payload["diagnostic"] = point.diagnostic
    if args.trace:
        trace = build_schedule(config)
        payload["trace"] = [
            {
                "level": step.level,
                "wait_s": step.wait_s,
                "pre_fidelity": step.pre_state.fidelity(),
                "distilled": step.distilled,
                "distill_success": step.distill_success,
                "post_fidelity": step.fidelity,
            }
            for step in trace.steps
        ]
    if args.oracle:
        from .cascade import CascadeConfig
        from .oracle import MonteCarloConfig, mc_cascade
        from .channel import select_wavelength as _select

        _, pi0 = _select(medium, config.budget)
        trace = build_schedule(config)
        cc = CascadeConfig(
            n=config.n,
            m=config.m,
            pi0=pi0,
            distill_flags=trace.distill_flags,
            distill_success=trace.distill_success,
        )
        mc = mc_cascade(cc, MonteCarloConfig(trials=args.trials, seed=args.seed))
        comp, comp_se = mc.completion_estimate()
        payload["oracle"] = {
            "trials": args.trials,
            "seed": args.seed,
            "completion": comp,
            "completion_stderr": comp_se,
            "clean_fraction": mc.clean_trials / mc.trials,
        }
    return payload


def _cmd_chain(args: argparse.Namespace) -> None:
    _emit(_chain_payload(args), args.format, args.out)


def _rows_out(rows, fmt: str, out: str | None) -> None:
    if fmt == "json":
        payload = [dataclasses.asdict(r) for r in rows]
        _write(json.dumps(payload, indent=2, default=float) + "\n", out)
    else:
        _write(sweep.rows_to_csv(rows), out)


def _cmd_sweep(args: argparse.Namespace) -> None:
    spec, profiles = sweep.load_config(args.config)
    threads = sweep.resolve_threads(args.threads)
    rows = sweep.run_sweep(
        dataclasses.replace(spec, output_path=None), profiles, threads=threads
    )
    _rows_out(rows, args.format, args.out or spec.output_path)


def _cmd_figure(args: argparse.Namespace) -> None:
    spec = sweep.figure_preset(args.name)
    threads = sweep.resolve_threads(args.threads)
    rows = sweep.run_sweep(spec, threads=threads)
    _rows_out(rows, args.format, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repeaterscope",
        description="Repeater-chain rate models over silica and hollow-core fiber",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    link = sub.add_parser("link", help="elementary-link budget for one spacing")
    link.add_argument("--medium", default="HCF")
    link.add_argument("--l0", type=float, default=20.0, help="spacing in km")
    link.add_argument("--conv-eff", type=float, default=0.5, dest="conv_eff")
    link.add_argument("--eta-hardware", type=float, default=1.0, dest="eta_hardware")
    link.add_argument("--format", choices=("json", "csv"), default="json")
    link.add_argument("--out")
    link.set_defaults(func=_cmd_link)

    couple = sub.add_parser("couple", help="facet coupling vs tilt angle (CSV)")
    couple.add_argument("--wavelength", type=float, default=1550.0)
    couple.add_argument("--theta-max", type=float, default=0.05, dest="theta_max")
    couple.add_argument("--points", type=int, default=26)
    couple.add_argument("--out")
    couple.set_defaults(func=_cmd_couple)

    chain = sub.add_parser("chain", help="evaluate one chain configuration")
    chain.add_argument("--medium", default="HCF")
    chain.add_argument("--l0", type=float, default=20.0)
    chain.add_argument("--n", type=int, default=2)
    chain.add_argument("--m", type=int, default=1024)
    chain.add_argument("--eps-g", type=float, default=1e-3, dest="eps_g")
    chain.add_argument("--t2", type=float, default=1.0)
    chain.add_argument("--conv-eff", type=float, default=0.5, dest="conv_eff")
    chain.add_argument("--eta-hardware", type=float, default=1.0, dest="eta_hardware")
    chain.add_argument("--f-th", type=float, default=0.95, dest="f_th")
    chain.add_argument("--trace", action="store_true", help="include per-level trace")
    chain.add_argument("--oracle", action="store_true",
                       help="attach Monte-Carlo validation numbers")
    chain.add_argument("--trials", type=int, default=100_000)
    chain.add_argument("--seed", type=int, default=20260809)
    chain.add_argument("--format", choices=("json", "csv"), default="json")
    chain.add_argument("--out")
    chain.set_defaults(func=_cmd_chain)

    sweep_cmd = sub.add_parser("sweep", help="run a sweep from a JSON config")
    sweep_cmd.add_argument("--config", required=True)
    sweep_cmd.add_argument("--out")
    sweep_cmd.add_argument("--threads", type=int, default=None)
    sweep_cmd.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep_cmd.set_defaults(func=_cmd_sweep)

    figure = sub.add_parser("figure", help="run a named preset sweep")
    figure.add_argument("name")
    figure.add_argument("--out")
    figure.add_argument("--threads", type=int, default=None)
    figure.add_argument("--format", choices=("csv", "json"), default="csv")
    figure.set_defaults(func=_cmd_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ConfigurationError, UnsupportedWavelengthError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, QuadratureError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
