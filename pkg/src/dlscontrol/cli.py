"""Command-line front end.

Subcommands:

    preset <name>           run a canonical experiment, write CSV/SVG/config
    sweep                   grid of step sizes and damping constants
    compare <a.csv> <b.csv> difference two damping traces on a shared grid
    spectrum                closed-loop step-map eigenvalues at a point
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .analysis import compare_control_traces, step_map_spectrum
from .duffing import DuffingControlConfig
from .dynamics import DivergenceError, SystemState
from .experiments import BASE_PARAMS, PRESET_NAMES, preset_config, run_config, run_sweep
from .io import read_trajectory_csv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlscontrol",
        description="Damped least-squares control of coupled Duffing oscillators.")
    sub = parser.add_subparsers(dest="command", required=True)

    preset = sub.add_parser("preset", help="run a canonical experiment")
    preset.add_argument("name", choices=PRESET_NAMES)
    preset.add_argument("--out-dir", default="out")
    preset.add_argument("--h", type=float, default=None, help="override step size")
    preset.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="override least-squares damping")
    preset.add_argument("--lambda0", type=float, default=None,
                        help="set damping as lambda0 / h")
    preset.add_argument("--t-end", type=float, default=None)
    preset.add_argument("--stride", type=int, default=None)
    preset.add_argument("--full-resolution", action="store_true",
                        help="store every step (stride 1)")
    preset.add_argument("--no-control", action="store_true")
    preset.add_argument("--seed", type=int, default=None,
                        help="reserved for randomized variants; unused")

    sweep = sub.add_parser("sweep", help="grid over step size and damping")
    sweep.add_argument("--h", required=True,
                       help="comma-separated step sizes, e.g. 0.01,0.001")
    sweep.add_argument("--lambda", dest="lam", default=None,
                       help="comma-separated damping constants")
    sweep.add_argument("--lambda0", type=float, default=None,
                       help="lock lambda * h to this product instead")
    sweep.add_argument("--out-dir", default="out")
    sweep.add_argument("--t-end", type=float, default=200.0)
    sweep.add_argument("--seed", type=int, default=None,
                       help="reserved for randomized variants; unused")

    compare = sub.add_parser("compare", help="difference two damping traces")
    compare.add_argument("run_a")
    compare.add_argument("run_b")

    spectrum = sub.add_parser("spectrum", help="step-map eigenvalues at a point")
    spectrum.add_argument("--h", type=float, default=0.01)
    spectrum.add_argument("--lambda", dest="lam", type=float, default=1.0)
    spectrum.add_argument("--x1", type=float, default=0.0)
    spectrum.add_argument("--x2", type=float, default=0.0)
    spectrum.add_argument("--v1", type=float, default=0.0)
    spectrum.add_argument("--v2", type=float, default=0.0)
    spectrum.add_argument("--u", type=float, default=0.0)
    return parser


def _cmd_preset(args: argparse.Namespace) -> int:
    cfg = preset_config(args.name)
    if args.h is not None:
        cfg = replace(cfg, h=args.h)
    if args.lam is not None and args.lambda0 is not None:
        print("error: --lambda and --lambda0 are mutually exclusive", file=sys.stderr)
        return 2
    if args.lam is not None:
        cfg = replace(cfg, control=replace(cfg.control, lam=args.lam))
    if args.lambda0 is not None:
        cfg = replace(cfg, control=replace(cfg.control, lam=args.lambda0 / cfg.h))
    if args.t_end is not None:
        cfg = replace(cfg, t_end=args.t_end)
    if args.no_control:
        cfg = replace(cfg, control_enabled=False)
    if args.full_resolution:
        cfg = replace(cfg, stride=1)
    elif args.stride is not None:
        cfg = replace(cfg, stride=args.stride)
    elif args.h is not None:
        from .experiments import default_stride
        cfg = replace(cfg, stride=default_stride(args.h))
    try:
        result = run_config(cfg, out_dir=args.out_dir, name=args.name)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.csv_path}")
    print(f"wrote {result.figure_path}")
    print(f"wrote {result.config_path}")
    return 0


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise SystemExit(f"error: {flag} expects comma-separated numbers, got {text!r}")


def _cmd_sweep(args: argparse.Namespace) -> int:
    if (args.lam is None) == (args.lambda0 is None):
        print("error: provide exactly one of --lambda and --lambda0", file=sys.stderr)
        return 2
    h_values = _parse_floats(args.h, "--h")
    lam_values = _parse_floats(args.lam, "--lambda") if args.lam is not None else None
    rows = run_sweep(h_values, lam_values=lam_values, lambda0=args.lambda0,
                     out_dir=args.out_dir, t_end=args.t_end)
    for row in rows:
        status = "diverged" if row["diverged"] else "ok"
        print(f"h={row['h']:g} lam={row['lam']:g} [{status}] "
              f"max|u-zeta|={row['max_control_dev']:.4g} "
              f"env_max={row['x2_env_max']:.4g} "
              f"depth={row['x2_exchange_depth']:.4g} "
              f"suppression={row['suppression_x2']:.4g}")
    print(f"wrote {args.out_dir}/sweep.csv")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    run_a = read_trajectory_csv(args.run_a)
    run_b = read_trajectory_csv(args.run_b)
    result = compare_control_traces(run_a, run_b)
    print(f"rms_difference = {result.rms_difference:.6g}")
    print(f"relative_rms   = {result.relative_rms:.6g}")
    print(f"max_deviation  = {result.max_deviation:.6g}")
    return 0


def _cmd_spectrum(args: argparse.Namespace) -> int:
    control = DuffingControlConfig(lam=args.lam, u0=args.u)
    at = SystemState(x=np.array([args.x1, args.x2]),
                     v=np.array([args.v1, args.v2]), t=0.0)
    report = step_map_spectrum(BASE_PARAMS, control, h=args.h, at=at, u=args.u)
    print("step-map eigenvalues (|.| ascending):")
    for eig, offset in zip(report.eigenvalues, report.offsets_from_unity):
        print(f"  {eig.real:+.9f} {eig.imag:+.9f}i   offset {offset.real:+.3e} {offset.imag:+.3e}i")
    print(f"spectral radius   = {report.spectral_radius:.12f}")
    print(f"attraction        = {report.attraction_verdict}")
    print("continuous-time characteristic roots:")
    for root in report.char_roots:
        print(f"  {root.real:+.9f} {root.imag:+.9f}i")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "preset": _cmd_preset,
        "sweep": _cmd_sweep,
        "compare": _cmd_compare,
        "spectrum": _cmd_spectrum,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
