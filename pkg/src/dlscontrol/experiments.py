"""Canonical experiment presets and the step-size/damping sweep.

The five presets share one plant and one initial condition and vary only
the step size, the least-squares damping and whether the controller runs:

    fig1   h=0.01,  control off (passive reference)
    fig2   h=0.01,  lam=1.0
    fig3   h=0.001, lam=1.0
    fig4   h=0.001, lam=10.0
    fig5   h=0.001, lam=0.1

fig2 and fig4 form the matched pair for the lam*h product rule: scaling the
damping by the same factor as the step count keeps the adjustment per unit
time comparable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import math

import numpy as np

from .analysis import beat_metrics
from .duffing import DuffingControlConfig, DuffingParams
from .dynamics import DivergenceError, SystemState
from .io import write_config, write_sweep_csv, write_trajectory_csv
from .plots import render_run_figure
from .simulate import ControllerTrace, SimulationConfig, Trajectory, simulate

BASE_PARAMS = DuffingParams(omega=1.0, epsilon=0.1, alpha=1.5, zeta=0.025)
BASE_INITIAL = SystemState(x=np.array([1.0, 0.1]), v=np.zeros(2), t=0.0)
BASE_U0 = 0.025
BASE_T_END = 200.0


def default_stride(h: float) -> int:
    """Store roughly one row per 0.01 time units regardless of step size."""
    return max(1, round(0.01 / h))


def _preset(h: float, lam: float, control_enabled: bool, name: str) -> SimulationConfig:
    return SimulationConfig(
        params=BASE_PARAMS,
        control=DuffingControlConfig(lam=lam, u0=BASE_U0),
        h=h, t_end=BASE_T_END, initial=BASE_INITIAL,
        control_enabled=control_enabled,
        stride=default_stride(h), preset_name=name)


_PRESETS = {
    "fig1": lambda: _preset(0.01, 1.0, False, "fig1"),
    "fig2": lambda: _preset(0.01, 1.0, True, "fig2"),
    "fig3": lambda: _preset(0.001, 1.0, True, "fig3"),
    "fig4": lambda: _preset(0.001, 10.0, True, "fig4"),
    "fig5": lambda: _preset(0.001, 0.1, True, "fig5"),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_config(name: str) -> SimulationConfig:
    """Configuration of a named preset; ValueError on an unknown name."""
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}"
        ) from None
    return factory()


@dataclass(frozen=True)
class RunResult:
    """One completed run plus the files it produced, if any."""

    config: SimulationConfig
    trajectory: Trajectory
    trace: ControllerTrace
    csv_path: Path | None = None
    figure_path: Path | None = None
    config_path: Path | None = None


def run_config(cfg: SimulationConfig, out_dir: str | Path | None = None,
               name: str = "run") -> RunResult:
    """Run a configuration and, given an output directory, write its report.

    The report is the trajectory as CSV, the rendered figure as SVG and the
    configuration as a flat text file, all sharing the base name.
    """
    trajectory, trace = simulate(cfg)
    csv_path = figure_path = config_path = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = write_trajectory_csv(trajectory, out / f"{name}.csv")
        figure_path = render_run_figure(trajectory, out / f"{name}.svg", title=name)
        config_path = write_config(cfg, out / f"{name}.cfg")
    return RunResult(config=cfg, trajectory=trajectory, trace=trace,
                     csv_path=csv_path, figure_path=figure_path,
                     config_path=config_path)


def run_preset(name: str, out_dir: str | Path | None = None,
               **overrides) -> RunResult:
    """Run a named preset, optionally overriding configuration fields.

    Overrides are field names of the run configuration (``h``, ``t_end``,
    ``control_enabled``, ``stride``) or of the controller (``lam``, ``u0``,
    ``bias``).
    """
    cfg = preset_config(name)
    control_fields = {"lam", "u0", "bias", "target", "u_min", "u_max"}
    control_overrides = {k: overrides.pop(k) for k in list(overrides)
                         if k in control_fields}
    if control_overrides:
        cfg = replace(cfg, control=replace(cfg.control, **control_overrides))
    if overrides:
        cfg = replace(cfg, **overrides)
    return run_config(cfg, out_dir=out_dir, name=name)


def sweep_cells(h_values, lam_values=None, lambda0: float | None = None):
    """Expand sweep axes into (h, lam) cells in deterministic order.

    Exactly one of ``lam_values`` and ``lambda0`` must be given; the latter
    locks the product lam * h to ``lambda0`` across step sizes.
    """
    if (lam_values is None) == (lambda0 is None):
        raise ValueError("provide exactly one of lam_values and lambda0")
    cells = []
    for h in h_values:
        if lambda0 is not None:
            cells.append((float(h), float(lambda0) / float(h)))
        else:
            for lam in lam_values:
                cells.append((float(h), float(lam)))
    return cells


def run_sweep(h_values, lam_values=None, lambda0: float | None = None,
              out_dir: str | Path | None = None,
              t_end: float = BASE_T_END) -> list[dict]:
    """Run every (h, lam) cell and summarize each in one row.

    Rows carry the peak deviation of the damping from its passive value, the
    peak x2 envelope, the exchange depth and the suppression relative to an
    uncontrolled run at the same step size. A diverging cell is flagged and
    filled with NaNs; the sweep continues.
    """
    cells = sweep_cells(h_values, lam_values, lambda0)
    baselines: dict[float, float] = {}

    def baseline_peak(h: float) -> float:
        if h not in baselines:
            base_cfg = replace(_preset(h, 1.0, False, "baseline"), t_end=t_end,
                               preset_name=None)
            try:
                base_traj, _ = simulate(base_cfg)
                baselines[h] = float(np.max(
                    beat_metrics(base_traj, BASE_PARAMS).envelope_x2))
            except DivergenceError:
                baselines[h] = math.nan
        return baselines[h]

    rows = []
    for h, lam in cells:
        cfg = replace(_preset(h, lam, True, "cell"), t_end=t_end, preset_name=None)
        try:
            traj, _ = simulate(cfg)
        except DivergenceError:
            rows.append({"h": h, "lam": lam, "diverged": True,
                         "max_control_dev": math.nan, "x2_env_max": math.nan,
                         "x2_exchange_depth": math.nan, "suppression_x2": math.nan})
            continue
        metrics = beat_metrics(traj, BASE_PARAMS)
        env_max = float(np.max(metrics.envelope_x2))
        peak = baseline_peak(h)
        if math.isnan(peak):
            suppression = math.nan
        elif peak > 0.0:
            suppression = env_max / peak
        else:
            suppression = math.inf
        rows.append({
            "h": h, "lam": lam, "diverged": False,
            "max_control_dev": float(np.max(np.abs(traj.u - BASE_PARAMS.zeta))),
            "x2_env_max": env_max,
            "x2_exchange_depth": metrics.exchange_depth,
            "suppression_x2": suppression,
        })
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_sweep_csv(rows, out / "sweep.csv")
    return rows
