"""Plain-text serialization of runs and configurations.

Trajectories go to comma-separated files with 17 significant digits, enough
to reproduce every IEEE double exactly, so a written file reads back
bit-identical. Configurations use flat ``key = value`` lines.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import numpy as np

from .duffing import DuffingControlConfig, DuffingParams
from .dynamics import SystemState
from .simulate import SimulationConfig, Trajectory

CSV_HEADER = "t,x1,x2,v1,v2,u,f2,du"
_COLUMNS = CSV_HEADER.split(",")


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> Path:
    """Write one run, one row per stored step, header exactly CSV_HEADER."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for i in range(len(traj)):
            fh.write(",".join(_fmt(getattr(traj, c)[i]) for c in _COLUMNS) + "\n")
    return path


def read_trajectory_csv(path: str | Path) -> Trajectory:
    """Read a file written by ``write_trajectory_csv``."""
    path = Path(path)
    with path.open("r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _COLUMNS:
            raise ValueError(f"unexpected header {header!r} in {path}")
        rows = [[float(cell) for cell in row] for row in reader if row]
    if not rows:
        raise ValueError(f"no data rows in {path}")
    data = np.array(rows)
    if data.shape[1] != len(_COLUMNS):
        raise ValueError(f"expected {len(_COLUMNS)} columns, got {data.shape[1]}")
    return Trajectory(**{c: data[:, i] for i, c in enumerate(_COLUMNS)})


def _config_items(cfg: SimulationConfig) -> list[tuple[str, str]]:
    p, c = cfg.params, cfg.control
    if not isinstance(c.target, (str, int, float)):
        raise ValueError("callable targets cannot be serialized")
    items = [
        ("omega", _fmt(p.omega)),
        ("epsilon", _fmt(p.epsilon)),
        ("alpha", _fmt(p.alpha)),
        ("zeta", _fmt(p.zeta)),
        ("lam", _fmt(c.lam)),
        ("u0", _fmt(c.u0)),
        ("bias", _fmt(c.bias)),
        ("target", str(c.target)),
        ("h", _fmt(cfg.h)),
        ("t_end", _fmt(cfg.t_end)),
        ("x1_0", _fmt(cfg.initial.x[0])),
        ("x2_0", _fmt(cfg.initial.x[1])),
        ("v1_0", _fmt(cfg.initial.v[0])),
        ("v2_0", _fmt(cfg.initial.v[1])),
        ("t0", _fmt(cfg.initial.t)),
        ("control_enabled", "true" if cfg.control_enabled else "false"),
        ("stride", str(cfg.stride)),
    ]
    if c.u_min is not None:
        items.append(("u_min", _fmt(c.u_min)))
    if c.u_max is not None:
        items.append(("u_max", _fmt(c.u_max)))
    if cfg.preset_name is not None:
        items.append(("preset_name", cfg.preset_name))
    return items


def write_config(cfg: SimulationConfig, path: str | Path) -> Path:
    """Write a run configuration as flat ``key = value`` lines."""
    path = Path(path)
    lines = [f"{key} = {value}" for key, value in _config_items(cfg)]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_config(path: str | Path) -> SimulationConfig:
    """Rebuild a configuration written by ``write_config``."""
    path = Path(path)
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        raw[key.strip()] = value.strip()

    def take(key: str, default: str | None = None) -> str:
        if key in raw:
            return raw[key]
        if default is None:
            raise ValueError(f"{path}: missing required key {key!r}")
        return default

    params = DuffingParams(omega=float(take("omega")), epsilon=float(take("epsilon")),
                           alpha=float(take("alpha")), zeta=float(take("zeta")))
    target: str | float = take("target", "zero")
    control = DuffingControlConfig(
        lam=float(take("lam")), u0=float(take("u0")), bias=float(take("bias", "0")),
        target=target,
        u_min=float(raw["u_min"]) if "u_min" in raw else None,
        u_max=float(raw["u_max"]) if "u_max" in raw else None)
    initial = SystemState(
        x=np.array([float(take("x1_0")), float(take("x2_0"))]),
        v=np.array([float(take("v1_0")), float(take("v2_0"))]),
        t=float(take("t0", "0")))
    return SimulationConfig(
        params=params, control=control, h=float(take("h")),
        t_end=float(take("t_end")), initial=initial,
        control_enabled=take("control_enabled", "true") == "true",
        stride=int(take("stride", "1")),
        preset_name=raw.get("preset_name"))


SWEEP_HEADER = ["h", "lam", "diverged", "max_control_dev", "x2_env_max",
                "x2_exchange_depth", "suppression_x2"]


def write_sweep_csv(rows: Iterable[dict], path: str | Path) -> Path:
    """Write sweep summary rows; one line per (h, lam) cell."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_HEADER)
        writer.writeheader()
        for row in rows:
            out = dict(row)
            for key in SWEEP_HEADER:
                if isinstance(out.get(key), float):
                    out[key] = _fmt(out[key])
            writer.writerow(out)
    return path
