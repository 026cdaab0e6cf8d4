"""Closed-loop simulation of the controlled oscillator pair.

The loop alternates a control adjustment and an explicit integration step.
Within step k both updates read only step-k values: the adjusted damping
computed at step k is first applied to the dynamics at step k+1. Disabling
the control keeps the full diagnostics pipeline running so that controlled
and uncontrolled runs produce structurally identical records.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .duffing import (
    ControlDiagnostics,
    DuffingControlConfig,
    DuffingParams,
    DuffingPlant,
    control_update,
)
from .dynamics import DivergenceError, SystemState, euler_step

MAX_STEPS_DEFAULT = 10_000_000


@dataclass(frozen=True)
class SimulationConfig:
    """Everything needed to reproduce one run."""

    params: DuffingParams = field(default_factory=DuffingParams)
    control: DuffingControlConfig = field(default_factory=DuffingControlConfig)
    h: float = 0.01
    t_end: float = 200.0
    initial: SystemState = field(
        default_factory=lambda: SystemState(x=np.array([1.0, 0.1]),
                                            v=np.zeros(2), t=0.0))
    control_enabled: bool = True
    stride: int = 1
    preset_name: str | None = None
    max_steps: int = MAX_STEPS_DEFAULT

    def __post_init__(self):
        if not (self.h > 0.0):
            raise ValueError(f"h must be positive, got {self.h}")
        if not (self.t_end > 0.0):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.n_steps > self.max_steps:
            raise ValueError(
                f"t_end/h = {self.n_steps} steps exceeds max_steps = {self.max_steps}"
            )

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.h)


@dataclass(frozen=True)
class Trajectory:
    """Recorded time series of one run, one row per stored step."""

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    u: np.ndarray
    f2: np.ndarray
    du: np.ndarray

    def __post_init__(self):
        columns = (self.t, self.x1, self.x2, self.v1, self.v2,
                   self.u, self.f2, self.du)
        sizes = {c.size for c in columns}
        if len(sizes) != 1:
            raise ValueError(f"columns differ in length: {sorted(sizes)}")
        if self.t.size > 1 and not np.all(np.diff(self.t) > 0.0):
            raise ValueError("time column must be strictly increasing")

    def __len__(self) -> int:
        return self.t.size


@dataclass(frozen=True)
class ControllerTrace:
    """Controller internals aligned row-for-row with the trajectory."""

    u: np.ndarray
    delta_u: np.ndarray
    f2: np.ndarray
    dfdu: np.ndarray
    denominator: np.ndarray
    fallback: np.ndarray


def simulate(cfg: SimulationConfig) -> tuple[Trajectory, ControllerTrace]:
    """Run the closed loop and return the stored rows.

    Rows are recorded every ``cfg.stride`` steps plus the final step. The
    ``u`` column holds the damping in force while the row's state was
    current, and ``du`` the adjustment computed from that row (zero when the
    control is disabled). A blown-up integration raises DivergenceError
    tagged with the step index.
    """
    plant = DuffingPlant(cfg.params)
    target_fn = cfg.control.target_fn()
    n = cfg.n_steps

    rows_t, rows_x1, rows_x2, rows_v1, rows_v2 = [], [], [], [], []
    rows_u, rows_f2, rows_du = [], [], []
    trace_u, trace_delta, trace_f2 = [], [], []
    trace_dfdu, trace_denom, trace_fallback = [], [], []

    state = cfg.initial
    u = cfg.control.u0
    for k in range(n + 1):
        u_next, diag = control_update(state, u, cfg.params, cfg.control,
                                      target_fn=target_fn)
        applied = diag.delta_u if cfg.control_enabled else 0.0
        if k % cfg.stride == 0 or k == n:
            rows_t.append(state.t)
            rows_x1.append(state.x[0])
            rows_x2.append(state.x[1])
            rows_v1.append(state.v[0])
            rows_v2.append(state.v[1])
            rows_u.append(u)
            rows_f2.append(diag.f2)
            rows_du.append(applied)
            trace_u.append(u)
            trace_delta.append(diag.delta_u)
            trace_f2.append(diag.f2)
            trace_dfdu.append(diag.dfdu)
            trace_denom.append(diag.denominator)
            trace_fallback.append(diag.fallback)
        if k == n:
            break
        state = euler_step(state, plant, u, cfg.h, step=k)
        if cfg.control_enabled:
            u = u_next

    trajectory = Trajectory(
        t=np.array(rows_t), x1=np.array(rows_x1), x2=np.array(rows_x2),
        v1=np.array(rows_v1), v2=np.array(rows_v2), u=np.array(rows_u),
        f2=np.array(rows_f2), du=np.array(rows_du))
    trace = ControllerTrace(
        u=np.array(trace_u), delta_u=np.array(trace_delta),
        f2=np.array(trace_f2), dfdu=np.array(trace_dfdu),
        denominator=np.array(trace_denom),
        fallback=np.array(trace_fallback, dtype=bool))
    return trajectory, trace
