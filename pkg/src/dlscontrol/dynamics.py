"""State containers, plant interface and time stepping.

Integration is deliberately the simplest explicit scheme: the new state is
built entirely from the old one, which keeps a one-step-delayed controller
well defined. A classical fourth-order step is included for verification
runs only and must not migrate into the control loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

# Any state entry at or beyond this magnitude counts as a blown-up run.
BLOWUP_LIMIT = 1e9


class DivergenceError(RuntimeError):
    """Integration produced a non-finite or blown-up state.

    ``step`` holds the step index when the caller supplied one, else None.
    """

    def __init__(self, message: str, step: int | None = None):
        if step is not None:
            message = f"{message} at step {step}"
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class SystemState:
    """Positions, velocities and time of a second-order system."""

    x: np.ndarray
    v: np.ndarray
    t: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        if x.ndim != 1 or v.ndim != 1:
            raise ValueError(f"x and v must be one-dimensional, got {x.shape} and {v.shape}")
        if x.size != v.size:
            raise ValueError(f"x has {x.size} entries but v has {v.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v)) and np.isfinite(self.t)):
            raise ValueError("state entries must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self) -> int:
        return self.x.size


@runtime_checkable
class PlantModel(Protocol):
    """Second-order plant x'' = f(x, v, u) with a control-sensitivity matrix."""

    @property
    def dim(self) -> int:
        """Number of position coordinates."""
        ...

    @property
    def control_dim(self) -> int:
        """Number of control inputs."""
        ...

    def rhs(self, state: SystemState, u) -> np.ndarray:
        """Accelerations at the given state and control, length ``dim``."""
        ...

    def control_jacobian(self, state: SystemState, u) -> np.ndarray:
        """Partial derivatives of ``rhs`` in the control, ``dim x control_dim``."""
        ...


def euler_step(state: SystemState, model: PlantModel, u, h: float,
               step: int | None = None) -> SystemState:
    """Advance one explicit step of size ``h``.

    Both position and velocity updates use values from the incoming state;
    the acceleration is evaluated before anything moves.
    """
    f = model.rhs(state, u)
    if not np.all(np.isfinite(f)):
        raise DivergenceError("acceleration is non-finite", step)
    x_new = state.x + h * state.v
    v_new = state.v + h * f
    largest = max(float(np.max(np.abs(x_new))), float(np.max(np.abs(v_new))))
    # Written as a negated comparison so NaN falls into the error branch.
    if not (largest < BLOWUP_LIMIT):
        raise DivergenceError(f"state magnitude {largest:.3e} exceeds {BLOWUP_LIMIT:.0e}", step)
    return SystemState(x=x_new, v=v_new, t=state.t + h)


def rk4_step(state: SystemState, model: PlantModel, u, h: float) -> SystemState:
    """Classical fourth-order step holding the control fixed.

    Verification helper for convergence studies; the control loop itself is
    defined with the explicit first-order step above.
    """
    def derivs(x, v, t):
        s = SystemState(x=x, v=v, t=t)
        return v, model.rhs(s, u)

    k1x, k1v = derivs(state.x, state.v, state.t)
    k2x, k2v = derivs(state.x + 0.5 * h * k1x, state.v + 0.5 * h * k1v, state.t + 0.5 * h)
    k3x, k3v = derivs(state.x + 0.5 * h * k2x, state.v + 0.5 * h * k2v, state.t + 0.5 * h)
    k4x, k4v = derivs(state.x + h * k3x, state.v + h * k3v, state.t + h)
    x_new = state.x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    v_new = state.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    if not (np.all(np.isfinite(x_new)) and np.all(np.isfinite(v_new))):
        raise DivergenceError("fourth-order step produced a non-finite state")
    return SystemState(x=x_new, v=v_new, t=state.t + h)


def finite_difference_control_jacobian(model: PlantModel, state: SystemState, u,
                                       step: float = 1e-6) -> np.ndarray:
    """Central-difference estimate of the control sensitivity.

    Used in tests to validate hand-written ``control_jacobian``
    implementations; accepts a scalar or vector control.
    """
    u_arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
    columns = []
    for j in range(u_arr.size):
        bump = np.zeros_like(u_arr)
        bump[j] = step
        plus = np.asarray(model.rhs(state, _like(u, u_arr + bump)))
        minus = np.asarray(model.rhs(state, _like(u, u_arr - bump)))
        columns.append((plus - minus) / (2.0 * step))
    return np.column_stack(columns)


def _like(template, arr: np.ndarray):
    if np.isscalar(template) or np.asarray(template).ndim == 0:
        return float(arr[0])
    return arr
