"""Two linearly coupled Duffing oscillators with tunable damping.

The plant is

    x1'' = -2 zeta Omega v1 - Omega^2 x1 + eps (Omega^2 x2 - alpha x1^3)
    x2'' = -2  u   Omega v2 - Omega^2 x2 + eps (Omega^2 x1 - alpha x2^3)

where the damping ratio u of the second oscillator is the single control
input. The controller drives the second acceleration toward a target by a
one-dimensional damped least-squares adjustment; since everything is scalar,
the normal equations collapse to a closed form evaluated directly here, with
the general solver kept available as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .dls import DlsWeights, SingularNormalMatrixError, dls_solve
from .dynamics import SystemState

# Denominators below this are treated as degenerate and the update is skipped.
DENOM_FLOOR = 1e-15


@dataclass(frozen=True)
class DuffingParams:
    """Physical constants of the coupled pair.

    omega    natural frequency of either oscillator alone
    epsilon  coupling fraction, 0 <= epsilon < 1
    alpha    cubic stiffness coefficient
    zeta     damping ratio of the first (uncontrolled) oscillator
    """

    omega: float = 1.0
    epsilon: float = 0.1
    alpha: float = 1.5
    zeta: float = 0.025

    def __post_init__(self):
        if not (self.omega > 0.0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not (0.0 <= self.epsilon < 1.0):
            raise ValueError(f"epsilon must be in [0, 1), got {self.epsilon}")
        if not (self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.zeta < 0.0:
            raise ValueError(f"zeta must be nonnegative, got {self.zeta}")

    @classmethod
    def from_stiffness(cls, stiffness: float, coupling: float,
                       alpha: float = 1.5, zeta: float = 0.025) -> "DuffingParams":
        """Build from the raw per-oscillator stiffness and coupling stiffness.

        omega^2 is the total stiffness seen by one oscillator and epsilon the
        coupled fraction of it.
        """
        total = coupling + stiffness
        if total <= 0.0:
            raise ValueError(f"stiffness + coupling must be positive, got {total}")
        return cls(omega=math.sqrt(total), epsilon=coupling / total,
                   alpha=alpha, zeta=zeta)


def duffing_rhs(state: SystemState, u: float, p: DuffingParams) -> tuple[float, float]:
    """Accelerations (f1, f2) of the coupled pair."""
    x1, x2 = state.x
    v1, v2 = state.v
    w2 = p.omega * p.omega
    f1 = -2.0 * p.zeta * p.omega * v1 - w2 * x1 + p.epsilon * (w2 * x2 - p.alpha * x1 ** 3)
    f2 = -2.0 * u * p.omega * v2 - w2 * x2 + p.epsilon * (w2 * x1 - p.alpha * x2 ** 3)
    return f1, f2


def duffing_control_jacobian(state: SystemState, p: DuffingParams) -> float:
    """d f2 / d u, the only nonzero control sensitivity."""
    return -2.0 * p.omega * state.v[1]


class DuffingPlant:
    """Plant-interface adapter around the closed-form expressions."""

    def __init__(self, params: DuffingParams):
        self.params = params

    @property
    def dim(self) -> int:
        return 2

    @property
    def control_dim(self) -> int:
        return 1

    def rhs(self, state: SystemState, u) -> np.ndarray:
        return np.array(duffing_rhs(state, float(u), self.params))

    def control_jacobian(self, state: SystemState, u) -> np.ndarray:
        return np.array([[0.0], [duffing_control_jacobian(state, self.params)]])


TargetFn = Callable[[SystemState], float]


def resolve_target(spec: str | float | TargetFn) -> TargetFn:
    """Turn a target specification into a callable of the state.

    Accepts "zero", "constant:<value>", a bare number, or a callable
    returning the desired second-oscillator acceleration.
    """
    if callable(spec):
        return spec
    if isinstance(spec, str):
        if spec == "zero":
            return lambda state: 0.0
        if spec.startswith("constant:"):
            value = float(spec.split(":", 1)[1])
            return lambda state: value
        raise ValueError(f"unknown target specification {spec!r}")
    value = float(spec)
    return lambda state: value


@dataclass(frozen=True)
class DuffingControlConfig:
    """Controller settings for the damping-ratio adjustment.

    ``lam`` is the least-squares damping constant that tempers the update; it
    shares nothing but a name with the plant's physical damping ratios.
    ``bias`` enters the regularizer as a preferred direction for the
    adjustment; zero leaves pure magnitude suppression.
    """

    lam: float = 1.0
    u0: float = 0.025
    bias: float = 0.0
    target: str | float | TargetFn = "zero"
    u_min: float | None = None
    u_max: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"lam must be finite and >= 0, got {self.lam}")
        if not np.isfinite(self.u0):
            raise ValueError(f"u0 must be finite, got {self.u0}")
        if not np.isfinite(self.bias):
            raise ValueError(f"bias must be finite, got {self.bias}")
        lo = -math.inf if self.u_min is None else self.u_min
        hi = math.inf if self.u_max is None else self.u_max
        if lo > hi:
            raise ValueError(f"u_min {lo} exceeds u_max {hi}")
        if not (lo <= self.u0 <= hi):
            raise ValueError(f"u0 {self.u0} outside [{lo}, {hi}]")

    def target_fn(self) -> TargetFn:
        return resolve_target(self.target)


class ControlDiagnostics(NamedTuple):
    """Per-step internals of the update, recorded alongside the trajectory."""

    delta_u: float
    f2: float
    dfdu: float
    denominator: float
    fallback: bool
    clamped: bool


def control_update(state: SystemState, u: float, p: DuffingParams,
                   cfg: DuffingControlConfig,
                   target_fn: TargetFn | None = None) -> tuple[float, ControlDiagnostics]:
    """One damping-ratio adjustment from the current state.

    Everything on the right-hand side is evaluated at the incoming state and
    control, so the result can be applied on the following step without
    peeking ahead. Returns the new control and the diagnostics record.
    """
    if target_fn is None:
        target_fn = cfg.target_fn()
    _, f2 = duffing_rhs(state, u, p)
    a = duffing_control_jacobian(state, p)
    error = target_fn(state) - f2
    denominator = a * a + cfg.lam
    if denominator < DENOM_FLOOR:
        diag = ControlDiagnostics(delta_u=0.0, f2=f2, dfdu=a,
                                  denominator=denominator, fallback=True, clamped=False)
        return u, diag
    delta_u = (a * error - cfg.lam * cfg.bias) / denominator
    u_new = u + delta_u
    clamped = False
    if cfg.u_min is not None and u_new < cfg.u_min:
        u_new, clamped = cfg.u_min, True
    if cfg.u_max is not None and u_new > cfg.u_max:
        u_new, clamped = cfg.u_max, True
    diag = ControlDiagnostics(delta_u=u_new - u, f2=f2, dfdu=a,
                              denominator=denominator, fallback=False, clamped=clamped)
    return u_new, diag


def control_update_via_solver(state: SystemState, u: float, p: DuffingParams,
                              cfg: DuffingControlConfig) -> float:
    """Same adjustment through the general solver, for cross-checking.

    Builds the full two-channel problem with the second acceleration
    weighted and the scalar control regularized. Falls back to no change if
    the normal matrix degenerates, mirroring the closed form's floor.
    """
    f1, f2 = duffing_rhs(state, u, p)
    a = duffing_control_jacobian(state, p)
    target = cfg.target_fn()(state)
    weights = DlsWeights.single_channel(n=2, channel=1, damping=cfg.lam, bias=cfg.bias)
    jacobian = np.array([[0.0], [a]])
    error = np.array([0.0 - f1, target - f2])
    try:
        delta = float(dls_solve(error, jacobian, weights)[0])
    except SingularNormalMatrixError:
        delta = 0.0
    u_new = u + delta
    if cfg.u_min is not None:
        u_new = max(u_new, cfg.u_min)
    if cfg.u_max is not None:
        u_new = min(u_new, cfg.u_max)
    return u_new


def conserved_energy(state: SystemState, p: DuffingParams) -> float:
    """Energy integral of the undamped pair (zeta = u = 0).

    Constant along exact trajectories of the undamped system, which makes
    its drift under a numerical scheme a direct measure of integration
    error.
    """
    x1, x2 = state.x
    v1, v2 = state.v
    w2 = p.omega * p.omega
    quadratic = 0.5 * (v1 * v1 + v2 * v2) + 0.5 * w2 * (x1 * x1 + x2 * x2)
    coupling = -p.epsilon * w2 * x1 * x2
    quartic = 0.25 * p.epsilon * p.alpha * (x1 ** 4 + x2 ** 4)
    return quadratic + coupling + quartic
