"""Stability and response analysis for the controlled pair.

Two complementary views of stability live here. The continuous one is the
quartic characteristic polynomial of the linearized, uncontrolled pair; the
discrete one is the spectrum of one full closed-loop step (control
adjustment followed by the explicit integration step) treated as a map of
the five-dimensional vector (x1, x2, v1, v2, u). Near the rest point the two
meet: the map's eigenvalues sit at 1 + h * p for each continuous root p,
plus a unit eigenvalue along the control direction.

The response-side helpers quantify the slow energy exchange between the two
oscillators and compare control traces across runs with different step
sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d
from scipy.signal import find_peaks

from .duffing import DuffingControlConfig, DuffingParams, DuffingPlant, control_update
from .dynamics import SystemState, euler_step
from .simulate import Trajectory

CHAR_RESIDUAL_TOL = 1e-8


class InsufficientDataError(ValueError):
    """Run is too short for the requested response metric."""


class ComparisonError(ValueError):
    """Two runs cannot be compared on a common time grid."""


def characteristic_coefficients(p: DuffingParams) -> np.ndarray:
    """Quartic coefficients of the linearized pair, highest power first.

    p^4 + 2 zeta Omega p^3 + 2 Omega^2 p^2 + 2 zeta Omega^3 p
        + (1 - eps^2) Omega^4 = 0
    """
    w = p.omega
    return np.array([
        1.0,
        2.0 * p.zeta * w,
        2.0 * w * w,
        2.0 * p.zeta * w ** 3,
        (1.0 - p.epsilon * p.epsilon) * w ** 4,
    ])


def characteristic_roots(p: DuffingParams) -> np.ndarray:
    """Roots of the linearized pair's quartic, residual-checked.

    The undamped case factors into a biquadratic with exact roots
    +-i Omega sqrt(1 -+ eps); the general case goes through the companion
    matrix. Either way each root is substituted back and must null the
    polynomial to within CHAR_RESIDUAL_TOL.
    """
    coeffs = characteristic_coefficients(p)
    if p.zeta == 0.0:
        # Double roots at eps = 0 defeat companion-matrix accuracy, so the
        # biquadratic branch is exact rather than cosmetic.
        low = p.omega * math.sqrt(1.0 - p.epsilon)
        high = p.omega * math.sqrt(1.0 + p.epsilon)
        roots = np.array([1j * low, -1j * low, 1j * high, -1j * high])
    else:
        roots = np.roots(coeffs)
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    residuals = np.abs(np.polyval(coeffs, roots))
    if np.any(residuals > CHAR_RESIDUAL_TOL * scale):
        raise RuntimeError(
            f"root residual {residuals.max():.3e} exceeds {CHAR_RESIDUAL_TOL:.0e}"
        )
    return roots[np.argsort(roots.imag)]


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of the one-step closed-loop map at a reference point."""

    eigenvalues: np.ndarray
    spectral_radius: float
    char_roots: np.ndarray
    attraction_verdict: str

    @property
    def offsets_from_unity(self) -> np.ndarray:
        """eigenvalues - 1; near the rest point these scale linearly in h."""
        return self.eigenvalues - 1.0


def _verdict(radius: float) -> str:
    if radius < 1.0 - 1e-8:
        return "sufficient"
    if radius <= 1.0 + 1e-8:
        return "necessary_only"
    return "fails"


def step_map_spectrum(params: DuffingParams, control: DuffingControlConfig,
                      h: float, at: SystemState | None = None,
                      u: float | None = None,
                      fd_step: float = 1e-6) -> SpectrumReport:
    """Eigenvalues of one control-plus-integration step, by central differences.

    The map sends (x1, x2, v1, v2, u) to its value after a single closed-loop
    step. Its 5x5 Jacobian is estimated column by column; eigenvalues inside
    the unit circle certify local contraction, a spectral radius of exactly
    one leaves higher-order terms in charge.
    """
    if at is None:
        at = SystemState(x=np.zeros(2), v=np.zeros(2), t=0.0)
    if u is None:
        u = control.u0
    plant = DuffingPlant(params)
    target_fn = control.target_fn()

    def step_map(z: np.ndarray) -> np.ndarray:
        state = SystemState(x=z[:2], v=z[2:4], t=0.0)
        u_next, _ = control_update(state, z[4], params, control, target_fn=target_fn)
        new = euler_step(state, plant, z[4], h)
        return np.array([new.x[0], new.x[1], new.v[0], new.v[1], u_next])

    z0 = np.array([at.x[0], at.x[1], at.v[0], at.v[1], float(u)])
    jac = np.empty((5, 5))
    for j in range(5):
        bump = np.zeros(5)
        bump[j] = fd_step
        jac[:, j] = (step_map(z0 + bump) - step_map(z0 - bump)) / (2.0 * fd_step)
    if not np.all(np.isfinite(jac)):
        raise RuntimeError("step map is non-finite near the reference point")
    eigenvalues = np.linalg.eigvals(jac)
    eigenvalues = eigenvalues[np.argsort(np.abs(eigenvalues))]
    radius = float(np.max(np.abs(eigenvalues)))
    return SpectrumReport(eigenvalues=eigenvalues, spectral_radius=radius,
                          char_roots=characteristic_roots(params),
                          attraction_verdict=_verdict(radius))


def control_eigenvalue_offset(omega: float, v2: float, lam: float) -> float:
    """Offset from unity of the map eigenvalue along the control direction.

    Closed form -4 Omega^2 v2^2 / (4 Omega^2 v2^2 + lam): the adjustment
    contracts its own error geometrically at this rate. At lam = 0 the
    offset is -1 (one-step dead-beat); it vanishes as lam grows or as the
    velocity crosses zero.
    """
    g = 4.0 * omega * omega * v2 * v2
    if g == 0.0:
        if lam == 0.0:
            raise ValueError("offset undefined at v2 = 0 with lam = 0")
        return 0.0
    return -g / (g + lam)


@dataclass(frozen=True)
class BeatMetrics:
    """Slow energy-exchange summary of one run."""

    envelope_x1: np.ndarray
    envelope_x2: np.ndarray
    energy_1: np.ndarray
    energy_2: np.ndarray
    exchange_depth: float
    suppression_ratio: float | None


def _envelope(signal: np.ndarray, window: int) -> np.ndarray:
    return maximum_filter1d(np.abs(signal), size=window, mode="nearest")


def beat_metrics(traj: Trajectory, p: DuffingParams,
                 baseline: Trajectory | None = None) -> BeatMetrics:
    """Envelopes, per-oscillator energies and exchange depth of a run.

    The envelope is a moving maximum of |x| over one linear period, so it
    tracks the beat while ignoring the fast oscillation. ``exchange_depth``
    is the ratio of the largest to smallest x2 envelope value after the
    first period (1.0 for an identically zero run); ``suppression_ratio``
    compares the peak x2 envelope against ``baseline`` when one is given.
    """
    if len(traj) < 2:
        raise InsufficientDataError("need at least two rows")
    dt = float(np.median(np.diff(traj.t)))
    period = 2.0 * math.pi / p.omega
    window = max(1, round(period / dt))
    if traj.t[-1] - traj.t[0] < period:
        raise InsufficientDataError(
            f"run spans {traj.t[-1] - traj.t[0]:.3g}, shorter than one period {period:.3g}"
        )
    env1 = _envelope(traj.x1, window)
    env2 = _envelope(traj.x2, window)
    w2 = p.omega * p.omega
    energy1 = 0.5 * traj.v1 ** 2 + 0.5 * w2 * traj.x1 ** 2
    energy2 = 0.5 * traj.v2 ** 2 + 0.5 * w2 * traj.x2 ** 2
    settled = env2[window:]
    if settled.size == 0:
        settled = env2
    top = float(np.max(settled))
    bottom = float(np.min(settled))
    if top == 0.0 and bottom == 0.0:
        depth = 1.0
    elif bottom == 0.0:
        depth = math.inf
    else:
        depth = top / bottom
    suppression = None
    if baseline is not None:
        base = beat_metrics(baseline, p)
        peak_base = float(np.max(base.envelope_x2))
        suppression = float(np.max(env2)) / peak_base if peak_base > 0.0 else math.inf
    return BeatMetrics(envelope_x1=env1, envelope_x2=env2,
                       energy_1=energy1, energy_2=energy2,
                       exchange_depth=depth, suppression_ratio=suppression)


def count_exchange_cycles(envelope: np.ndarray,
                          prominence_fraction: float = 0.1) -> int:
    """Number of envelope maxima prominent at the given fraction of the peak."""
    if envelope.size == 0:
        return 0
    top = float(np.max(envelope))
    if top <= 0.0:
        return 0
    peaks, _ = find_peaks(envelope, prominence=prominence_fraction * top)
    return int(peaks.size)


@dataclass(frozen=True)
class TraceComparison:
    """Pointwise comparison of two control traces on a shared grid."""

    rms_difference: float
    relative_rms: float
    max_deviation: float


def compare_control_traces(run_a: Trajectory, run_b: Trajectory) -> TraceComparison:
    """Interpolate both damping traces onto the coarser grid and difference them.

    The coarser run (larger median spacing) supplies the grid, restricted to
    the overlap of the two time ranges. ``relative_rms`` normalizes by the
    smaller of the two trace magnitudes so the measure is symmetric.
    """
    if len(run_a) < 2 or len(run_b) < 2:
        raise ComparisonError("both runs need at least two rows")
    dt_a = float(np.median(np.diff(run_a.t)))
    dt_b = float(np.median(np.diff(run_b.t)))
    coarse = run_a if dt_a >= dt_b else run_b
    lo = max(run_a.t[0], run_b.t[0])
    hi = min(run_a.t[-1], run_b.t[-1])
    if hi <= lo:
        raise ComparisonError(f"time ranges do not overlap ([{lo}, {hi}])")
    grid = coarse.t[(coarse.t >= lo) & (coarse.t <= hi)]
    if grid.size == 0:
        raise ComparisonError("no grid points in the overlapping range")
    u_a = np.interp(grid, run_a.t, run_a.u)
    u_b = np.interp(grid, run_b.t, run_b.u)
    diff = u_a - u_b
    rms_diff = float(np.sqrt(np.mean(diff ** 2)))
    rms_a = float(np.sqrt(np.mean(u_a ** 2)))
    rms_b = float(np.sqrt(np.mean(u_b ** 2)))
    smaller = min(rms_a, rms_b)
    if rms_diff == 0.0:
        relative = 0.0
    elif smaller == 0.0:
        relative = math.inf
    else:
        relative = rms_diff / smaller
    return TraceComparison(rms_difference=rms_diff, relative_rms=relative,
                           max_deviation=float(np.max(np.abs(diff))))
