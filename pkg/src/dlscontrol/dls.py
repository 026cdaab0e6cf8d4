"""Damped least-squares control adjustment.

The adjustment minimizes a weighted squared acceleration error plus a
regularization term,

    P(du) = 1/2 (E - A du)^T W (E - A du) + 1/2 (B + C du)^T L (B + C du),

with W and L diagonal and nonnegative. The minimizer solves the small dense
normal equations

    (A^T W A + C^T L C) du = A^T W E - C^T L B,

handled here by a direct Cholesky factorization; the matrix is m-by-m with
m <= 4 in every use this package has, so no iterative machinery is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

# Relative residual bound a successful normal-equation solve must meet.
TOL_SOLVE = 1e-10
# Condition-number estimate beyond which the normal matrix counts as singular.
COND_LIMIT = 1e12


class ConfigurationError(ValueError):
    """Inconsistent dimensions or invalid weight values."""


class SingularNormalMatrixError(RuntimeError):
    """Normal matrix is singular to working precision.

    Carries the condition estimate in ``condition`` so the caller can log it
    or decide on a fallback.
    """

    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite entries")
    return arr


def _as_matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, np.newaxis]
    if arr.ndim != 2:
        raise ConfigurationError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class DlsWeights:
    """Weighting of the quadratic objective.

    The two diagonal matrices are stored as vectors; full matrices are
    rejected because the objective is defined with diagonal weighting only.
    """

    weights: np.ndarray  # diagonal of W, one entry per error channel
    damping: np.ndarray  # diagonal of L, one entry per regularized combination
    bias: np.ndarray     # offset B added to C du inside the regularizer
    shaping: np.ndarray  # matrix C mapping adjustments to regularized combinations

    def __post_init__(self):
        w = _as_vector(self.weights, "weights")
        lam = _as_vector(self.damping, "damping")
        b = _as_vector(self.bias, "bias")
        c = _as_matrix(self.shaping, "shaping")
        if np.any(w < 0.0):
            raise ConfigurationError("weights must be nonnegative")
        if np.any(lam < 0.0):
            raise ConfigurationError("damping must be nonnegative")
        if c.shape[0] != lam.size or b.size != lam.size:
            raise ConfigurationError(
                f"damping ({lam.size}), bias ({b.size}) and shaping rows "
                f"({c.shape[0]}) must agree"
            )
        if not (np.any(w > 0.0) or np.any(lam > 0.0)):
            raise ConfigurationError("weights and damping cannot both be all zero")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "damping", lam)
        object.__setattr__(self, "bias", b)
        object.__setattr__(self, "shaping", c)

    @classmethod
    def single_channel(cls, n: int, channel: int, damping: float,
                       bias: float = 0.0) -> "DlsWeights":
        """Weight one acceleration channel and regularize one scalar control.

        This is the reduction used by the coupled-oscillator controller:
        W picks out ``channel``, L is the scalar ``damping``, C is 1.
        """
        if not 0 <= channel < n:
            raise ConfigurationError(f"channel {channel} out of range for n={n}")
        w = np.zeros(n)
        w[channel] = 1.0
        return cls(weights=w, damping=np.array([float(damping)]),
                   bias=np.array([float(bias)]), shaping=np.ones((1, 1)))

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def m(self) -> int:
        return self.shaping.shape[1]


def acceleration_error(target_accel, actual_accel) -> np.ndarray:
    """Componentwise difference target - actual, both length n."""
    target = _as_vector(target_accel, "target_accel")
    actual = _as_vector(actual_accel, "actual_accel")
    if target.size != actual.size:
        raise ConfigurationError(
            f"target length {target.size} != actual length {actual.size}"
        )
    return target - actual


def _check_dimensions(error: np.ndarray, jacobian: np.ndarray, w: DlsWeights) -> None:
    n, m = jacobian.shape
    if error.size != n:
        raise ConfigurationError(f"error length {error.size} != jacobian rows {n}")
    if w.n != n:
        raise ConfigurationError(f"weights length {w.n} != jacobian rows {n}")
    if w.shaping.shape[1] != m:
        raise ConfigurationError(
            f"shaping columns {w.shaping.shape[1]} != jacobian columns {m}"
        )


def dls_objective(error, jacobian, w: DlsWeights, delta_u) -> float:
    """Evaluate the quadratic objective at the adjustment ``delta_u``.

    Always nonnegative; ``dls_solve`` returns its minimizer.
    """
    e = _as_vector(error, "error")
    a = _as_matrix(jacobian, "jacobian")
    du = _as_vector(delta_u, "delta_u")
    _check_dimensions(e, a, w)
    if du.size != a.shape[1]:
        raise ConfigurationError(f"delta_u length {du.size} != jacobian columns {a.shape[1]}")
    residual = e - a @ du
    combination = w.bias + w.shaping @ du
    return 0.5 * float(residual @ (w.weights * residual)) \
        + 0.5 * float(combination @ (w.damping * combination))


def _solve_normal(matrix: np.ndarray, rhs: np.ndarray, context: str) -> np.ndarray:
    condition = float(np.linalg.cond(matrix))
    if not np.isfinite(condition) or condition > COND_LIMIT:
        raise SingularNormalMatrixError(f"{context}: normal matrix is singular", condition)
    try:
        solution = cho_solve(cho_factor(matrix), rhs)
    except LinAlgError as exc:
        raise SingularNormalMatrixError(
            f"{context}: factorization failed ({exc})", condition
        ) from exc
    residual = float(np.linalg.norm(matrix @ solution - rhs))
    if residual > TOL_SOLVE * max(1.0, float(np.linalg.norm(rhs))):
        raise SingularNormalMatrixError(
            f"{context}: residual {residual:.3e} exceeds tolerance", condition
        )
    return solution


def dls_solve(error, jacobian, w: DlsWeights) -> np.ndarray:
    """Minimize the weighted, regularized objective.

    Parameters
    ----------
    error : array_like, length n
        Target-minus-actual acceleration error E.
    jacobian : array_like, n x m
        Sensitivity A of the acceleration to the control.
    w : DlsWeights
        Diagonal weighting, damping, bias and shaping.

    Returns
    -------
    ndarray, length m
        The adjustment solving (A^T W A + C^T L C) du = A^T W E - C^T L B.

    Raises
    ------
    SingularNormalMatrixError
        If the normal matrix is singular to working precision. Callers decide
        the fallback; the oscillator controller uses du = 0.
    """
    e = _as_vector(error, "error")
    a = _as_matrix(jacobian, "jacobian")
    _check_dimensions(e, a, w)
    c = w.shaping
    matrix = a.T @ (w.weights[:, np.newaxis] * a) + c.T @ (w.damping[:, np.newaxis] * c)
    rhs = a.T @ (w.weights * e) - c.T @ (w.damping * w.bias)
    return _solve_normal(matrix, rhs, "dls_solve")


def dls_solve_isotropic(error, jacobian, damping: float) -> np.ndarray:
    """Plain damped least squares (A^T A + damping I)^-1 A^T E.

    Equivalent to ``dls_solve`` with unit weights, isotropic damping, zero
    bias and identity shaping; kept as an independent code path so the two
    can be checked against each other.
    """
    e = _as_vector(error, "error")
    a = _as_matrix(jacobian, "jacobian")
    if e.size != a.shape[0]:
        raise ConfigurationError(f"error length {e.size} != jacobian rows {a.shape[0]}")
    lam = float(damping)
    if not np.isfinite(lam) or lam < 0.0:
        raise ConfigurationError(f"damping must be finite and >= 0, got {damping}")
    m = a.shape[1]
    matrix = a.T @ a + lam * np.eye(m)
    return _solve_normal(matrix, a.T @ e, "dls_solve_isotropic")
