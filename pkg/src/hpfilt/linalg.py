"""
Linear algebra for the second-difference smoothing penalty.

The HP trend of ``y`` (length ``l``) solves ``S g = y`` with

    S = I + eta * F.T @ F

where ``F`` is the ``(l-2) x l`` second-difference operator with rows
``[1, -2, 1]``.  ``S`` is symmetric, pentadiagonal and positive definite
with every eigenvalue >= 1.

Two ways of getting at ``S^{-1}`` are provided:

* :func:`solve_direct` factors the dense matrix (Cholesky).  This is the
  textbook O(l^3) route and the reference everything else is checked
  against.
* :func:`s3_inverse` + :func:`woodbury_step` grow ``S_t^{-1}`` one row and
  column at a time.  Appending an observation adds the rank-one term
  ``eta * p p.T`` with ``p = [0, ..., 0, 1, -2, 1]``, so the inverse can be
  updated with the Woodbury identity instead of being recomputed.

:func:`solve_banded` is the practical O(l) solver for one-off fits; it is
not used as a benchmark subject.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DimensionError, ParameterError

__all__ = [
    "InverseState",
    "second_diff_apply",
    "second_diff_matrix",
    "second_diff_adjoint",
    "penalty_matrix",
    "penalty_banded",
    "DenseSpdSolver",
    "solve_direct",
    "solve_banded",
    "s3_inverse",
    "woodbury_q",
    "woodbury_step",
    "inverse_chain",
]


def _check_length(l: int) -> None:
    if l < 3:
        raise DimensionError(f"need at least 3 observations, got {l}")


def _check_smoothing(eta: float) -> None:
    if not eta >= 0:  # also rejects NaN
        raise ParameterError(f"smoothing parameter must be >= 0, got {eta!r}")


@dataclass(frozen=True)
class InverseState:
    """Dense ``S_t^{-1}`` at horizon ``t`` (``inverse`` is ``t x t``)."""

    horizon: int
    inverse: np.ndarray

    def __post_init__(self):
        shape = np.shape(self.inverse)
        if shape != (self.horizon, self.horizon):
            raise DimensionError(
                f"inverse has shape {shape}, expected horizon {self.horizon}")


def second_diff_apply(y) -> np.ndarray:
    """Return ``F y``, i.e. ``y[i] - 2*y[i+1] + y[i+2]`` for each ``i``."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise DimensionError("expected a 1-d series")
    _check_length(y.size)
    return y[:-2] - 2.0 * y[1:-1] + y[2:]


def second_diff_adjoint(d) -> np.ndarray:
    """Return ``F.T d`` for ``d`` of length ``l-2`` (result has length ``l``)."""
    d = np.asarray(d, dtype=float)
    if d.ndim != 1 or d.size < 1:
        raise DimensionError("expected a non-empty 1-d vector")
    out = np.zeros(d.size + 2)
    out[:-2] += d
    out[1:-1] -= 2.0 * d
    out[2:] += d
    return out


def second_diff_matrix(l: int) -> np.ndarray:
    """Dense ``(l-2) x l`` second-difference operator."""
    _check_length(l)
    F = np.zeros((l - 2, l))
    rows = np.arange(l - 2)
    F[rows, rows] = 1.0
    F[rows, rows + 1] = -2.0
    F[rows, rows + 2] = 1.0
    return F


def penalty_matrix(l: int, eta: float) -> np.ndarray:
    """
    Dense ``S_l = I_l + eta * F_l.T @ F_l``.

    The matrix is assembled from its five diagonals so that it is exactly
    symmetric and exactly zero outside the band.
    """
    _check_length(l)
    _check_smoothing(eta)
    ab = penalty_banded(l, eta)
    S = np.zeros((l, l))
    i = np.arange(l)
    S[i, i] = ab[2]
    for k in (1, 2):
        S[i[:-k], i[k:]] = ab[2 - k, k:]
        S[i[k:], i[:-k]] = ab[2 - k, k:]
    return S


def penalty_banded(l: int, eta: float) -> np.ndarray:
    """
    ``S_l`` in LAPACK upper symmetric banded storage (shape ``3 x l``).

    Row 2 is the main diagonal, row 1 the first super-diagonal (shifted
    right by one), row 0 the second super-diagonal (shifted right by two).
    """
    _check_length(l)
    _check_smoothing(eta)
    # diagonal of F.T F: 1, 5, 6, ..., 6, 5, 1 (l == 3: 1, 4, 1; l == 4: 1, 5, 5, 1)
    d0 = np.zeros(l)
    d0[:-2] += 1.0
    d0[1:-1] += 4.0
    d0[2:] += 1.0
    d1 = np.zeros(l - 1)
    d1[:-1] -= 2.0
    d1[1:] -= 2.0
    ab = np.zeros((3, l))
    ab[2] = 1.0 + eta * d0
    ab[1, 1:] = eta * d1
    ab[0, 2:] = eta
    return ab


class DenseSpdSolver:
    """Cholesky factor of a dense SPD matrix, reusable across right-hand sides."""

    def __init__(self, S):
        S = np.asarray(S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DimensionError(f"expected a square matrix, got {S.shape}")
        self.size = S.shape[0]
        self._factor = scipy.linalg.cho_factor(S, lower=False, check_finite=False)

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.size,):
            raise DimensionError(
                f"rhs has shape {y.shape}, system has size {self.size}")
        return scipy.linalg.cho_solve(self._factor, y, check_finite=False)


def solve_direct(S, y) -> np.ndarray:
    """
    Solve ``S g = y`` by a dense Cholesky factorization.

    ``S`` is never inverted.  Cost is O(l^3).
    """
    return DenseSpdSolver(S)(y)


def solve_banded(y, eta: float) -> np.ndarray:
    """Solve ``S_l g = y`` in O(l) using the pentadiagonal structure."""
    y = np.asarray(y, dtype=float)
    ab = penalty_banded(y.size, eta)
    return scipy.linalg.solveh_banded(ab, y, lower=False, check_finite=False)


def s3_inverse(eta: float) -> InverseState:
    """Closed-form ``S_3^{-1}``, the seed of the Woodbury recursion."""
    _check_smoothing(eta)
    e = float(eta)
    M = np.array([
        [5 * e + 1, 2 * e, -e],
        [2 * e, 2 * e + 1, 2 * e],
        [-e, 2 * e, 5 * e + 1],
    ])
    return InverseState(3, M / (6 * e + 1))


def woodbury_q(last_two_columns) -> np.ndarray:
    """
    ``q_t = diag(S_{t-1}^{-1}, 1) @ p_t`` from the last two columns of
    ``S_{t-1}^{-1}`` (array of shape ``(t-1, 2)``).  O(t).
    """
    cols = np.asarray(last_two_columns, dtype=float)
    q = np.empty(cols.shape[0] + 1)
    q[:-1] = cols[:, 0] - 2.0 * cols[:, 1]
    q[-1] = 1.0
    return q


def woodbury_delta(q: np.ndarray, eta: float) -> float:
    """``1 / (1/eta + p_t.T q_t)``; zero when ``eta == 0``."""
    if eta == 0:
        return 0.0
    ptq = q[-3] - 2.0 * q[-2] + q[-1]
    return 1.0 / (1.0 / eta + ptq)


def woodbury_step(prev: InverseState, eta: float):
    """
    Grow ``S_{t-1}^{-1}`` to ``S_t^{-1}``.

    Returns ``(state, q, delta)`` where ``state.inverse`` equals
    ``diag(prev, 1) - delta * q q.T``.
    """
    _check_smoothing(eta)
    t = prev.horizon + 1
    if t < 4:
        raise DimensionError("woodbury_step starts from horizon 3")
    q = woodbury_q(prev.inverse[:, -2:])
    delta = woodbury_delta(q, eta)
    out = np.zeros((t, t))
    out[:-1, :-1] = prev.inverse
    out[-1, -1] = 1.0
    if delta != 0.0:
        # delta > 0; the outer product of one vector is bitwise symmetric
        u = np.sqrt(delta) * q
        out -= np.multiply.outer(u, u)
    return InverseState(t, out), q, delta


def inverse_chain(l: int, eta: float):
    """Yield ``InverseState`` for horizons ``3..l`` via the recursion."""
    _check_length(l)
    state = s3_inverse(eta)
    yield state
    for _ in range(4, l + 1):
        state, _, _ = woodbury_step(state, eta)
        yield state
