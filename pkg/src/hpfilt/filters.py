"""
Hodrick-Prescott filter family.

``hp_direct``
    Two-sided HP filter, solved densely.  Reference for everything else.
``IncrementalHpState`` / ``incr_init`` / ``incr_step``
    The same trend, grown one observation at a time with a Woodbury update
    of ``S_t^{-1}``.
``bhp``
    Boosted HP: apply the HP cycle map ``n`` times.
``ohp``
    One-sided HP: the trend at ``t`` is the end point of the HP trend fitted
    to ``y[:t]``.
``sohp``
    Successive one-sided HP: run ``ohp`` on the residual cycle again and
    again, sum the stage trends, and stop where the SI index is smallest.

All filters are linear in ``y``.  A :class:`Decomposition` always satisfies
``cycle == y - trend`` elementwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from ._kernels import incremental_pass
from .exceptions import (DegenerateSeriesError, DimensionError,
                         ParameterError, StateError)

__all__ = [
    "FilterConfig",
    "Decomposition",
    "IncrementalHpState",
    "SohpResult",
    "TraceCache",
    "hp_direct",
    "hp_incremental",
    "incr_init",
    "incr_step",
    "bhp",
    "ohp",
    "sohp",
    "sohp_stages",
    "build_trace_cache",
    "si_value",
    "cycle_moments",
]

MONTHLY_SMOOTHING = 14400.0

# ||c^{O(1)}||_1 below this fraction of ||y||_1 counts as "already a trend"
DEGENERATE_RTOL = 1e-12


def _as_series(y, min_length=3) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise DimensionError("expected a 1-d series")
    if y.size < min_length:
        raise DimensionError(
            f"need at least {min_length} observations, got {y.size}")
    return y


def _check_smoothing(eta):
    if not eta >= 0:
        raise ParameterError(f"smoothing parameter must be >= 0, got {eta!r}")
    return float(eta)


@dataclass(frozen=True)
class FilterConfig:
    """Settings shared by the CLI and :func:`sohp`."""

    smoothing: float = MONTHLY_SMOOTHING
    max_iterations: int = 20
    si_horizon_start: int = 3

    def __post_init__(self):
        _check_smoothing(self.smoothing)
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1")
        if self.si_horizon_start < 3:
            raise ParameterError("si_horizon_start must be >= 3")


@dataclass(frozen=True)
class Decomposition:
    observations: np.ndarray
    trend: np.ndarray
    cycle: np.ndarray

    @classmethod
    def from_trend(cls, y, trend) -> "Decomposition":
        y = np.asarray(y, dtype=float)
        trend = np.asarray(trend, dtype=float)
        return cls(y, trend, y - trend)

    def __len__(self):
        return self.observations.size


# ---------------------------------------------------------------------------
# two-sided filter


def hp_direct(y, eta: float) -> Decomposition:
    """
    Two-sided HP filter by a dense Cholesky factorization of ``S_l``.

    Parameters
    ----------
    y : array_like
        Series of length ``l >= 3``.
    eta : float
        Smoothing parameter (``>= 0``).  14400 is customary for monthly data,
        1600 for quarterly.

    Returns
    -------
    Decomposition
    """
    y = _as_series(y)
    eta = _check_smoothing(eta)
    solve = linalg.DenseSpdSolver(linalg.penalty_matrix(y.size, eta))
    return Decomposition.from_trend(y, _hp_trend(solve, y, eta))


def _hp_trend(solve, y, eta):
    # S^{-1} y written as y - S^{-1}(eta F'F y): the solve only sees the
    # second differences, so the level of y never enters the rounding error
    # and affine inputs come back exactly.
    if eta == 0:
        return y.copy()
    rhs = eta * linalg.second_diff_adjoint(linalg.second_diff_apply(y))
    return y - solve(rhs)


def hp_incremental(y, eta: float) -> Decomposition:
    """Two-sided HP trend computed by one O(l^2) pass of the recursion."""
    y = _as_series(y)
    trend, _ = _run_pass(y, _check_smoothing(eta))
    return Decomposition.from_trend(y, trend)


# ---------------------------------------------------------------------------
# incremental recursion


@dataclass
class IncrementalHpState:
    """
    State of the expanding-window HP recursion at horizon ``t``.

    ``inverse`` is the dense ``S_t^{-1}`` when the state was created with
    ``track_inverse=True``; otherwise it is ``None`` and only the last two
    columns (``tail``, shape ``(t, 2)``) are kept, which is all the trend
    update needs.
    """

    smoothing: float
    observations: np.ndarray
    trend: np.ndarray
    cycle: np.ndarray
    tail: np.ndarray
    inverse: linalg.InverseState | None = None
    last_delta: float = float("nan")
    last_q: np.ndarray | None = field(default=None, repr=False)

    @property
    def horizon(self) -> int:
        return self.trend.size

    def extend(self, values) -> "IncrementalHpState":
        """Append several observations in order."""
        state = self
        for v in np.asarray(values, dtype=float).ravel():
            state = incr_step(state, v, self.smoothing)
        return state


def _c3_weight(y1, y2, y3, eta):
    # (I - S_3^{-1}) y = eta*(y1 - 2y2 + y3)/(6eta + 1) * [1, -2, 1]
    return eta * (y1 - 2.0 * y2 + y3) / (6.0 * eta + 1.0)


def _seed_trend(y3: np.ndarray, eta: float) -> np.ndarray:
    w = _c3_weight(y3[0], y3[1], y3[2], eta)
    return y3 - w * np.array([1.0, -2.0, 1.0])


def incr_init(y1: float, y2: float, y3: float, eta: float,
              track_inverse: bool = True) -> IncrementalHpState:
    """
    Start the recursion from the first three observations.

    The horizon-3 trend is ``S_3^{-1} y``, evaluated in the equivalent form
    ``y - w * [1, -2, 1]`` so that affine inputs come back unchanged.
    """
    eta = _check_smoothing(eta)
    y = np.array([y1, y2, y3], dtype=float)
    inv = linalg.s3_inverse(eta)
    g = _seed_trend(y, eta)
    return IncrementalHpState(
        smoothing=eta,
        observations=y,
        trend=g,
        cycle=y - g,
        tail=inv.inverse[:, -2:].copy(),
        inverse=inv if track_inverse else None,
    )


def incr_step(state: IncrementalHpState, y_t: float,
              eta: float | None = None) -> IncrementalHpState:
    """
    Advance ``state`` from horizon ``t-1`` to ``t`` by appending ``y_t``.

    The new trend is ``[g_{t-1}; y_t] - delta_t * s * q_t`` with innovation
    ``s = g_{t-2} - 2 g_{t-1} + y_t``.
    """
    if eta is None:
        eta = state.smoothing
    elif float(eta) != state.smoothing:
        raise StateError(
            f"state was built with eta={state.smoothing}, step called with {eta}")
    m = state.horizon
    if m < 3 or state.observations.size != m or state.tail.shape != (m, 2):
        raise StateError(f"inconsistent state at horizon {m}")
    if state.inverse is not None and state.inverse.horizon != m:
        raise StateError(
            f"inverse at horizon {state.inverse.horizon}, trend at {m}")

    if state.inverse is not None:
        inverse, q, delta = linalg.woodbury_step(state.inverse, eta)
        tail = inverse.inverse[:, -2:].copy()
    else:
        inverse = None
        q = linalg.woodbury_q(state.tail)
        delta = linalg.woodbury_delta(q, eta)
        tail = np.empty((m + 1, 2))
        tail[:m, 0] = state.tail[:, 1]
        tail[m, 0] = 0.0
        tail[:, 1] = 0.0
        tail[m, 1] = 1.0
        tail -= np.multiply.outer(q, delta * q[-2:])

    g_prev = state.trend
    s = g_prev[-2] - 2.0 * g_prev[-1] + y_t
    y = np.append(state.observations, y_t)
    g = np.append(g_prev, y_t) - (delta * s) * q
    return IncrementalHpState(
        smoothing=state.smoothing,
        observations=y,
        trend=g,
        cycle=y - g,
        tail=tail,
        inverse=inverse,
        last_delta=delta,
        last_q=q,
    )


def _run_pass(y: np.ndarray, eta: float):
    """Full-sample trend and one-sided end points from the compiled pass."""
    return incremental_pass(y, eta)


# ---------------------------------------------------------------------------
# boosted and one-sided filters


def bhp(y, eta: float, n: int) -> Decomposition:
    """
    Boosted HP filter: the cycle after ``n`` rounds is ``(I - S^{-1})^n y``.

    ``S`` is factored once; each round solves against the current residual.
    The trend is accumulated as the sum of the per-round trends, so
    ``bhp(y, eta, 1)`` is bit-identical to ``hp_direct(y, eta)``.
    """
    y = _as_series(y)
    if int(n) != n or n < 1:
        raise ParameterError(f"number of boosting rounds must be >= 1, got {n!r}")
    eta = _check_smoothing(eta)
    solve = linalg.DenseSpdSolver(linalg.penalty_matrix(y.size, eta))
    residual = y
    trend = None
    for _ in range(int(n)):
        extracted = _hp_trend(solve, residual, eta)
        trend = extracted if trend is None else trend + extracted
        residual = residual - extracted
    return Decomposition.from_trend(y, trend)


def ohp(y, eta: float) -> np.ndarray:
    """
    One-sided HP trend.

    ``trend[t-1]`` is the last entry of the HP trend fitted to ``y[:t]``.
    With fewer than three points there is nothing to penalize, so the first
    two entries equal the observations.  One O(l^2) pass of the recursion.
    """
    y = _as_series(y, min_length=1)
    eta = _check_smoothing(eta)
    if y.size < 3:
        return y.copy()
    _, ends = _run_pass(y, eta)
    return ends


# ---------------------------------------------------------------------------
# SI criterion


@dataclass
class TraceCache:
    """
    Eigenvalues of ``B_t = I_t - S_t^{-1}`` for ``t = 3..length``.

    With ``mu`` the eigenvalues of ``B_t``,
    ``tr(I_t - B_t^n) = t - sum(mu**n)`` and ``tr(B_t) = sum(mu)``, so the
    trace part of SI costs O(l^2) per ``n`` once the cache exists.
    """

    length: int
    smoothing: float
    eigenvalues: list
    base_traces: np.ndarray
    _ratio_means: dict = field(default_factory=dict, repr=False)

    def horizons(self) -> range:
        return range(3, self.length + 1)

    def power_trace(self, t: int, n: int) -> float:
        """``tr(M_t^{(n)}) = tr(I_t - (I_t - S_t^{-1})^n)``."""
        mu = self.eigenvalues[t - 3]
        return t - float(np.sum(mu ** n))

    def trace_term(self, n: int, start: int = 3) -> float:
        """Mean over ``t = start..length`` of ``tr(M_t^{(n)}) / tr(B_t)``."""
        key = (n, start)
        if key not in self._ratio_means:
            if self.smoothing == 0:
                value = 0.0
            else:
                ratios = [self.power_trace(t, n) / self.base_traces[t - 3]
                          for t in range(start, self.length + 1)]
                value = float(np.mean(ratios))
            self._ratio_means[key] = value
        return self._ratio_means[key]


def build_trace_cache(l: int, eta: float) -> TraceCache:
    """
    Eigen-decompose ``I_t - S_t^{-1}`` for every horizon ``t = 3..l``.

    The inverses come from the Woodbury chain.  Cost is dominated by the
    symmetric eigensolver, roughly ``sum t^3``; about 20 s at ``l = 885``.
    """
    if l < 3:
        raise DimensionError(f"need at least 3 observations, got {l}")
    eta = _check_smoothing(eta)
    eigs = []
    traces = np.empty(l - 2)
    for state in linalg.inverse_chain(l, eta):
        t = state.horizon
        B = np.eye(t) - state.inverse
        # the two-dimensional affine null space gives mu = 0 up to rounding
        mu = np.clip(np.linalg.eigvalsh(B), 0.0, None)
        eigs.append(mu)
        traces[t - 3] = mu.sum()
    return TraceCache(l, eta, eigs, traces)


def si_value(n: int, c_first, c_nth, cache: TraceCache, start: int = 3) -> float:
    """
    SI stopping index for ``n`` stages.

    ``||c_nth||_1 / ||c_first||_1`` plus the mean trace ratio from ``cache``.
    Raises :class:`DegenerateSeriesError` if ``c_first`` is identically zero.
    """
    c_first = np.asarray(c_first, dtype=float)
    c_nth = np.asarray(c_nth, dtype=float)
    if c_first.shape != (cache.length,) or c_nth.shape != (cache.length,):
        raise DimensionError(
            f"cycles must have length {cache.length} to match the cache")
    if n < 1:
        raise ParameterError("n must be >= 1")
    base = np.abs(c_first).sum()
    if base == 0:
        raise DegenerateSeriesError("first-stage cycle is identically zero")
    return float(np.abs(c_nth).sum() / base) + cache.trace_term(n, start)


# ---------------------------------------------------------------------------
# successive one-sided filter


@dataclass
class SohpResult:
    observations: np.ndarray
    stage_trends: list
    cumulative_trend: np.ndarray
    final_cycle: np.ndarray
    chosen_n: int
    si_values: list
    degenerate: bool = False

    @property
    def decomposition(self) -> Decomposition:
        return Decomposition(self.observations, self.cumulative_trend,
                             self.final_cycle)


def sohp_stages(y, eta: float, n: int):
    """
    Stage trends and stage cycles of ``n`` successive one-sided passes.

    For a fixed ``n`` this is a linear map of ``y``; :func:`sohp` only adds
    the data-dependent choice of ``n``.
    """
    y = _as_series(y)
    eta = _check_smoothing(eta)
    trends, cycles = [], []
    cycle = y
    for _ in range(n):
        g = ohp(cycle, eta)
        cycle = cycle - g
        trends.append(g)
        cycles.append(cycle)
    return trends, cycles


def sohp(y, eta: float = MONTHLY_SMOOTHING, config: FilterConfig | None = None,
         cache: TraceCache | None = None) -> SohpResult:
    """
    Successive one-sided HP filter.

    Stage 1 is ``ohp(y)``; stage ``i+1`` is ``ohp`` of the stage-``i``
    residual.  SI is probed for ``n = 1..config.max_iterations`` and the
    smallest value wins (ties go to the smaller ``n``).  The trend is the
    sum of the first ``chosen_n`` stage trends.

    A series whose first-stage cycle is (numerically) zero is flagged
    ``degenerate`` and returned at ``n = 1`` without SI values.

    ``cache`` may be passed to reuse eigenvalues across calls with the same
    length and smoothing.
    """
    y = _as_series(y)
    eta = _check_smoothing(eta)
    if config is None:
        config = FilterConfig(smoothing=eta)
    elif config.smoothing != eta:
        raise ParameterError(
            f"config smoothing {config.smoothing} differs from eta {eta}")

    first_trend = ohp(y, eta)
    first_cycle = y - first_trend
    base = np.abs(first_cycle).sum()
    if base == 0 or base <= DEGENERATE_RTOL * np.abs(y).sum():
        return SohpResult(y, [first_trend], first_trend.copy(), y - first_trend,
                          1, [], degenerate=True)

    if cache is None:
        cache = build_trace_cache(y.size, eta)
    elif cache.length != y.size or cache.smoothing != eta:
        raise ParameterError("trace cache was built for a different (l, eta)")

    trends, cycles = sohp_stages(y, eta, config.max_iterations)
    si = [si_value(n, first_cycle, c, cache, config.si_horizon_start)
          for n, c in enumerate(cycles, start=1)]

    chosen = int(np.argmin(si)) + 1  # argmin returns the first minimum
    stages = trends[:chosen]
    total = stages[0].copy()
    for g in stages[1:]:
        total += g
    return SohpResult(y, stages, total, y - total, chosen, si)


def cycle_moments(cycle) -> dict:
    """Mean plus population and sample variance of a cycle series."""
    c = np.asarray(cycle, dtype=float)
    return {
        "mean": float(c.mean()),
        "variance_population": float(c.var(ddof=0)),
        "variance_sample": float(c.var(ddof=1)) if c.size > 1 else float("nan"),
    }
