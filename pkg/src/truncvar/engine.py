"""Single-pass computation of truncated variation via crossing times.

The pass tracks the running minimum since the last completed downward
crossing and the running maximum since the last completed upward crossing.
An upward crossing ``T_U`` is recorded at the first sample where the value
sits at least ``c`` above the running minimum, a downward crossing ``T_D``
at the first sample at least ``c`` below the running maximum. Between
crossings the cumulative upward/downward truncated variation follows from
the completed extrema plus the current running extremum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .paths import SamplePath, check_threshold

__all__ = [
    "CrossingDecomposition",
    "TruncVarCurve",
    "LazyTube",
    "decompose",
    "truncvar_curve",
    "truncvar_total",
    "tube_functions",
    "orientation",
]


@dataclass(frozen=True, eq=False)
class CrossingDecomposition:
    """Alternating crossing times with the extrema between them.

    When ``flipped`` is true every quantity refers to ``-f``: the first
    ``c``-sized move of ``f`` was downward. ``local_mins[k]`` is the infimum
    on ``[T_D[k-1], T_U[k])`` and ``local_maxes[k]`` the supremum on
    ``[T_U[k], T_D[k])``; only completed phases are listed.
    """

    c: float
    flipped: bool
    up_index: np.ndarray
    down_index: np.ndarray
    up_times: np.ndarray
    down_times: np.ndarray
    local_mins: np.ndarray
    local_maxes: np.ndarray


@dataclass(frozen=True, eq=False)
class TruncVarCurve:
    times: np.ndarray
    utv: np.ndarray
    dtv: np.ndarray

    @property
    def tv(self) -> np.ndarray:
        return self.utv + self.dtv


@dataclass(frozen=True, eq=False)
class LazyTube:
    """Minimal-variation approximants of a path.

    ``g0`` starts at ``f(a)`` and stays within oscillation ``c`` of ``f``;
    ``g = g0 + alpha0`` stays within uniform distance ``c / 2``.
    """

    g0: np.ndarray
    g: np.ndarray
    alpha0: float


@numba.njit(cache=True)
def _orientation(v, c):
    # +1 when the first c-rise does not come after the first c-fall.
    lo = v[0]
    hi = v[0]
    for i in range(v.shape[0]):
        x = v[i]
        if x < lo:
            lo = x
        if x > hi:
            hi = x
        if x - lo >= c:
            return 1
        if hi - x >= c:
            return -1
    return 1


@numba.njit(cache=True)
def _sweep(w, c, utv, dtv, up_idx, down_idx, mins, maxes):
    """Run the crossing recursion on ``w`` (already oriented up-first).

    Fills the cumulative curves and the crossing arrays, returns the number
    of upward and downward crossings found.
    """
    n = w.shape[0]
    n_up = 0
    n_down = 0
    utv_done = 0.0
    dtv_done = 0.0
    lo = w[0]
    hi = w[0]
    m = 0.0
    big_m = 0.0
    # phase 0: before the first upward crossing; 1: rising; 2: falling
    phase = 0
    for i in range(n):
        x = w[i]
        if phase == 1:
            if hi - x >= c:
                big_m = hi
                utv_done += big_m - m - c
                down_idx[n_down] = i
                maxes[n_down] = big_m
                n_down += 1
                lo = x
                phase = 2
                utv[i] = utv_done
                dtv[i] = dtv_done + big_m - lo - c
            else:
                if x > hi:
                    hi = x
                utv[i] = utv_done + hi - m - c
                dtv[i] = dtv_done
        else:
            if x - lo >= c:
                m = lo
                if phase == 2:
                    dtv_done += big_m - m - c
                up_idx[n_up] = i
                mins[n_up] = m
                n_up += 1
                hi = x
                phase = 1
                utv[i] = utv_done + hi - m - c
                dtv[i] = dtv_done
            else:
                if x < lo:
                    lo = x
                utv[i] = utv_done
                if phase == 2:
                    dtv[i] = dtv_done + big_m - lo - c
                else:
                    dtv[i] = 0.0
    return n_up, n_down


def _run(values, c):
    v = np.ascontiguousarray(values, dtype=np.float64)
    sign = _orientation(v, c)
    w = v if sign > 0 else -v
    n = v.shape[0]
    utv = np.empty(n)
    dtv = np.empty(n)
    # Crossings alternate, so each kind occurs at most ceil(n / 2) times.
    size = n // 2 + 1
    up_idx = np.empty(size, dtype=np.int64)
    down_idx = np.empty(size, dtype=np.int64)
    mins = np.empty(size)
    maxes = np.empty(size)
    n_up, n_down = _sweep(w, c, utv, dtv, up_idx, down_idx, mins, maxes)
    if sign < 0:
        utv, dtv = dtv, utv
    return sign < 0, utv, dtv, up_idx[:n_up], down_idx[:n_down], mins[:n_up], maxes[:n_down]


def orientation(p: SamplePath, c) -> int:
    """``+1`` if the decomposition runs on ``f``, ``-1`` if on ``-f``."""
    c = check_threshold(c)
    return int(_orientation(np.ascontiguousarray(p.values), c))


def decompose(p: SamplePath, c) -> CrossingDecomposition:
    """Crossing times and local extrema of ``p`` at threshold ``c``."""
    c = check_threshold(c)
    flipped, _, _, up, down, mins, maxes = _run(p.values, c)
    return CrossingDecomposition(
        c=c,
        flipped=flipped,
        up_index=up,
        down_index=down,
        up_times=p.times[up],
        down_times=p.times[down],
        local_mins=mins,
        local_maxes=maxes,
    )


def truncvar_curve(p: SamplePath, c) -> TruncVarCurve:
    """Cumulative UTV^c, DTV^c (and TV^c) on ``[a; t]`` at every sample time."""
    c = check_threshold(c)
    _, utv, dtv, *_ = _run(p.values, c)
    return TruncVarCurve(p.times, utv, dtv)


def truncvar_total(p: SamplePath, c) -> tuple[float, float, float]:
    """``(UTV^c, DTV^c, TV^c)`` over the whole sampling interval."""
    curve = truncvar_curve(p, c)
    u = float(curve.utv[-1])
    d = float(curve.dtv[-1])
    return u, d, u + d


def tube_functions(p: SamplePath, c) -> LazyTube:
    """The lazy approximants ``g0`` (anchored at ``f(a)``) and ``g`` (centred)."""
    curve = truncvar_curve(p, c)
    f = p.values
    g0 = f[0] + curve.utv - curve.dtv
    gap = g0 - f
    lo = gap.min()
    alpha0 = float(-lo - 0.5 * (gap.max() - lo))
    return LazyTube(g0=g0, g=g0 + alpha0, alpha0=alpha0)
