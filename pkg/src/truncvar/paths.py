"""Sampled paths, elementary functionals and brute-force oracles.

A :class:`SamplePath` stands for the piecewise-constant right-continuous
extension ``f(t) = values[i]`` for ``t`` in ``[times[i], times[i+1])``. Under
that reading every supremum over partitions of ``[a; b]`` is attained on
sample indices, so the quadratic dynamic programs below are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PathValidationError",
    "SamplePath",
    "validate_path",
    "check_threshold",
    "total_variation",
    "brute_force_tv",
    "brute_force_utv",
    "brute_force_dtv",
    "brute_force_tv_prefix",
    "brute_force_utv_prefix",
    "brute_force_dtv_prefix",
    "negate",
    "restrict",
    "time_change",
]


class PathValidationError(ValueError):
    """Raised when times/values do not describe a valid sampled path."""


@dataclass(frozen=True, eq=False)
class SamplePath:
    """Strictly time-ordered finite sample of a real-valued path.

    Build instances through :func:`validate_path`; the constructor does not
    re-check invariants.
    """

    times: np.ndarray
    values: np.ndarray

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return self.values.shape[0]


def _as_1d(x, name):
    arr = np.array(x, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise PathValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def validate_path(times, values) -> SamplePath:
    """Check and freeze a ``(times, values)`` pair into a :class:`SamplePath`.

    Raises
    ------
    PathValidationError
        On empty input, length mismatch, non-finite entries or times that
        are not strictly increasing.
    """
    t = _as_1d(times, "times")
    v = _as_1d(values, "values")
    if t.size == 0:
        raise PathValidationError("path must contain at least one sample")
    if t.size != v.size:
        raise PathValidationError(
            f"times and values differ in length ({t.size} != {v.size})"
        )
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
        raise PathValidationError("times and values must be finite")
    dt = np.diff(t)
    if np.any(dt == 0):
        raise PathValidationError("duplicate time stamp")
    if np.any(dt < 0):
        raise PathValidationError("times not increasing")
    t.flags.writeable = False
    v.flags.writeable = False
    return SamplePath(t, v)


def check_threshold(c, *, strict=True) -> float:
    """Return ``c`` as a float, rejecting negative (or, if ``strict``, zero) values."""
    c = float(c)
    if not np.isfinite(c):
        raise ValueError(f"threshold must be finite, got {c}")
    if strict and c <= 0:
        raise ValueError(f"threshold must be positive, got {c}")
    if c < 0:
        raise ValueError(f"threshold must be nonnegative, got {c}")
    return c


def total_variation(p: SamplePath) -> float:
    """Sum of absolute increments."""
    return float(np.sum(np.abs(np.diff(p.values))))


def _phi(x, c):
    return np.maximum(x - c, 0.0)


# The prefix oracles return one entry per sample index: the functional on
# [a; times[i]]. The *_multi variants evaluate several thresholds at once
# (rows of the result) to amortize the Python loop.


def _tv_prefix_multi(v, cs):
    cs = np.asarray(cs, dtype=np.float64)[:, None]
    n = v.size
    best = np.zeros((cs.shape[0], n))
    for i in range(1, n):
        best[:, i] = np.max(best[:, :i] + _phi(np.abs(v[i] - v[:i]), cs), axis=1)
    return np.maximum.accumulate(best, axis=1)


def _utv_prefix_multi(v, cs):
    cs = np.asarray(cs, dtype=np.float64)[:, None]
    n = v.size
    # shifted[:, j] holds A[j - 1], with A[-1] = 0.
    shifted = np.zeros((cs.shape[0], n + 1))
    for i in range(1, n):
        gain = np.max(shifted[:, :i] + _phi(v[i] - v[:i], cs), axis=1)
        shifted[:, i + 1] = np.maximum(shifted[:, i], gain)
    return shifted[:, 1:]


def brute_force_tv_prefix(p: SamplePath, c) -> np.ndarray:
    """TV^c on every prefix by the O(n^2) partition dynamic program.

    ``best[i]`` is the largest truncated sum over index chains ending at
    ``i``; the prefix value is the running maximum of ``best``.
    """
    c = check_threshold(c, strict=False)
    return _tv_prefix_multi(p.values, [c])[0]


def brute_force_utv_prefix(p: SamplePath, c) -> np.ndarray:
    """UTV^c on every prefix by the O(n^2) disjoint-pairs dynamic program.

    ``A[i] = max(A[i-1], max_{j<i} A[j-1] + phi_c(v[i] - v[j]))``.
    """
    c = check_threshold(c, strict=False)
    return _utv_prefix_multi(p.values, [c])[0]


def brute_force_dtv_prefix(p: SamplePath, c) -> np.ndarray:
    return brute_force_utv_prefix(negate(p), c)


def brute_force_tv(p: SamplePath, c) -> float:
    """Exact TV^c of ``p``; O(n^2) time."""
    return float(brute_force_tv_prefix(p, c)[-1])


def brute_force_utv(p: SamplePath, c) -> float:
    """Exact UTV^c of ``p``; O(n^2) time."""
    return float(brute_force_utv_prefix(p, c)[-1])


def brute_force_dtv(p: SamplePath, c) -> float:
    """Exact DTV^c of ``p``, computed as UTV^c of the negated path."""
    return brute_force_utv(negate(p), c)


def negate(p: SamplePath) -> SamplePath:
    return validate_path(p.times, -p.values)


def restrict(p: SamplePath, start, end) -> SamplePath:
    """Keep the samples whose times lie in the closed interval ``[start, end]``."""
    mask = (p.times >= start) & (p.times <= end)
    if not np.any(mask):
        raise PathValidationError(f"no samples in [{start}, {end}]")
    return validate_path(p.times[mask], p.values[mask])


def time_change(p: SamplePath, new_times) -> SamplePath:
    """Relabel sample times by a strictly increasing map, values untouched.

    ``new_times`` may be a callable applied to ``p.times`` or the sequence
    of replacement times itself.
    """
    if callable(new_times):
        new_times = new_times(p.times)
    new_times = np.asarray(new_times, dtype=np.float64)
    if new_times.shape != p.times.shape:
        raise PathValidationError("replacement times must match the number of samples")
    if np.any(np.diff(new_times) <= 0):
        raise PathValidationError("replacement times must be strictly increasing")
    return validate_path(new_times, p.values)
