"""Reproducible Brownian-with-drift and diffusion paths on uniform grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .paths import SamplePath

__all__ = [
    "ALGORITHM_ID",
    "GridSpec",
    "DiffusionSpec",
    "RngSeed",
    "bm_drift",
    "ou",
    "bounded_sine",
    "gaussian_increments",
    "sample_bm_drift",
    "sample_diffusion_euler",
    "quadratic_variation_grid",
]

# numpy's PCG64 bit generator, Gaussians by numpy's ziggurat transform,
# one child SeedSequence per path index.
ALGORITHM_ID = "numpy-pcg64-ziggurat-v1"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``0, dt, 2 dt, ...`` on ``[0, horizon]``.

    When ``horizon / dt`` is not an integer the last step is shortened so
    the grid ends exactly at ``horizon``.
    """

    horizon: float
    dt: float

    def __post_init__(self):
        if not (self.dt > 0 and self.horizon > 0):
            raise ValueError("horizon and dt must be positive")
        if self.dt > self.horizon:
            raise ValueError("dt must not exceed the horizon")

    @property
    def n_steps(self) -> int:
        # 1e-9 guards against T/dt landing a hair above an integer.
        return math.ceil(self.horizon / self.dt - 1e-9)

    def times(self) -> np.ndarray:
        t = np.arange(self.n_steps + 1, dtype=np.float64) * self.dt
        t[-1] = self.horizon
        return t


@dataclass(frozen=True)
class RngSeed:
    seed: int
    algorithm_id: str = ALGORITHM_ID

    def generator(self, index=None) -> np.random.Generator:
        """Generator for the path with the given index (``None``: the root stream)."""
        if self.algorithm_id != ALGORITHM_ID:
            raise ValueError(f"unsupported PRNG algorithm {self.algorithm_id!r}")
        ss = np.random.SeedSequence(self.seed)
        if index is not None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(int(index),))
        return np.random.Generator(np.random.PCG64(ss))


_FAMILIES = {"bm_drift": ("mu",), "ou": ("theta", "mean"), "bounded_sine": ("sigma0", "eps", "mu")}


@dataclass(frozen=True)
class DiffusionSpec:
    """``dX = sigma(X) dW + drift(X) dt`` with ``X_0 = 0``.

    Families
    --------
    bm_drift(mu)
        ``sigma = 1``, ``drift = mu``.
    ou(theta, mean)
        ``sigma = 1``, ``drift(x) = theta * (mean - x)``.
    bounded_sine(sigma0, eps, mu)
        ``sigma(x) = sigma0 + eps * sin(x)`` with ``0 <= eps < sigma0``,
        ``drift = mu``.
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown diffusion family {self.family!r}")
        names = _FAMILIES[self.family]
        missing = [k for k in names if k not in self.params]
        extra = [k for k in self.params if k not in names]
        if missing or extra:
            raise ValueError(
                f"{self.family} takes parameters {names}, got {tuple(self.params)}"
            )
        for k, x in self.params.items():
            if not math.isfinite(float(x)):
                raise ValueError(f"parameter {k} must be finite")
        if self.family == "bounded_sine":
            s0, eps = float(self.params["sigma0"]), float(self.params["eps"])
            if s0 <= 0:
                raise ValueError("sigma0 must be positive")
            if not 0 <= abs(eps) < s0:
                raise ValueError("bounded_sine needs |eps| < sigma0 so that sigma stays positive")

    @property
    def sigma_bounds(self) -> tuple[float, float]:
        if self.family == "bounded_sine":
            s0, eps = float(self.params["sigma0"]), abs(float(self.params["eps"]))
            return s0 - eps, s0 + eps
        return 1.0, 1.0

    def sigma(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.family == "bounded_sine":
            return self.params["sigma0"] + self.params["eps"] * np.sin(x)
        return np.ones_like(x)

    def drift(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.family == "ou":
            return self.params["theta"] * (self.params["mean"] - x)
        return np.full_like(x, float(self.params["mu"]))

    def _coefficients(self):
        # (kind, sigma0, eps, drift constant, mean-reversion rate, level)
        p = {k: float(x) for k, x in self.params.items()}
        if self.family == "bm_drift":
            return 0, 1.0, 0.0, p["mu"], 0.0, 0.0
        if self.family == "ou":
            return 1, 1.0, 0.0, 0.0, p["theta"], p["mean"]
        return 2, p["sigma0"], p["eps"], p["mu"], 0.0, 0.0


def bm_drift(mu=0.0) -> DiffusionSpec:
    return DiffusionSpec("bm_drift", {"mu": mu})


def ou(theta=1.0, mean=0.0) -> DiffusionSpec:
    return DiffusionSpec("ou", {"theta": theta, "mean": mean})


def bounded_sine(sigma0=1.0, eps=0.25, mu=0.0) -> DiffusionSpec:
    return DiffusionSpec("bounded_sine", {"sigma0": sigma0, "eps": eps, "mu": mu})


def gaussian_increments(grid: GridSpec, seed: RngSeed, index=None) -> np.ndarray:
    """Brownian increments ``dW_k ~ N(0, t_{k+1} - t_k)`` for one path."""
    z = seed.generator(index).standard_normal(grid.n_steps)
    return z * np.sqrt(np.diff(grid.times()))


@numba.njit(cache=True)
def _euler(dw, dt, kind, s0, eps, mu, theta, level):
    n = dw.shape[0]
    x = np.empty(n + 1)
    x[0] = 0.0
    for k in range(n):
        xk = x[k]
        if kind == 0:
            step = dw[k] + mu * dt[k]
        elif kind == 1:
            step = dw[k] + theta * (level - xk) * dt[k]
        else:
            step = (s0 + eps * math.sin(xk)) * dw[k] + mu * dt[k]
        x[k + 1] = xk + step
    return x


def sample_bm_drift(mu, grid: GridSpec, seed: RngSeed, index=None) -> SamplePath:
    """``X_t = W_t + mu t`` sampled on ``grid``; path ``index`` of the seed's stream."""
    dw = gaussian_increments(grid, seed, index)
    t = grid.times()
    x = np.empty(t.size)
    x[0] = 0.0
    np.cumsum(dw + float(mu) * np.diff(t), out=x[1:])
    return SamplePath(t, x)


def sample_diffusion_euler(spec: DiffusionSpec, grid: GridSpec, seed: RngSeed, index=None) -> SamplePath:
    """Euler-Maruyama path of ``spec`` started at 0."""
    dw = gaussian_increments(grid, seed, index)
    t = grid.times()
    x = _euler(dw, np.diff(t), *spec._coefficients())
    return SamplePath(t, x)


def quadratic_variation_grid(spec: DiffusionSpec, p: SamplePath) -> np.ndarray:
    """Left Riemann sums of ``sigma(X)^2`` along ``p``: the clock ``<X>_t`` on the grid."""
    if spec.family != "bounded_sine":
        return p.times - p.times[0]
    qv = np.zeros(len(p))
    s2 = spec.sigma(p.values[:-1]) ** 2
    np.cumsum(s2 * np.diff(p.times), out=qv[1:])
    return qv

