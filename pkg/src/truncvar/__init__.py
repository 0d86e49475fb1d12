"""Truncated variation of sampled paths: exact computation, lazy tube
approximants, closed-form constants for Brownian motion with drift and a
Monte Carlo harness for the small-threshold and large-time limit laws."""

from .asymptotics import (
    laplace_D,
    laplace_Z,
    m_mu_c,
    mean_renewal_time,
    mean_Z,
    n_mu_c,
    rho2_mu_c,
    sigma2_mu_c,
    var_large_time_tv,
)
from .engine import (
    CrossingDecomposition,
    LazyTube,
    TruncVarCurve,
    decompose,
    truncvar_curve,
    truncvar_total,
    tube_functions,
)
from .estimators import LazyTubeSmoother, TruncatedVariation
from .paths import (
    PathValidationError,
    SamplePath,
    brute_force_dtv,
    brute_force_tv,
    brute_force_utv,
    negate,
    restrict,
    time_change,
    total_variation,
    validate_path,
)

__version__ = "0.1.0"

__all__ = [
    "CrossingDecomposition",
    "LazyTube",
    "LazyTubeSmoother",
    "PathValidationError",
    "SamplePath",
    "TruncVarCurve",
    "TruncatedVariation",
    "brute_force_dtv",
    "brute_force_tv",
    "brute_force_utv",
    "decompose",
    "laplace_D",
    "laplace_Z",
    "m_mu_c",
    "mean_Z",
    "mean_renewal_time",
    "n_mu_c",
    "negate",
    "restrict",
    "rho2_mu_c",
    "sigma2_mu_c",
    "time_change",
    "total_variation",
    "truncvar_curve",
    "truncvar_total",
    "tube_functions",
    "validate_path",
    "var_large_time_tv",
]
