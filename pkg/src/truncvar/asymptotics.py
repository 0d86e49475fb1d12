"""Closed-form constants for truncated variation of Brownian motion with drift.

All functions take the drift ``mu`` and threshold ``c > 0`` and depend on
them mostly through ``x = c * mu``. Near ``x = 0`` the direct formulas lose
digits to cancellation (or are 0/0), so for ``|x| < SERIES_CUTOFF`` they are
evaluated from their Taylor expansions in ``x`` instead.
"""

from __future__ import annotations

import math

__all__ = [
    "SERIES_CUTOFF",
    "m_mu_c",
    "n_mu_c",
    "sigma2_mu_c",
    "rho2_mu_c",
    "mean_renewal_time",
    "laplace_D",
    "laplace_phase",
    "laplace_Z",
    "mean_Z",
    "drift_ratio",
    "second_moment_X",
    "variance_rate",
    "var_large_time_tv",
    "constants",
]

# With expansions through x**10 the truncation error below the cutoff is
# < 1e-17 relative, and the direct branch above it loses < 1e-13.
SERIES_CUTOFF = 0.1


def _poly(x, coeffs):
    # coeffs in increasing powers of x
    acc = 0.0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


_XCOTH = (1.0, 0.0, 1 / 3, 0.0, -1 / 45, 0.0, 2 / 945, 0.0, -1 / 4725, 0.0, 2 / 93555)
_SINHC2 = (1.0, 0.0, 1 / 3, 0.0, 2 / 45, 0.0, 1 / 315, 0.0, 2 / 14175, 0.0, 2 / 467775)
_SIGMA2 = (1 / 3, 0.0, 4 / 15, 0.0, -4 / 63, 0.0, 8 / 675, 0.0, -4 / 2079, 0.0, 5528 / 19348875)
_RHO2 = (
    1 / 3, 1 / 3, 1 / 15, -2 / 45, -1 / 63, 2 / 315, 2 / 675,
    -4 / 4725, -1 / 2079, 2 / 18711, 1382 / 19348875, -2764 / 212837625,
)
_SINH2_EXCESS = (0.0, 4 / 3, 0.0, 4 / 15, 0.0, 8 / 315, 0.0, 4 / 2835, 0.0, 8 / 155925)
_VAR_TV = (2 / 3, 0.0, 34 / 45, 0.0, 76 / 945, 0.0, 34 / 4725, 0.0, 92 / 467775, 0.0, 10988 / 638512875)


def _check_c(c):
    c = float(c)
    if not c > 0 or not math.isfinite(c):
        raise ValueError(f"threshold c must be positive and finite, got {c}")
    return c


def _xcoth(x):
    if abs(x) < SERIES_CUTOFF:
        return _poly(x, _XCOTH)
    return x / math.tanh(x)


def _sinhc(x):
    # sinh(x) / x
    if abs(x) < SERIES_CUTOFF:
        return math.sqrt(_poly(x, _SINHC2))
    return math.sinh(x) / x


def m_mu_c(mu, c) -> float:
    """Long-run growth rate of TV^c: ``mu coth(c mu)``, ``1/c`` at ``mu = 0``."""
    c = _check_c(c)
    return _xcoth(c * mu) / c


def n_mu_c(mu, c) -> float:
    """Twice the long-run growth rate of UTV^c: ``mu coth(c mu) + mu``."""
    return m_mu_c(mu, c) + float(mu)


def sigma2_mu_c(mu, c) -> float:
    """Squared diffusion constant of TV^c over long horizons (1/3 at ``mu = 0``)."""
    c = _check_c(c)
    x = c * mu
    if abs(x) < SERIES_CUTOFF:
        return _poly(x, _SIGMA2)
    if abs(x) > 350:
        return 1.0
    return (2.0 - 2.0 * _xcoth(x)) / math.sinh(x) ** 2 + 1.0


def rho2_mu_c(mu, c) -> float:
    """Squared diffusion constant of UTV^c over long horizons (1/3 at ``mu = 0``).

    The downward counterpart uses ``rho2_mu_c(-mu, c)``.
    """
    c = _check_c(c)
    x = c * mu
    if abs(x) < SERIES_CUTOFF:
        return _poly(x, _RHO2)
    # 2 e^{4x} (sinh 2x - 2x) = e^{6x} - e^{2x} - 4x e^{4x}; scale by the
    # dominant exponential to avoid overflow.
    if x > 0:
        num = 1.0 - math.exp(-4 * x) - 4 * x * math.exp(-2 * x)
        return num / (-math.expm1(-2 * x)) ** 3
    num = math.exp(6 * x) - math.exp(2 * x) - 4 * x * math.exp(4 * x)
    return num / math.expm1(2 * x) ** 3


def mean_renewal_time(mu, c) -> float:
    """Mean duration between successive upward crossings: ``2 sinh(c mu)^2 / mu^2``."""
    c = _check_c(c)
    return 2.0 * c * c * _sinhc(c * mu) ** 2


def laplace_D(beta, mu, c) -> float:
    """``E exp(-beta D)`` for the renewal duration ``D``."""
    c = _check_c(c)
    beta = float(beta)
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0:
        if mu == 0:
            raise ValueError("beta = 0 and mu = 0 is degenerate; the value is 1 by continuity")
        return 1.0
    s = 2 * beta + mu * mu
    arg = 2 * c * math.sqrt(s)
    if arg > 700:
        return 0.0
    return s / (beta + mu * mu + beta * math.cosh(arg))


def laplace_phase(alpha, beta, mu, c, downward=False) -> float:
    """Joint transform of one crossing phase.

    Upward phase: ``E exp(alpha (M - m - c) - beta (T_D - T_U))``; with
    ``downward=True`` the phase ``[T_D, T_U')`` and the excess ``M - m' - c``,
    which has the law of the upward phase under drift ``-mu``.
    """
    c = _check_c(c)
    if downward:
        mu = -mu
    if beta < 0 or (beta == 0 and mu == 0):
        raise ValueError("need beta > 0, or beta = 0 with mu != 0")
    delta = math.sqrt(mu * mu + 2 * beta)
    if alpha >= delta / math.tanh(delta * c) - mu:
        raise ValueError("alpha outside the domain of the transform")
    # exp(-(alpha + mu) c) * exp(alpha c) = exp(-mu c)
    return delta * math.exp(-mu * c) / (
        delta * math.cosh(delta * c) - (alpha + mu) * math.sinh(delta * c)
    )


def laplace_Z(alpha, a, b, mu, c) -> float:
    """``E exp(alpha Z)`` for ``Z = a G + b H`` per renewal cycle (``mu != 0``).

    ``G`` is the TV^c increment and ``H`` the UTV^c minus DTV^c increment of a
    cycle. Valid while neither denominator factor changes sign between 0 and
    ``alpha``.
    """
    c = _check_c(c)
    if mu == 0:
        raise ValueError("laplace_Z requires mu != 0")
    x = c * mu
    f1 = 2 * mu - (a - b) * (-math.expm1(-2 * x)) * alpha
    f2 = 2 * mu + (a + b) * (-math.expm1(2 * x)) * alpha
    if f1 / mu <= 0 or f2 / mu <= 0:
        raise ValueError("alpha outside the domain of the transform")
    return 4 * mu * mu / (f1 * f2)


def mean_Z(a, b, mu, c) -> float:
    """``E Z = 2 sinh(c mu) (a cosh(c mu) + b sinh(c mu)) / mu``; ``2 a c`` at ``mu = 0``."""
    c = _check_c(c)
    x = c * mu
    return 2 * c * _sinhc(x) * (a * math.cosh(x) + b * math.sinh(x))


def drift_ratio(a, b, mu, c) -> float:
    """``E Z / E D = mu (b + a coth(c mu))``."""
    c = _check_c(c)
    return a * _xcoth(c * mu) / c + b * mu


def _var_tv_scaled(x):
    # (3 + cosh 2x - 4x coth x) / x^2
    if abs(x) < SERIES_CUTOFF:
        return _poly(x, _VAR_TV)
    return (3 + math.cosh(2 * x) - 4 * _xcoth(x)) / (x * x)


def _sinh2_excess(x):
    # (sinh 2x - 2x) / x^2
    if abs(x) < SERIES_CUTOFF:
        return _poly(x, _SINH2_EXCESS)
    return (math.sinh(2 * x) - 2 * x) / (x * x)


def second_moment_X(a, b, mu, c) -> float:
    """``E X^2`` for the centred cycle variable ``X = Z - (E Z / E D) D``.

    Equals ``(3a^2 - b^2 - 4abx + (a^2 + b^2) cosh 2x - 4a^2 x coth x
    + 2ab sinh 2x) / mu^2`` with ``x = c mu``.
    """
    c = _check_c(c)
    x = c * mu
    return c * c * (
        a * a * _var_tv_scaled(x) + 2 * b * b * _sinhc(x) ** 2 + 2 * a * b * _sinh2_excess(x)
    )


def variance_rate(a, b, mu, c) -> float:
    """``E X^2 / E D``: variance per unit time of ``a TV^c + b X``-type sums."""
    return second_moment_X(a, b, mu, c) / mean_renewal_time(mu, c)


def var_large_time_tv(mu, c) -> float:
    """Variance of the centred TV^c cycle variable: ``(3 + cosh 2x - 4x coth x) / mu^2``."""
    c = _check_c(c)
    return c * c * _var_tv_scaled(c * mu)


def constants(mu, c) -> dict:
    """The labelled constants printed by the ``constants`` subcommand."""
    return {
        "m": m_mu_c(mu, c),
        "n": n_mu_c(mu, c),
        "n_neg": n_mu_c(-mu, c),
        "sigma2": sigma2_mu_c(mu, c),
        "rho2": rho2_mu_c(mu, c),
        "rho2_neg": rho2_mu_c(-mu, c),
        "mean_D": mean_renewal_time(mu, c),
        "mean_Z": mean_Z(1.0, 0.0, mu, c),
        "var_X": var_large_time_tv(mu, c),
    }
