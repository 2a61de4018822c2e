"""Expectile estimation at intermediate levels and Weissman-type extrapolation.

Two intermediate estimators are provided: the direct least asymmetrically
weighted squares (LAWS) expectile and the quantile-based (QB) one, which
rescales an empirical quantile by ``(1/gamma - 1)**(-gamma)``. Either is
pushed to an extreme level with :func:`extrapolate`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ConvergenceError,
    DataError,
    Level,
    NumericalError,
    Series,
    TailFit,
    empirical_quantile,
    tail_count,
)
from .tailindex import hill

__all__ = [
    "ExpectileConfig",
    "ExtrapolationSpec",
    "foc_residual",
    "laws_expectile",
    "qb_expectile",
    "extrapolate",
    "weissman_quantile",
    "tau_prime_hat",
    "composite_laws",
    "composite_laws_via_alpha",
    "composite_qb",
]


@dataclass(frozen=True)
class ExpectileConfig:
    max_iter: int = 100
    tol: float = 1e-10

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


DEFAULT_CONFIG = ExpectileConfig()


@dataclass(frozen=True)
class ExtrapolationSpec:
    """Move an estimate from ``tau_n`` to ``tau_prime`` using tail index ``gamma``.

    ``tau_prime == tau_n`` is allowed and leaves the base unchanged.
    """

    tau_n: Level
    tau_prime: Level
    gamma: TailFit

    def __post_init__(self):
        if self.tau_prime.tail > self.tau_n.tail:
            raise ValueError("extreme level must not lie below the intermediate level")

    @property
    def factor(self) -> float:
        return (self.tau_prime.tail / self.tau_n.tail) ** (-self.gamma.gamma)


def foc_residual(y: np.ndarray, theta: float, tau: float) -> float:
    """Normalised first-order-condition residual of the expectile problem.

    ``|tau sum (y - theta)_+ - (1 - tau) sum (theta - y)_+| / sum |y - theta|``
    """
    diff = y - theta
    pos = diff[diff > 0].sum()
    neg = -diff[diff < 0].sum()
    total = pos + neg
    if total == 0.0:
        return 0.0
    return abs(tau * pos - (1.0 - tau) * neg) / total


def laws_expectile(s: Series, tau: Level, cfg: ExpectileConfig = DEFAULT_CONFIG) -> float:
    """Empirical expectile by iteratively reweighted least squares.

    Starts at the sample mean and iterates ``theta <- sum(w y) / sum(w)``
    with ``w = 1 - tau`` below ``theta`` and ``tau`` above it. Each
    update solves the first-order condition exactly for the current
    split of the sample, so the loop ends once the split stops moving.

    Raises:
        ConvergenceError: if ``cfg.max_iter`` updates do not bring the
            relative change below ``cfg.tol``.
    """
    if s.n < 2:
        raise DataError("expectile estimation needs at least 2 observations")
    y = s.sorted
    if y[0] == y[-1]:
        return float(y[0])
    t = tau.tau
    # 1 - tau from the stored tail keeps full precision for tau close to 1
    lo_w, hi_w = tau.tail, t
    scale = max(float(y[-1] - y[0]), np.finfo(float).tiny)
    theta = float(np.mean(y))
    for _ in range(cfg.max_iter):
        j = int(np.searchsorted(y, theta, side="right"))
        num = lo_w * y[:j].sum() + hi_w * y[j:].sum()
        den = lo_w * j + hi_w * (s.n - j)
        new = num / den
        step = abs(new - theta)
        theta = new
        if step <= cfg.tol * max(abs(theta), scale):
            break
    else:
        raise ConvergenceError(
            "LAWS expectile did not converge", theta, foc_residual(y, theta, t)
        )
    residual = foc_residual(y, theta, t)
    if residual >= 10 * cfg.tol:
        raise ConvergenceError("LAWS expectile first-order condition not met", theta, residual)
    return float(theta)


def qb_expectile(s: Series, tau: Level, gamma: TailFit) -> float:
    """Quantile-based expectile ``(1/gamma - 1)**(-gamma) * q_tau``."""
    g = gamma.gamma
    if not 0.0 < g < 1.0:
        raise NumericalError("proportionality constant undefined")
    return (1.0 / g - 1.0) ** (-g) * empirical_quantile(s, tau)


def extrapolate(base: float, spec: ExtrapolationSpec) -> float:
    """Scale ``base`` by ``((1 - tau') / (1 - tau_n))**(-gamma)``."""
    if not base > 0:
        raise NumericalError(f"extrapolation needs a positive base, got {base!r}")
    return spec.factor * base


def weissman_quantile(s: Series, tau_n: Level, alpha: Level, gamma: TailFit) -> float:
    """Weissman extreme quantile estimator at level ``alpha``."""
    if alpha.tail > tau_n.tail:
        raise ValueError("alpha must not lie below tau_n")
    q = empirical_quantile(s, tau_n)
    return (alpha.tail / tau_n.tail) ** (-gamma.gamma) * q


def tau_prime_hat(alpha: Level, gamma: TailFit) -> Level:
    """Expectile level whose expectile matches the ``alpha``-quantile.

    ``1 - (1 - alpha) * gamma / (1 - gamma)``
    """
    g = gamma.gamma
    if not 0.0 < g < 1.0:
        raise NumericalError("gamma too large for composite level")
    tail = alpha.tail * g / (1.0 - g)
    if not 0.0 < tail < 1.0:
        raise NumericalError("gamma too large for composite level")
    return Level.from_tail(tail, "extreme")


def _hill_at(s: Series, tau_n: Level) -> TailFit:
    return hill(s, tail_count(s.n, tau_n))


def composite_laws(
    s: Series, tau_n: Level, alpha: Level, cfg: ExpectileConfig = DEFAULT_CONFIG
) -> float:
    """LAWS expectile extrapolated to the estimated composite level ``tau'(alpha)``.

    The Hill fit, the base expectile and the composite level all use the
    same ``tau_n``.
    """
    fit = _hill_at(s, tau_n)
    base = laws_expectile(s, tau_n, cfg)
    return extrapolate(base, ExtrapolationSpec(tau_n, tau_prime_hat(alpha, fit), fit))


def composite_laws_via_alpha(
    s: Series, tau_n: Level, alpha: Level, cfg: ExpectileConfig = DEFAULT_CONFIG
) -> float:
    """Same estimate as :func:`composite_laws`, written as ``(1/g - 1)**g`` times the LAWS extrapolation to ``alpha``."""
    fit = _hill_at(s, tau_n)
    g = fit.gamma
    if not 0.0 < g < 1.0:
        raise NumericalError("gamma too large for composite level")
    base = laws_expectile(s, tau_n, cfg)
    return (1.0 / g - 1.0) ** g * extrapolate(base, ExtrapolationSpec(tau_n, alpha, fit))


def composite_qb(s: Series, tau_n: Level, alpha: Level) -> float:
    """QB expectile extrapolated to the estimated composite level ``tau'(alpha)``."""
    fit = _hill_at(s, tau_n)
    base = qb_expectile(s, tau_n, fit)
    return extrapolate(base, ExtrapolationSpec(tau_n, tau_prime_hat(alpha, fit), fit))
