"""Tail-index estimators and second-order bias ingredients."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DataError,
    Level,
    NumericalError,
    Series,
    TailFit,
    empirical_survival,
    tail_count,
)

__all__ = [
    "SecondOrderFit",
    "hill",
    "gamma_expectile_based",
    "second_order",
    "default_second_order_k",
    "bias_term",
    "RHO_BOUNDS",
    "MIN_SECOND_ORDER_K",
]

RHO_BOUNDS = (-10.0, -0.01)
MIN_SECOND_ORDER_K = 50


@dataclass(frozen=True)
class SecondOrderFit:
    """Second-order parameter ``rho_hat`` and scale ``beta_hat``.

    With these, the auxiliary function of the tail quantile function is
    modelled as ``A(t) = gamma * beta * t**rho``.
    """

    rho_hat: float
    beta_hat: float
    k_used: int

    def __post_init__(self):
        if self.rho_hat > 0:
            raise ValueError("rho_hat must be <= 0")


def _check_k(s: Series, k: int) -> None:
    if not 1 <= k <= s.n - 1:
        raise DataError(f"k={k} outside 1..{s.n - 1}")


def _top_log_excesses(s: Series, k: int) -> np.ndarray:
    """``log(Y_{n-i+1,n} / Y_{n-k,n})`` for ``i = 1..k``, largest first."""
    threshold = s.sorted[s.n - k - 1]
    if threshold <= 0:
        raise DataError("Hill requires positive upper order statistics")
    return np.log(s.sorted[: s.n - k - 1 : -1]) - math.log(threshold)


def hill(s: Series, k: int) -> TailFit:
    """Hill estimator from the top ``k`` order statistics."""
    _check_k(s, k)
    gamma = float(np.mean(_top_log_excesses(s, k)))
    return TailFit(gamma=gamma, method="hill", k=k, tau_n=Level.intermediate(k, s.n))


def gamma_expectile_based(s: Series, tau_n: Level, xi_tilde: float) -> TailFit:
    """Tail index read off the exceedance frequency of an intermediate expectile.

    Uses ``gamma = 1 / (1 + Fbar(xi) / (1 - tau_n))``, the empirical form
    of the limit relation between expectile and quantile levels.
    """
    surv = empirical_survival(s, xi_tilde)
    warning = None
    if surv == 0.0:
        warning = "no observation exceeds the intermediate expectile; gamma set to 1"
    gamma = 1.0 / (1.0 + surv / tau_n.tail)
    return TailFit(
        gamma=gamma,
        method="expectile_based",
        k=max(1, tail_count(s.n, tau_n)),
        tau_n=tau_n,
        warning=warning,
    )


def default_second_order_k(s: Series) -> int:
    """Tuning ``k1 = floor(n**0.999)`` restricted to the positive part of the sample."""
    n_pos = int(np.count_nonzero(s.sorted > 0))
    return min(int(math.floor(s.n**0.999)), n_pos - 1, s.n - 1)


def second_order(s: Series, k: int | None = None) -> SecondOrderFit:
    """Estimate ``(rho, beta)`` from the top ``k`` log-excesses.

    ``rho`` comes from the moment-ratio statistic

        T = (log M1 - log(M2/2)/2) / (log(M2/2)/2 - log(M3/6)/3),
        rho = -|3 (T - 1) / (T - 3)|,

    with ``Mj`` the ``j``-th moment of the log-excesses over ``Y_{n-k,n}``.
    ``beta`` comes from the weighted scaled log-spacings
    ``U_i = i log(Y_{n-i+1,n} / Y_{n-i,n})``:

        d(a) = mean((i/k)**(-a)),  D(a) = mean((i/k)**(-a) U_i),
        beta = (k/n)**rho (d(rho) D(0) - D(rho)) / (d(rho) D(rho) - D(2 rho)).

    ``rho`` is clamped to ``RHO_BOUNDS`` before ``beta`` is computed.
    """
    if k is None:
        k = default_second_order_k(s)
    if k < MIN_SECOND_ORDER_K:
        raise DataError("insufficient tail sample for second-order estimation")
    _check_k(s, k)
    logs = _top_log_excesses(s, k)
    m1 = np.mean(logs)
    m2 = np.mean(logs**2)
    m3 = np.mean(logs**3)
    if m1 <= 0 or m2 <= 0 or m3 <= 0:
        raise NumericalError("degenerate log-excesses in second-order estimation")
    half_l2 = 0.5 * math.log(m2 / 2.0)
    t_stat = (math.log(m1) - half_l2) / (half_l2 - math.log(m3 / 6.0) / 3.0)
    rho = -abs(3.0 * (t_stat - 1.0) / (t_stat - 3.0))
    if not math.isfinite(rho):
        rho = RHO_BOUNDS[0]
    rho = min(max(rho, RHO_BOUNDS[0]), RHO_BOUNDS[1])

    # logs[i-1] - logs[i] = log(Y_{n-i+1} / Y_{n-i}) for i = 1..k-1; the last spacing is logs[k-1].
    spacings = np.append(logs[:-1] - logs[1:], logs[-1])
    i = np.arange(1, k + 1, dtype=float)
    u = i * spacings
    frac = i / k

    def d(a: float) -> float:
        return float(np.mean(frac ** (-a)))

    def big_d(a: float) -> float:
        return float(np.mean(frac ** (-a) * u))

    d_rho, big_d_rho = d(rho), big_d(rho)
    denom = d_rho * big_d_rho - big_d(2.0 * rho)
    if denom == 0.0:
        raise NumericalError("singular beta estimate")
    beta = (k / s.n) ** rho * (d_rho * big_d(0.0) - big_d_rho) / denom
    if not math.isfinite(beta):
        raise NumericalError("non-finite beta estimate")
    return SecondOrderFit(rho_hat=rho, beta_hat=float(beta), k_used=k)


def bias_term(fit: TailFit, so: SecondOrderFit) -> float:
    """Bias proxy ``gamma * beta * (1 - tau_n)**(-rho) / (1 - rho)`` for the extrapolation exponent."""
    if fit.method != "hill":
        raise ValueError("bias_term requires a Hill fit")
    rho = so.rho_hat
    return fit.gamma * so.beta_hat * fit.tau_n.tail ** (-rho) / (1.0 - rho)
