"""Dependence-aware variance estimation and confidence intervals.

The asymptotic variance of the log of an extrapolated estimate is
``gamma**2 (1 + 2 sum_t R_t(1, 1))``. The serial-dependence inflation is
estimated by counting exceedances of the intermediate level inside big
blocks separated by small gaps and taking the sample variance of the
counts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np
from scipy.stats import norm

from .core import (
    ConfidenceInterval,
    DataError,
    Level,
    RiskEstimate,
    Series,
    TailFit,
    ranks_to_uniform,
    tail_count,
)
from .mes import BivariateSeries
from .tailindex import SecondOrderFit, bias_term, hill, second_order

__all__ = [
    "BlockScheme",
    "Variant",
    "autocorrelation",
    "dependence_lag",
    "default_blocks",
    "exceedance_indicators",
    "block_counts",
    "block_variance",
    "normal_quantile",
    "ci_extreme",
    "ci_xmes",
    "interval",
]

log = logging.getLogger(__name__)

Variant = Literal["iid", "d", "d_adj"]
ACF_CUTOFF = 0.1


@dataclass(frozen=True)
class BlockScheme:
    """Big blocks of length ``r_n`` separated by small blocks of length ``l_n``."""

    r_n: int
    l_n: int
    m_n: int

    def __post_init__(self):
        if self.r_n < 1 or self.l_n < 0:
            raise ValueError("block lengths must satisfy r_n >= 1, l_n >= 0")
        # m_n < 2 is representable so block_variance can report a short sample
        if self.m_n < 0:
            raise ValueError("block count must be nonnegative")

    @classmethod
    def for_length(cls, n: int, r_n: int, l_n: int) -> "BlockScheme":
        return cls(r_n, l_n, n // (r_n + l_n))

    @property
    def stride(self) -> int:
        return self.r_n + self.l_n


def autocorrelation(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags ``0..max_lag`` (biased autocovariance, FFT)."""
    x = np.asarray(x, dtype=float) - np.mean(x)
    n = x.size
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conj(f), size)[: max_lag + 1]
    if acov[0] == 0:
        return np.zeros(max_lag + 1)
    return acov / acov[0]


def dependence_lag(x: np.ndarray, cutoff: float = ACF_CUTOFF) -> Optional[int]:
    """First lag at which the autocorrelations of ``x`` and ``x**2`` both fall below ``cutoff``.

    Absolute autocorrelations at lags ``1..floor(n/4)`` are scanned.
    Returns ``None`` when no lag in that range qualifies.
    """
    n = len(x)
    max_lag = max(1, n // 4)
    crit = np.maximum(
        np.abs(autocorrelation(x, max_lag)[1:]),
        np.abs(autocorrelation(np.square(x), max_lag)[1:]),
    )
    ok = np.flatnonzero(crit < cutoff)
    if ok.size == 0:
        return None
    return int(ok[0]) + 1


def default_blocks(data: Union[Series, BivariateSeries]) -> BlockScheme:
    """``r_n = floor(log(n)**2)``, ``l_n = floor(C log n)`` with the smallest integer ``C``
    making ``l_n`` at least the dependence lag.

    For bivariate input the rule runs on ``x``.
    """
    s = data.x if isinstance(data, BivariateSeries) else data
    n = s.n
    if n < 100:
        raise DataError("automatic block selection needs n >= 100")
    log_n = math.log(n)
    r_n = int(math.floor(log_n**2))
    lag = dependence_lag(s.values)
    if lag is None:
        l_n = n // 10
        log.warning("no lag with autocorrelations below %.2f; using l_n = n/10 = %d", ACF_CUTOFF, l_n)
    else:
        c = 1
        while int(math.floor(c * log_n)) < lag:
            c += 1
        l_n = int(math.floor(c * log_n))
    return BlockScheme.for_length(n, r_n, l_n)


def exceedance_indicators(s: Series, tau_n: Level) -> np.ndarray:
    """``1{F_n(Y_t) > tau_n}`` in time order, with ``F_n`` from average ranks."""
    ranks = ranks_to_uniform(s) * s.n
    x = s.n * tau_n.tail
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, x):
        x = r
    return ranks > s.n - x


def block_counts(indicators: np.ndarray, blocks: BlockScheme) -> np.ndarray:
    m, stride = blocks.m_n, blocks.stride
    if m * stride > indicators.size:
        raise DataError("block scheme longer than the sample")
    return indicators[: m * stride].reshape(m, stride)[:, : blocks.r_n].sum(axis=1)


def block_variance(s: Series, tau_n: Level, blocks: BlockScheme, gamma: TailFit) -> float:
    """Block estimate of ``gamma**2 (1 + 2 sum_t R_t(1,1))``.

    ``gamma**2 * Var(Z_j) / (r_n (1 - tau_n))`` where ``Z_j`` counts the
    exceedances in the ``j``-th big block; the sample variance uses the
    ``m_n - 1`` divisor and data after the last full block are ignored.
    """
    if blocks.m_n < 2:
        raise DataError("sample too short for block scheme")
    z = block_counts(exceedance_indicators(s, tau_n), blocks)
    sigma = float(np.var(z, ddof=1))
    return gamma.gamma**2 * sigma / (blocks.r_n * tau_n.tail)


def normal_quantile(p: float) -> float:
    return float(norm.ppf(p))


def ci_extreme(
    point: RiskEstimate,
    tau_n: Level,
    tau_prime: Level,
    gamma: TailFit,
    w_hat: float | None = None,
    b_hat: float = 0.0,
    level: float = 0.95,
    variant: Variant = "d",
) -> ConfidenceInterval:
    """Equi-tailed interval ``point * R**(-b +/- z sqrt(w / k))`` with ``R = (1 - tau_n) / (1 - tau')``.

    ``k`` is the number of order statistics behind ``gamma``. For
    ``variant="iid"`` the variance defaults to ``gamma**2`` and the bias
    to zero.
    """
    if not point.value > 0:
        raise DataError("interval needs a positive point estimate")
    if not 0 < level < 1:
        raise ValueError("confidence level must lie in (0, 1)")
    if variant == "iid":
        if w_hat is None:
            w_hat = gamma.gamma**2
        b_hat = 0.0
    elif w_hat is None:
        raise ValueError(f"variant {variant!r} needs a block variance estimate")
    if w_hat < 0:
        raise ValueError("negative variance estimate")
    z = normal_quantile(1.0 - (1.0 - level) / 2.0)
    log_ratio = math.log(tau_n.tail / tau_prime.tail)
    half = z * math.sqrt(w_hat / gamma.k)
    a = point.value * math.exp(log_ratio * (-b_hat + half))
    c = point.value * math.exp(log_ratio * (-b_hat - half))
    return ConfidenceInterval(min(a, c), max(a, c), level, variant, float(w_hat))


def interval(
    s: Series,
    point: RiskEstimate,
    tau_n: Level,
    variant: Variant,
    blocks: BlockScheme | None = None,
    second: SecondOrderFit | None = None,
    level: float = 0.95,
) -> ConfidenceInterval:
    """Build any interval variant for an extrapolated estimate computed on ``s``.

    Fits Hill at ``tau_n``, the block variance (``d``, ``d_adj``) and the
    second-order bias (``d_adj``) as needed. The extreme level is
    ``point.level``.
    """
    fit = hill(s, tail_count(s.n, tau_n))
    if variant == "iid":
        return ci_extreme(point, tau_n, point.level, fit, level=level, variant="iid")
    blocks = blocks or default_blocks(s)
    w_hat = block_variance(s, tau_n, blocks, fit)
    b_hat = 0.0
    if variant == "d_adj":
        b_hat = bias_term(fit, second or second_order(s))
    return ci_extreme(point, tau_n, point.level, fit, w_hat, b_hat, level, variant)


def ci_xmes(
    point: RiskEstimate,
    b: BivariateSeries,
    tau_n: Level,
    blocks: BlockScheme | None = None,
    level: float = 0.95,
    variant: Variant = "d",
    second: SecondOrderFit | None = None,
) -> ConfidenceInterval:
    """Interval for an extrapolated MES estimate, with variance and Hill fit taken on ``x``.

    The extreme level is ``point.level``: the estimated composite level
    for composite XMES, ``alpha`` for the Weissman QMES.
    """
    return interval(b.x, point, tau_n, variant, blocks or default_blocks(b), second, level)
