"""Marginal expected shortfall at extreme levels.

The firm loss ``x`` is averaged over the days on which the market loss
``y`` exceeds an intermediate threshold, then extrapolated with the
tail index of ``x``. The threshold is an empirical quantile (QMES) or an
intermediate expectile of ``y`` (XMES, LAWS or QB flavour).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .core import DataError, Level, RiskEstimate, Series, TailFit, empirical_quantile, tail_count
from .expectile import (
    DEFAULT_CONFIG,
    ExpectileConfig,
    ExtrapolationSpec,
    extrapolate,
    laws_expectile,
    qb_expectile,
    tau_prime_hat,
)
from .tailindex import hill

__all__ = [
    "BivariateSeries",
    "MesSpec",
    "mes_threshold",
    "mes_tail_ratio",
    "mes_extrapolated",
    "composite_xmes",
    "qmes_weissman",
]

ThresholdKind = Literal["quantile", "laws_expectile", "qb_expectile"]


class BivariateSeries:
    """Aligned firm (``x``) and market (``y``) loss returns."""

    __slots__ = ("x", "y", "n")

    def __init__(self, x, y):
        x = Series(x)
        y = Series(y)
        if x.n != y.n:
            raise DataError(f"x and y lengths differ ({x.n} != {y.n})")
        if x.n < 2:
            raise DataError("bivariate series needs at least 2 pairs")
        self.x = x
        self.y = y
        self.n = x.n

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"BivariateSeries(n={self.n})"


@dataclass(frozen=True)
class MesSpec:
    threshold_kind: ThresholdKind
    tau_n: Level
    tau_prime: Level
    gamma_x: TailFit
    gamma_y: Optional[TailFit] = None

    def __post_init__(self):
        if self.tau_prime.tail > self.tau_n.tail:
            raise ValueError("extreme level must not lie below the intermediate level")


def mes_threshold(
    y: Series,
    kind: ThresholdKind,
    tau_n: Level,
    gamma_y: TailFit | None = None,
    cfg: ExpectileConfig = DEFAULT_CONFIG,
) -> float:
    if kind == "quantile":
        return empirical_quantile(y, tau_n)
    if kind == "laws_expectile":
        return laws_expectile(y, tau_n, cfg)
    if kind == "qb_expectile":
        if gamma_y is None:
            raise ValueError("qb_expectile threshold requires gamma_y")
        return qb_expectile(y, tau_n, gamma_y)
    raise ValueError(f"unknown threshold kind {kind!r}")


def mes_tail_ratio(b: BivariateSeries, z_bar: float) -> float:
    """``sum x 1(x > 0, y > z) / sum 1(y > z)``."""
    exceed = b.y.values > z_bar
    count = int(np.count_nonzero(exceed))
    if count == 0:
        raise DataError("empty tail: threshold too high for sample")
    xs = b.x.values[exceed]
    return float(xs[xs > 0].sum()) / count


def mes_extrapolated(
    b: BivariateSeries, spec: MesSpec, cfg: ExpectileConfig = DEFAULT_CONFIG
) -> RiskEstimate:
    z_bar = mes_threshold(b.y, spec.threshold_kind, spec.tau_n, spec.gamma_y, cfg)
    ratio = mes_tail_ratio(b, z_bar)
    value = extrapolate(ratio, ExtrapolationSpec(spec.tau_n, spec.tau_prime, spec.gamma_x))
    kind = "qmes" if spec.threshold_kind == "quantile" else "xmes"
    return RiskEstimate(value=value, level=spec.tau_prime, kind=kind)


def composite_xmes(
    b: BivariateSeries,
    tau_n: Level,
    alpha: Level,
    variant: Literal["laws", "qb"] = "laws",
    cfg: ExpectileConfig = DEFAULT_CONFIG,
    k_y: int | None = None,
) -> RiskEstimate:
    """XMES at the estimated composite level ``tau'(alpha)``, an estimator of QMES at ``alpha``.

    The Hill fits on ``x`` and ``y`` share ``k = n (1 - tau_n)`` unless
    ``k_y`` is given.
    """
    k = tail_count(b.n, tau_n)
    gamma_x = hill(b.x, k)
    gamma_y = hill(b.y, k if k_y is None else k_y)
    kind: ThresholdKind = "laws_expectile" if variant == "laws" else "qb_expectile"
    spec = MesSpec(kind, tau_n, tau_prime_hat(alpha, gamma_y), gamma_x, gamma_y)
    return mes_extrapolated(b, spec, cfg)


def qmes_weissman(b: BivariateSeries, tau_n: Level, alpha: Level) -> RiskEstimate:
    """Quantile-threshold MES extrapolated straight to ``alpha``."""
    gamma_x = hill(b.x, tail_count(b.n, tau_n))
    return mes_extrapolated(b, MesSpec("quantile", tau_n, alpha, gamma_x))
