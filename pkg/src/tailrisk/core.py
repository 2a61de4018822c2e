"""Sample containers, order statistics and level arithmetic.

Every estimator in the package takes a :class:`Series` (or a
:class:`~tailrisk.mes.BivariateSeries`) and one or more :class:`Level`
objects. A level stores its exceedance probability ``tail = 1 - tau``
as the primary quantity so that extreme levels such as ``1 - 1e-5``
keep full relative precision through the extrapolation formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "TailRiskError",
    "DataError",
    "NumericalError",
    "ConvergenceError",
    "Level",
    "Series",
    "TailFit",
    "ConfidenceInterval",
    "RiskEstimate",
    "tail_count",
    "empirical_quantile",
    "empirical_survival",
    "ranks_to_uniform",
]


class TailRiskError(ValueError):
    """Base class for estimation errors raised by this package."""


class DataError(TailRiskError):
    """Input data cannot support the requested computation."""


class NumericalError(TailRiskError):
    """A numerical procedure produced an unusable result."""


class ConvergenceError(NumericalError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message: str, last: float, residual: float):
        super().__init__(f"{message} (last iterate {last!r}, residual {residual:.3e})")
        self.last = last
        self.residual = residual


@dataclass(frozen=True)
class Level:
    """A probability level ``tau`` in (0, 1).

    Build from the exceedance probability with :meth:`from_tail` when
    ``1 - tau`` is the quantity you actually know (``k/n``, ``1/n``...).
    """

    tau: float
    kind: Literal["intermediate", "extreme"] = "intermediate"
    tail: float = field(default=float("nan"), repr=False)

    def __post_init__(self):
        tail = self.tail
        if math.isnan(tail):
            tail = 1.0 - float(self.tau)
            object.__setattr__(self, "tail", tail)
        if not (0.0 < self.tau < 1.0) or not (0.0 < tail < 1.0):
            raise ValueError(f"level must lie in (0, 1), got tau={self.tau!r}")

    @classmethod
    def from_tail(cls, tail: float, kind: str = "intermediate") -> "Level":
        tail = float(tail)
        return cls(tau=1.0 - tail, kind=kind, tail=tail)

    @classmethod
    def intermediate(cls, k: int, n: int) -> "Level":
        """The level ``tau_n = 1 - k/n`` attached to the top ``k`` order statistics."""
        return cls.from_tail(k / n, "intermediate")

    @classmethod
    def extreme(cls, tau: float) -> "Level":
        return cls(tau=float(tau), kind="extreme")


class Series:
    """A univariate sample with its ascending order statistics.

    Args:
        values: observations in time order.
    """

    __slots__ = ("values", "sorted", "n")

    def __init__(self, values):
        values = np.array(values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise DataError("series contains non-finite values")
        values.setflags(write=False)
        srt = np.sort(values)
        srt.setflags(write=False)
        self.values = values
        self.sorted = srt
        self.n = int(values.size)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Series(n={self.n})"

    def order_stat(self, i: int) -> float:
        """Return ``Y_{i,n}`` using 1-based indexing."""
        if not 1 <= i <= self.n:
            raise IndexError(f"order statistic {i} outside 1..{self.n}")
        return float(self.sorted[i - 1])

    def scaled(self, c: float) -> "Series":
        return Series(self.values * c)


@dataclass(frozen=True)
class TailFit:
    """A tail-index estimate.

    ``warning`` is set when the estimator hit a boundary case that is
    reported rather than raised.
    """

    gamma: float
    method: Literal["hill", "expectile_based"]
    k: int
    tau_n: Level
    warning: Optional[str] = None


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    variant: Literal["iid", "d", "d_adj"]
    w_hat: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("confidence interval with lower > upper")
        if self.w_hat < 0:
            raise ValueError("negative variance estimate")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class RiskEstimate:
    """A point estimate at a given level, optionally with an interval.

    The interval need not contain ``value``: the bias-adjusted variant
    shifts the band.
    """

    value: float
    level: Level
    kind: Literal["expectile", "quantile", "qmes", "xmes"]
    ci: Optional[ConfidenceInterval] = None


def tail_count(n: int, level: Level) -> int:
    """``floor(n (1 - tau))`` with products that land within rounding of an integer snapped to it.

    Levels built as ``1 - k/n`` would otherwise lose one order statistic
    whenever ``n * (k/n)`` rounds to ``k - 1e-13``.
    """
    x = n * level.tail
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r)
    return int(math.floor(x))


def empirical_quantile(s: Series, tau: Level) -> float:
    """Upper order statistic ``Y_{n - floor(n(1-tau)), n}``."""
    j = tail_count(s.n, tau)
    if j >= s.n:
        raise DataError("tau too small for sample size")
    return s.order_stat(s.n - j)


def empirical_survival(s: Series, u: float) -> float:
    """Fraction of observations strictly above ``u``."""
    above = s.n - int(np.searchsorted(s.sorted, u, side="right"))
    return above / s.n


def ranks_to_uniform(s: Series) -> np.ndarray:
    """Empirical distribution function evaluated at each observation, in time order.

    Tied observations share their average rank.
    """
    return rankdata(s.values, method="average") / s.n
