"""Per-``k`` estimation rows combining point estimates and intervals.

This is the layer the command line drives: one call per intermediate
sample fraction, with the block scheme and second-order fit shared
across the ``k`` grid because neither depends on ``k``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Literal, Optional, Union

from .core import ConfidenceInterval, Level, RiskEstimate, Series, TailRiskError
from .expectile import (
    DEFAULT_CONFIG,
    ExpectileConfig,
    ExtrapolationSpec,
    extrapolate,
    laws_expectile,
    qb_expectile,
    tau_prime_hat,
    weissman_quantile,
)
from .inference import BlockScheme, Variant, block_variance, ci_extreme, default_blocks
from .mes import BivariateSeries, composite_xmes, qmes_weissman
from .tailindex import SecondOrderFit, bias_term, hill, second_order

__all__ = ["METHODS", "MES_METHODS", "EstimateRow", "Estimator"]

Method = Literal["laws", "qb", "weissman", "qmes", "xmes-laws", "xmes-qb"]
METHODS = ("laws", "qb", "weissman", "qmes", "xmes-laws", "xmes-qb")
MES_METHODS = ("qmes", "xmes-laws", "xmes-qb")


@dataclass
class EstimateRow:
    k: int
    tau_n: float
    gamma: float
    gamma_y: Optional[float]
    tau_prime: float
    estimate: float
    lower: Optional[float] = None
    upper: Optional[float] = None
    w_hat: Optional[float] = None
    b_hat: Optional[float] = None

    FIELDS = ("k", "tau_n", "gamma", "gamma_y", "tau_prime", "estimate", "lower", "upper", "w_hat", "b_hat")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Estimator:
    """Estimate one risk measure over a grid of ``k``.

    ``alpha`` defaults to ``1 - 1/n``. For ``laws`` and ``qb`` a fixed
    ``tau_prime`` replaces the composite level when given.
    """

    data: Union[Series, BivariateSeries]
    method: Method = "laws"
    alpha: Optional[Level] = None
    tau_prime: Optional[Level] = None
    ci: Optional[Variant] = "d"
    level: float = 0.95
    blocks: Optional[BlockScheme] = None
    second: Optional[SecondOrderFit] = None
    cfg: ExpectileConfig = field(default=DEFAULT_CONFIG)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        bivariate = isinstance(self.data, BivariateSeries)
        if bivariate != (self.method in MES_METHODS):
            need = "bivariate" if self.method in MES_METHODS else "univariate"
            raise ValueError(f"method {self.method!r} needs {need} data")
        if self.alpha is None:
            self.alpha = Level.from_tail(1.0 / self.data.n, "extreme")
        if self.ci in ("d", "d_adj") and self.blocks is None:
            self.blocks = default_blocks(self.data)
        if self.ci == "d_adj" and self.second is None:
            self.second = second_order(self.ci_series)

    @property
    def ci_series(self) -> Series:
        """The component whose tail index drives the interval."""
        return self.data.x if isinstance(self.data, BivariateSeries) else self.data

    def point(self, k: int) -> tuple[RiskEstimate, float, Optional[float]]:
        """Point estimate at ``tau_n = 1 - k/n`` with the Hill estimates on the CI series and on ``y``."""
        n = self.data.n
        tau_n = Level.intermediate(k, n)
        m = self.method
        if m in MES_METHODS:
            b = self.data
            gamma_y = hill(b.y, k).gamma
            if m == "qmes":
                est = qmes_weissman(b, tau_n, self.alpha)
            else:
                est = composite_xmes(b, tau_n, self.alpha, "laws" if m == "xmes-laws" else "qb", self.cfg)
            return est, hill(b.x, k).gamma, gamma_y
        s = self.data
        fit = hill(s, k)
        if m == "weissman":
            value = weissman_quantile(s, tau_n, self.alpha, fit)
            return RiskEstimate(value, self.alpha, "quantile"), fit.gamma, None
        target = self.tau_prime or tau_prime_hat(self.alpha, fit)
        base = laws_expectile(s, tau_n, self.cfg) if m == "laws" else qb_expectile(s, tau_n, fit)
        value = extrapolate(base, ExtrapolationSpec(tau_n, target, fit))
        return RiskEstimate(value, target, "expectile"), fit.gamma, None

    def interval(self, est: RiskEstimate, k: int, variant: Variant) -> tuple[ConfidenceInterval, float]:
        s = self.ci_series
        tau_n = Level.intermediate(k, s.n)
        fit = hill(s, k)
        if variant == "iid":
            return ci_extreme(est, tau_n, est.level, fit, level=self.level, variant="iid"), 0.0
        w_hat = block_variance(s, tau_n, self.blocks, fit)
        b_hat = bias_term(fit, self.second) if variant == "d_adj" else 0.0
        return ci_extreme(est, tau_n, est.level, fit, w_hat, b_hat, self.level, variant), b_hat

    def row(self, k: int) -> EstimateRow:
        if not 1 <= k <= self.data.n - 1:
            raise TailRiskError(f"k={k} outside 1..{self.data.n - 1}")
        est, gamma, gamma_y = self.point(k)
        row = EstimateRow(
            k=k,
            tau_n=1.0 - k / self.data.n,
            gamma=gamma,
            gamma_y=gamma_y,
            tau_prime=est.level.tau,
            estimate=est.value,
        )
        if self.ci is not None:
            ci, b_hat = self.interval(est, k, self.ci)
            row.lower, row.upper, row.w_hat, row.b_hat = ci.lower, ci.upper, ci.w_hat, b_hat
        return row
