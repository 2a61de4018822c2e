"""Extreme expectiles, extreme quantiles and marginal expected shortfall for
heavy-tailed, serially dependent series, with block-variance confidence
intervals and a Monte Carlo coverage harness."""

from .core import (
    ConfidenceInterval,
    ConvergenceError,
    DataError,
    Level,
    NumericalError,
    RiskEstimate,
    Series,
    TailFit,
    TailRiskError,
    empirical_quantile,
    empirical_survival,
    ranks_to_uniform,
)
from .expectile import (
    ExpectileConfig,
    ExtrapolationSpec,
    composite_laws,
    composite_qb,
    extrapolate,
    laws_expectile,
    qb_expectile,
    tau_prime_hat,
    weissman_quantile,
)
from .inference import BlockScheme, block_variance, ci_extreme, ci_xmes, default_blocks
from .mes import BivariateSeries, MesSpec, composite_xmes, mes_extrapolated, mes_tail_ratio, qmes_weissman
from .tailindex import SecondOrderFit, bias_term, gamma_expectile_based, hill, second_order

__version__ = "0.1.0"

__all__ = [
    "BivariateSeries",
    "BlockScheme",
    "ConfidenceInterval",
    "ConvergenceError",
    "DataError",
    "ExpectileConfig",
    "ExtrapolationSpec",
    "Level",
    "MesSpec",
    "NumericalError",
    "RiskEstimate",
    "SecondOrderFit",
    "Series",
    "TailFit",
    "TailRiskError",
    "bias_term",
    "block_variance",
    "ci_extreme",
    "ci_xmes",
    "composite_laws",
    "composite_qb",
    "composite_xmes",
    "default_blocks",
    "empirical_quantile",
    "empirical_survival",
    "extrapolate",
    "gamma_expectile_based",
    "hill",
    "laws_expectile",
    "mes_extrapolated",
    "mes_tail_ratio",
    "qb_expectile",
    "qmes_weissman",
    "ranks_to_uniform",
    "second_order",
    "tau_prime_hat",
    "weissman_quantile",
]
