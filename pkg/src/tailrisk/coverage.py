"""Monte Carlo coverage of extreme-level confidence intervals.

Each replication simulates one path, computes the LAWS and QB
estimates for every ``k`` in the grid, builds the IID, D and D-ADJ
intervals and records whether each misses the true value. Replications
are independent streams keyed by ``(seed, j)`` and are reduced in index
order, so results do not depend on the number of workers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Level, TailRiskError
from .pipeline import Estimator
from .simulate import ModelSpec, simulate
from .tailindex import second_order
from .inference import default_blocks

__all__ = ["VARIANTS", "CoverageReport", "replicate", "run_coverage"]

log = logging.getLogger(__name__)

VARIANTS = ("LAWS-IID", "LAWS-D", "LAWS-D-ADJ", "QB-IID", "QB-D", "QB-D-ADJ")
_CI = {"IID": "iid", "D": "d", "D-ADJ": "d_adj"}


@dataclass
class CoverageReport:
    """Error rates in percent, indexed ``[k, variant]``."""

    model: str
    reps: int
    k_grid: list[int]
    truth: float
    level: Level
    misses: np.ndarray
    valid: np.ndarray
    nominal: float = 5.0
    variants: tuple[str, ...] = field(default=VARIANTS)

    @property
    def error_rates(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return 100.0 * self.misses / self.valid

    @property
    def failed(self) -> np.ndarray:
        return self.reps - self.valid

    def rate(self, k: int, variant: str) -> float:
        return float(self.error_rates[self.k_grid.index(k), self.variants.index(variant)])

    def rows(self) -> list[dict]:
        rates = self.error_rates
        out = []
        for i, k in enumerate(self.k_grid):
            for j, v in enumerate(self.variants):
                out.append(
                    {
                        "model": self.model,
                        "k": k,
                        "variant": v,
                        "error_rate": float(rates[i, j]),
                        "misses": int(self.misses[i, j]),
                        "valid": int(self.valid[i, j]),
                        "failed": int(self.failed[i, j]),
                        "nominal": self.nominal,
                    }
                )
        return out


def replicate(
    model: str,
    n: int,
    seed: int,
    j: int,
    k_grid: Sequence[int],
    level: Level,
    truth: float,
    conf: float = 0.95,
) -> np.ndarray:
    """Miss indicators for replication ``j``: 1 miss, 0 cover, NaN estimator failure.

    For univariate models ``level`` is the extreme expectile level; for
    bivariate models it is ``alpha`` and the composite XMES estimators
    target QMES at ``alpha``.
    """
    spec = ModelSpec(model, n, seed)
    data = simulate(spec, j)
    out = np.full((len(k_grid), len(VARIANTS)), np.nan)
    try:
        blocks = default_blocks(data)
    except TailRiskError as exc:
        log.debug("replication %d: block selection failed: %s", j, exc)
        return out
    base = data.x if spec.bivariate else data
    try:
        second = second_order(base)
    except TailRiskError:
        second = None
    for vi, variant in enumerate(VARIANTS):
        family, ci = variant.split("-", 1)
        ci = _CI[ci]
        if ci == "d_adj" and second is None:
            continue
        if spec.bivariate:
            method = "xmes-laws" if family == "LAWS" else "xmes-qb"
            est = Estimator(data, method, alpha=level, ci=ci, level=conf, blocks=blocks, second=second)
        else:
            method = "laws" if family == "LAWS" else "qb"
            est = Estimator(data, method, tau_prime=level, ci=ci, level=conf, blocks=blocks, second=second)
        for ki, k in enumerate(k_grid):
            try:
                row = est.row(k)
            except TailRiskError as exc:
                log.debug("replication %d, k=%d, %s failed: %s", j, k, variant, exc)
                continue
            out[ki, vi] = 0.0 if row.lower <= truth <= row.upper else 1.0
    return out


def _replicate_star(args):
    return replicate(*args)


def run_coverage(
    model: str,
    truth: float,
    level: Level,
    k_grid: Sequence[int],
    reps: int = 500,
    n: int = 2500,
    seed: int = 0,
    workers: int = 1,
    conf: float = 0.95,
) -> CoverageReport:
    if reps < 1:
        raise ValueError("reps must be >= 1")
    k_grid = [int(k) for k in k_grid]
    jobs = [(model, n, seed, j, k_grid, level, truth, conf) for j in range(reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate_star, jobs, chunksize=max(1, reps // (4 * workers))))
    else:
        results = [_replicate_star(job) for job in jobs]
    stack = np.stack(results)
    valid = np.sum(~np.isnan(stack), axis=0)
    misses = np.nansum(stack, axis=0)
    return CoverageReport(
        model=model,
        reps=reps,
        k_grid=k_grid,
        truth=truth,
        level=level,
        misses=misses,
        valid=valid,
        nominal=round(100.0 * (1.0 - conf), 10),
    )
