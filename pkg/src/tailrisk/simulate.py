"""Seeded generators for the simulation models and long-run Monte Carlo truths.

Univariate models
    a  AR(1)       Y' = 0.8 Y + e,               e ~ t3
    b  ARMA(1,1)   Y' = 0.95 Y + e' + 0.9 e,     e ~ symmetric Pareto(3)
    c  ARCH(1)     Y' = s' e',  s'^2 = 0.4 + 0.6 Y^2,           e ~ N(0,1)
    d  GARCH(1,1)  Y' = s' e',  s'^2 = 0.1 + 0.4 Y^2 + 0.4 s^2, e ~ N(0,1)

Bivariate models e..h run the recursion of a..d on both coordinates. The
innovation pair comes from a copula: Student-t (rho 0.8, 3 df) for e and
g, Gumbel (theta 2) for f, Gumbel (theta 5) for h. The ``x`` innovation is
``Z 1(Z>0) - sqrt(-Z) 1(Z<0)`` with ``Z`` distributed as the ``y``
innovation for e and f, and has the density
``0.5 1(-1<z<=0) + 0.5 exp(-z) 1(z>0)`` for g and h.

Replication ``j`` of a run seeded with ``seed`` draws from the stream
``SeedSequence(seed, spawn_key=(j,))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy import signal, stats

from .core import Level, Series
from .mes import BivariateSeries

__all__ = [
    "ModelSpec",
    "TrueValue",
    "UNIVARIATE",
    "BIVARIATE",
    "DEFAULT_BURN_IN",
    "rng_for",
    "ar1_path",
    "arma11_path",
    "arch1_path",
    "garch11_path",
    "symmetric_pareto",
    "symmetric_pareto_ppf",
    "mixed_density_ppf",
    "x_transform",
    "student_t_copula",
    "gumbel_copula",
    "positive_stable",
    "simulate_univariate",
    "simulate_bivariate",
    "simulate",
    "expectile_by_bisection",
    "true_expectile",
    "true_qmes",
    "alpha_for_tau_prime",
]

UNIVARIATE = ("a", "b", "c", "d")
BIVARIATE = ("e", "f", "g", "h")
DEFAULT_BURN_IN = {"a": 1000, "b": 2000, "c": 1000, "d": 1000}
DEFAULT_BURN_IN.update({m: DEFAULT_BURN_IN[u] for m, u in zip(BIVARIATE, UNIVARIATE)})

ZETA = 3.0
T_DF = 3.0
T_RHO = 0.8
GUMBEL_THETA = {"f": 2.0, "h": 5.0}


@dataclass(frozen=True)
class ModelSpec:
    id: str
    n: int
    seed: int = 0
    burn_in: int | None = None

    def __post_init__(self):
        if self.id not in UNIVARIATE + BIVARIATE:
            raise ValueError(f"unknown model {self.id!r}")
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", DEFAULT_BURN_IN[self.id])
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")

    @property
    def bivariate(self) -> bool:
        return self.id in BIVARIATE

    @property
    def length(self) -> int:
        return self.n + self.burn_in


@dataclass(frozen=True)
class TrueValue:
    quantity: Literal["expectile", "qmes"]
    level: Level
    value: float
    mc_points: int
    mc_se: float


def rng_for(seed: int, replication: int | None = None) -> np.random.Generator:
    if replication is None:
        return np.random.default_rng(np.random.SeedSequence(seed))
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replication,)))


# -- recursions ----------------------------------------------------------------


def ar1_path(eps: np.ndarray, phi: float = 0.8, y0: float = 0.0) -> np.ndarray:
    """``Y_t = phi Y_{t-1} + eps_t`` for ``t = 1..len(eps)``."""
    eps = np.asarray(eps, dtype=float)
    if eps.size == 0:
        return eps.copy()
    y, _ = signal.lfilter([1.0], [1.0, -phi], eps, zi=[phi * y0])
    return y


def arma11_path(
    eps: np.ndarray, phi: float = 0.95, theta: float = 0.9, y0: float = 0.0, eps0: float = 0.0
) -> np.ndarray:
    """``Y_t = phi Y_{t-1} + eps_t + theta eps_{t-1}``."""
    eps = np.asarray(eps, dtype=float)
    if eps.size == 0:
        return eps.copy()
    zi = [phi * y0 + theta * eps0]
    y, _ = signal.lfilter([1.0, theta], [1.0, -phi], eps, zi=zi)
    return y


def arch1_path(eps: np.ndarray, omega: float = 0.4, a: float = 0.6, y0: float = 0.0) -> np.ndarray:
    """``Y_t = sigma_t eps_t`` with ``sigma_t**2 = omega + a Y_{t-1}**2``."""
    out = np.empty(len(eps))
    y = y0
    for t, e in enumerate(np.asarray(eps, dtype=float).tolist()):
        y = math.sqrt(omega + a * y * y) * e
        out[t] = y
    return out


def garch11_path(
    eps: np.ndarray,
    omega: float = 0.1,
    a: float = 0.4,
    b: float = 0.4,
    y0: float = 0.0,
    sigma2_0: float | None = None,
) -> np.ndarray:
    """``Y_t = sigma_t eps_t`` with ``sigma_t**2 = omega + a Y_{t-1}**2 + b sigma_{t-1}**2``.

    ``sigma2_0`` defaults to the unconditional variance ``omega / (1 - a - b)``.
    """
    s2 = omega / (1.0 - a - b) if sigma2_0 is None else sigma2_0
    out = np.empty(len(eps))
    y = y0
    for t, e in enumerate(np.asarray(eps, dtype=float).tolist()):
        s2 = omega + a * y * y + b * s2
        y = math.sqrt(s2) * e
        out[t] = y
    return out


_RECURSION: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "a": ar1_path,
    "b": arma11_path,
    "c": arch1_path,
    "d": garch11_path,
}


# -- innovation laws -------------------------------------------------------------


def symmetric_pareto(rng: np.random.Generator, size: int, zeta: float = ZETA) -> np.ndarray:
    """Random sign times a standard Pareto with survival ``v**(-zeta)``, ``v >= 1``."""
    v = (1.0 - rng.random(size)) ** (-1.0 / zeta)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return sign * v


def symmetric_pareto_ppf(u: np.ndarray, zeta: float = ZETA) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    upper = np.maximum(2.0 * (1.0 - u), 1e-300)
    lower = np.maximum(2.0 * u, 1e-300)
    return np.where(u > 0.5, upper ** (-1.0 / zeta), -(lower ** (-1.0 / zeta)))


def mixed_density_ppf(u: np.ndarray) -> np.ndarray:
    """Quantile function of ``0.5 1(-1<z<=0) + 0.5 exp(-z) 1(z>0)``."""
    u = np.asarray(u, dtype=float)
    upper = -np.log(np.maximum(2.0 * (1.0 - u), 1e-300))
    return np.where(u <= 0.5, 2.0 * u - 1.0, upper)


def x_transform(z: np.ndarray) -> np.ndarray:
    """``Z 1(Z>0) - sqrt(-Z) 1(Z<0)``: keeps the right tail, lightens the left."""
    z = np.asarray(z, dtype=float)
    return np.where(z > 0, z, -np.sqrt(np.maximum(-z, 0.0)))


# -- copulas ---------------------------------------------------------------------


def _student_t_pair(rng: np.random.Generator, size: int, rho: float, df: float):
    z1 = rng.standard_normal(size)
    z2 = rho * z1 + math.sqrt(1.0 - rho * rho) * rng.standard_normal(size)
    w = np.sqrt(rng.chisquare(df, size) / df)
    return z1 / w, z2 / w


def student_t_copula(
    rng: np.random.Generator, size: int, rho: float = T_RHO, df: float = T_DF
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform pairs from the bivariate Student-t copula."""
    t1, t2 = _student_t_pair(rng, size, rho, df)
    return stats.t.cdf(t1, df), stats.t.cdf(t2, df)


def positive_stable(rng: np.random.Generator, size: int, alpha: float) -> np.ndarray:
    """Positive stable variates with Laplace transform ``exp(-s**alpha)`` (Kanter's representation)."""
    theta = math.pi * rng.random(size)
    w = rng.standard_exponential(size)
    a = np.sin(alpha * theta) / np.sin(theta) ** (1.0 / alpha)
    b = (np.sin((1.0 - alpha) * theta) / w) ** ((1.0 - alpha) / alpha)
    return a * b


def gumbel_copula(
    rng: np.random.Generator, size: int, theta: float
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform pairs from the Gumbel copula via the Marshall-Olkin frailty construction."""
    if theta < 1:
        raise ValueError("Gumbel copula needs theta >= 1")
    if theta == 1:
        return rng.random(size), rng.random(size)
    alpha = 1.0 / theta
    s = positive_stable(rng, size, alpha)
    e1 = rng.standard_exponential(size)
    e2 = rng.standard_exponential(size)
    return np.exp(-((e1 / s) ** alpha)), np.exp(-((e2 / s) ** alpha))


# -- models ----------------------------------------------------------------------


def _univariate_innovations(model: str, rng: np.random.Generator, size: int) -> np.ndarray:
    if model == "a":
        return rng.standard_t(T_DF, size)
    if model == "b":
        return symmetric_pareto(rng, size)
    return rng.standard_normal(size)


def _bivariate_innovations(model: str, rng: np.random.Generator, size: int):
    if model == "e":
        z, ey = _student_t_pair(rng, size, T_RHO, T_DF)
        return x_transform(z), ey
    if model == "f":
        u, v = gumbel_copula(rng, size, GUMBEL_THETA["f"])
        return x_transform(symmetric_pareto_ppf(u)), symmetric_pareto_ppf(v)
    if model == "g":
        u, v = student_t_copula(rng, size)
    else:
        u, v = gumbel_copula(rng, size, GUMBEL_THETA["h"])
    return mixed_density_ppf(u), stats.norm.ppf(v)


def simulate_univariate(spec: ModelSpec, replication: int | None = None) -> Series:
    """Path of model a..d with the burn-in discarded."""
    if spec.id not in UNIVARIATE:
        raise ValueError(f"model {spec.id!r} is not univariate")
    rng = rng_for(spec.seed, replication)
    eps = _univariate_innovations(spec.id, rng, spec.length)
    return Series(_RECURSION[spec.id](eps)[spec.burn_in :])


def simulate_bivariate(spec: ModelSpec, replication: int | None = None) -> BivariateSeries:
    """Aligned ``(x, y)`` path of model e..h with the burn-in discarded."""
    if spec.id not in BIVARIATE:
        raise ValueError(f"model {spec.id!r} is not bivariate")
    rng = rng_for(spec.seed, replication)
    ex, ey = _bivariate_innovations(spec.id, rng, spec.length)
    rec = _RECURSION[UNIVARIATE[BIVARIATE.index(spec.id)]]
    return BivariateSeries(rec(ex)[spec.burn_in :], rec(ey)[spec.burn_in :])


def simulate(spec: ModelSpec, replication: int | None = None) -> Series | BivariateSeries:
    if spec.bivariate:
        return simulate_bivariate(spec, replication)
    return simulate_univariate(spec, replication)


# -- Monte Carlo truths ----------------------------------------------------------


def expectile_by_bisection(y: np.ndarray, tau: Level, rtol: float = 1e-13) -> float:
    """Solve ``tau E(Y - t)_+ = (1 - tau) E(t - Y)_+`` for the empirical law of ``y`` by bisection.

    Sums are evaluated in ``O(log n)`` per step from prefix sums of the
    sorted sample.
    """
    srt = np.sort(np.asarray(y, dtype=float))
    csum = np.concatenate(([0.0], np.cumsum(srt)))
    total = csum[-1]
    n = srt.size

    def g(t: float) -> float:
        j = int(np.searchsorted(srt, t, side="right"))
        below = t * j - csum[j]
        above = (total - csum[j]) - t * (n - j)
        return tau.tau * above - tau.tail * below

    lo, hi = float(srt[0]), float(srt[-1])
    if lo == hi:
        return lo
    while hi - lo > rtol * max(abs(lo), abs(hi), 1e-300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _long_run(spec: ModelSpec, points: int, batches: int, stream: int):
    """Yield ``batches`` independent stationary runs adding up to ``points`` observations."""
    per = -(-points // batches)
    for b in range(batches):
        yield simulate(ModelSpec(spec.id, per, spec.seed, spec.burn_in), stream * batches + b)


def true_expectile(
    spec: ModelSpec,
    tau_prime: Level,
    points: int = 10_000_000,
    batches: int = 10,
    stream: int = 1_000_000,
) -> TrueValue:
    """Expectile of the stationary law of model a..d from a long simulation.

    The value solves the first-order condition on the pooled sample; the
    standard error comes from the spread of the per-batch solutions.
    ``stream`` offsets the replication keys so truths never reuse the
    streams of a coverage run.
    """
    if spec.id not in UNIVARIATE:
        raise ValueError("true_expectile needs a univariate model")
    runs = [s.values for s in _long_run(spec, points, batches, stream)]
    per_batch = np.array([expectile_by_bisection(v, tau_prime) for v in runs])
    pooled = np.concatenate(runs)
    value = expectile_by_bisection(pooled, tau_prime)
    se = float(np.std(per_batch, ddof=1) / math.sqrt(batches)) if batches > 1 else float("nan")
    return TrueValue("expectile", tau_prime, value, pooled.size, se)


def _conditional_mean(x: np.ndarray, y: np.ndarray, alpha: Level) -> float:
    q = np.quantile(y, alpha.tau, method="inverted_cdf")
    return float(x[y > q].mean())


def true_qmes(
    spec: ModelSpec,
    alpha: Level,
    points: int = 10_000_000,
    batches: int = 10,
    stream: int = 1_000_000,
) -> TrueValue:
    """``E(X | Y > q_alpha)`` of model e..h from a long simulation."""
    if spec.id not in BIVARIATE:
        raise ValueError("true_qmes needs a bivariate model")
    runs = [(b.x.values, b.y.values) for b in _long_run(spec, points, batches, stream)]
    per_batch = np.array([_conditional_mean(x, y, alpha) for x, y in runs])
    x = np.concatenate([r[0] for r in runs])
    y = np.concatenate([r[1] for r in runs])
    value = _conditional_mean(x, y, alpha)
    se = float(np.std(per_batch, ddof=1) / math.sqrt(batches)) if batches > 1 else float("nan")
    return TrueValue("qmes", alpha, value, x.size, se)


def alpha_for_tau_prime(
    spec: ModelSpec,
    tau_prime: Level,
    points: int = 10_000_000,
    batches: int = 10,
    stream: int = 2_000_000,
) -> Level:
    """Quantile level ``alpha`` with ``q_{Y,alpha}`` equal to the ``tau_prime`` expectile of ``y``.

    Both quantities are read off one long simulation of the ``y`` path.
    """
    if spec.id not in BIVARIATE:
        raise ValueError("alpha_for_tau_prime needs a bivariate model")
    y = np.concatenate([b.y.values for b in _long_run(spec, points, batches, stream)])
    xi = expectile_by_bisection(y, tau_prime)
    tail = np.count_nonzero(y > xi) / y.size
    return Level.from_tail(tail, "extreme")
