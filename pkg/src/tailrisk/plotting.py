"""Figure output for estimate grids and coverage reports.

Figures are written straight to files with the Agg backend; the format
follows the file extension.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .core import DataError  # noqa: E402

__all__ = ["plot_estimates", "plot_coverage"]

STYLE = {
    "estimate": dict(color="black", lw=1.4),
    "lower": dict(color="tab:blue", lw=1.0, ls="--"),
    "upper": dict(color="tab:blue", lw=1.0, ls="--"),
}


def _num(v) -> float:
    if v is None or v == "":
        return math.nan
    return float(v)


def plot_estimates(rows: Sequence[dict], out: str | Path, title: str | None = None) -> Path:
    """Point estimate and interval bounds against ``k``.

    Each series is a separate line tagged with ``gid`` ``estimate``,
    ``lower`` and ``upper``; bounds are skipped when absent. A single row
    is drawn with markers.
    """
    if not rows:
        raise DataError("no rows to plot")
    try:
        ks = [int(float(r["k"])) for r in rows]
        series = {name: [_num(r.get(name)) for r in rows] for name in STYLE}
    except (KeyError, ValueError) as exc:
        raise DataError(f"malformed estimate rows: {exc}") from None
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    marker = "o" if len(rows) == 1 else None
    for name, ys in series.items():
        if all(math.isnan(y) for y in ys):
            continue
        (line,) = ax.plot(ks, ys, marker=marker, label=name, **STYLE[name])
        line.set_gid(name)
    ax.set_xlabel("k")
    ax.set_ylabel("estimate")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    out = Path(out)
    fig.savefig(out)
    plt.close(fig)
    return out


def plot_coverage(report, out: str | Path) -> Path:
    """Error rate (%) against ``k`` for every interval variant, with the nominal rate dotted."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    rates = report.error_rates
    marker = "o" if len(report.k_grid) == 1 else None
    for j, variant in enumerate(report.variants):
        ls = "-" if variant.startswith("LAWS") else "--"
        (line,) = ax.plot(report.k_grid, rates[:, j], ls=ls, marker=marker, label=variant)
        line.set_gid(variant)
    ax.axhline(report.nominal, color="red", ls=":", lw=1.0)
    ax.set_xlabel("k")
    ax.set_ylabel("error rate (%)")
    ax.set_ylim(0, 100)
    ax.set_title(f"model ({report.model}), {report.reps} replications")
    ax.legend(frameon=False, fontsize=7, ncol=2)
    fig.tight_layout()
    out = Path(out)
    fig.savefig(out)
    plt.close(fig)
    return out
