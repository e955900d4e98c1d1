"""Figure rendering for the experiment artifacts.

Companion plots for the CSV outputs, written as PNG files next to them.  The
CSVs remain the canonical machine-readable results; these are for eyeballing.
Uses the non-interactive Agg backend so rendering works headless.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ConvergenceRow, ScenarioCurve

__all__ = [
    "plot_convergence",
    "plot_curve",
    "plot_rate_paths",
]


def _atomic_savefig(fig, path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    fig.savefig(tmp, dpi=150, format=path.suffix.lstrip(".") or "png")
    os.replace(tmp, path)
    plt.close(fig)


def plot_convergence(rows: list[ConvergenceRow], scenario: str, path: str | Path) -> None:
    """Relative price error against N, log-log."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = [r.N for r in rows]
    errs = [max(r.rel_error, 1e-17) for r in rows]
    ax.loglog(ns, errs, "o-", color="tab:blue")
    ax.set_xlabel("N")
    ax.set_ylabel("relative price error")
    ax.set_title(f"Convergence to the Vasicek price ({scenario})")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    _atomic_savefig(fig, path)


def plot_curve(curve: ScenarioCurve, path: str | Path, title: str | None = None) -> None:
    """Bond price against time to maturity."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curve.maturities, curve.prices, "o-", color="tab:blue", ms=3)
    ax.axhline(1.0, color="grey", lw=0.8, ls="--")
    ax.set_xlabel("time to maturity (years)")
    ax.set_ylabel("zero-coupon bond price")
    ax.set_title(title or f"ZCB prices ({curve.model})")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _atomic_savefig(fig, path)


def plot_rate_paths(
    paths: list[tuple[np.ndarray, np.ndarray]], path: str | Path, title: str = "Short-rate paths"
) -> None:
    """Sample short-rate trajectories; piecewise-constant paths should be passed
    with their event times (rendered with post steps)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for times, rates in paths:
        ax.step(times, rates, where="post", lw=0.9)
    ax.axhline(0.0, color="grey", lw=0.8, ls="--")
    ax.set_xlabel("time (years)")
    ax.set_ylabel("short rate")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _atomic_savefig(fig, path)
