"""Figure rendering for the report path.

Every dataset command can drop a PNG next to its delimited output; figures
are rendered with the Agg backend so runs stay headless.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["figure.dpi"] = 140
plt.rcParams["savefig.bbox"] = "tight"
plt.rcParams["axes.grid"] = True
plt.rcParams["grid.alpha"] = 0.3


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_r_theta(thetas, ratios, kpz_limit: float, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.semilogx(thetas, ratios, "o-", ms=3, label="cumulant ratio")
    ax.axhline(kpz_limit, ls="--", color="gray", label=f"KPZ limit {kpz_limit:.5f}")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel(r"$R(\theta)$")
    ax.legend()
    return _save(fig, path)


def plot_rescaled_cumulants(thetas, table, path: Path) -> Path:
    """table: dict order -> list of values over thetas."""
    fig, axes = plt.subplots(1, len(table), figsize=(3.4 * len(table), 3.0))
    if len(table) == 1:
        axes = [axes]
    for ax, (order, vals) in zip(axes, sorted(table.items())):
        ax.semilogx(thetas, vals, "o-", ms=3)
        ax.set_xlabel(r"$\theta$")
        ax.set_ylabel(rf"$\tilde{{c}}_{order}$")
    fig.tight_layout()
    return _save(fig, path)


def plot_flow_diagram(c_grid, curves: dict[str, list[float]], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    for label, vals in curves.items():
        ax.plot(c_grid, vals, label=label)
    ax.set_xlabel("density c")
    ax.set_ylabel("current j(c)")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_ldf(zs, gs, xs, ghats, path: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    ax1.plot(zs, gs)
    ax1.set_xlabel("z")
    ax1.set_ylabel("G(z)")
    ax2.plot(xs, ghats)
    ax2.set_xlabel("x")
    ax2.set_ylabel(r"$\widehat{G}(x)$")
    fig.tight_layout()
    return _save(fig, path)


def plot_cluster_hist(hist: np.ndarray, geometric_ratio: float | None, path: Path) -> Path:
    sizes = np.arange(1, hist.shape[0])
    vals = hist[1:]
    keep = vals > 0
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.semilogy(sizes[keep], vals[keep], "o", ms=3, label="measured")
    if geometric_ratio is not None and 0 < geometric_ratio < 1:
        geo = (1 - geometric_ratio) * geometric_ratio ** (sizes - 1.0)
        ax.semilogy(sizes[keep], geo[keep], "-", label=f"geometric, ratio {geometric_ratio:.3f}")
    ax.set_xlabel("cluster size")
    ax.set_ylabel("probability")
    ax.legend()
    return _save(fig, path)


def plot_occupation(ns, exact_vals, other_vals, other_label: str, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.semilogy(ns, exact_vals, "o", ms=3, label="exact")
    ax.semilogy(ns, other_vals, "-", label=other_label)
    ax.set_xlabel("site occupation n")
    ax.set_ylabel("P(n)")
    ax.legend()
    return _save(fig, path)


def plot_correlations(lags, measured, errs, exact_vals, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.errorbar(lags, measured, yerr=errs, fmt="o", ms=3, capsize=2, label="sampled")
    ax.plot(lags, exact_vals, "-", label="transfer matrix")
    ax.set_xlabel("lag k")
    ax.set_ylabel("C(k)")
    ax.legend()
    return _save(fig, path)


def plot_current_trace(batch_means, j_exact: float | None, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    for r, series in enumerate(batch_means):
        ax.plot(series, alpha=0.6, lw=0.9, label=f"replica {r}" if r < 4 else None)
    if j_exact is not None and not math.isnan(j_exact):
        ax.axhline(j_exact, color="k", ls="--", label="exact J")
    ax.set_xlabel("batch")
    ax.set_ylabel("jumps per step")
    ax.legend(fontsize=7)
    return _save(fig, path)
