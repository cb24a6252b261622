"""Matplotlib renderers for the report pipeline (file output only)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import Histogram
from .stats import ExpModel, LogNormalModel


def _exp_pdf(m: ExpModel, t: np.ndarray) -> np.ndarray:
    return np.where(t >= 0, m.rate * np.exp(-m.rate * t), 0.0)


def _lognormal_pdf(m: LogNormalModel, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = np.exp(-((np.log(tp) - m.alpha) ** 2) / (2 * m.beta**2)) / (
        m.beta * math.sqrt(2 * math.pi) * tp
    )
    return out


def render_fit_figure(hist: Histogram, exp_model: ExpModel | None,
                      logn_model: LogNormalModel | None, out_path,
                      title: str | None = None) -> None:
    """Density histogram with the fitted PDF curves overlaid."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    centers = (hist.bin_edges[:-1] + hist.bin_edges[1:]) / 2.0
    ax.bar(centers, hist.densities, width=hist.bin_width, color="#9ecae1",
           edgecolor="#3182bd", linewidth=0.4, label="time data")
    grid = np.linspace(hist.bin_edges[0], hist.bin_edges[-1], 400)
    if exp_model is not None:
        ax.plot(grid, _exp_pdf(exp_model, grid), "r-", lw=1.6,
                label=f"exponential (rate={exp_model.rate:.3g})")
    if logn_model is not None:
        ax.plot(grid, _lognormal_pdf(logn_model, grid), "k--", lw=1.6,
                label=f"log-normal (a={logn_model.alpha:.3g}, b={logn_model.beta:.3g})")
    ax.set_xlabel("time to solution [s]")
    ax.set_ylabel("probability density")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_ratio_figure(report: dict, out_path) -> None:
    """Grouped bars of the mean-time ratios from a performance report."""
    rows = report["ratios"]
    if not rows:
        raise ValueError("report contains no ratios")
    labels = [f"{r['numerator']}/{r['denominator']}\n{r['family'][:3]} {r['range'] or ''}"
              for r in rows]
    values = [r["ratio"] for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 0.8 * len(rows)), 4))
    ax.bar(range(len(rows)), values, color="#a1d99b", edgecolor="#31a354")
    ax.axhline(1.0, color="grey", lw=0.8, ls=":")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylabel("mean-time ratio")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_geodesic_profiles(paths: list, labels: list[str], out_path) -> None:
    """alpha(r) and beta(r) profiles of connecting geodesics."""
    fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(9, 4))
    for path, label in zip(paths, labels):
        ax_a.plot(path.r, path.alpha, lw=1.4, label=label)
        ax_b.plot(path.r, path.beta, lw=1.4, label=label)
    ax_a.set_xlabel("r")
    ax_a.set_ylabel("alpha(r)")
    ax_b.set_xlabel("r")
    ax_b.set_ylabel("beta(r)")
    ax_b.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
