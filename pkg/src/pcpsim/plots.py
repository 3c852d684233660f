"""Figure rendering for the CLI report path.

Each report command saves a PNG next to its CSV so results can be eyeballed
without a separate plotting step.  Figures are written with empty PNG date
metadata to keep reruns byte-stable.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

_SAVE_KWARGS = {"dpi": 150, "metadata": {"Date": None}}


def _new_axes(xlabel: str, ylabel: str, title: str):
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _finish(fig, ax, path: Path) -> None:
    handles, _ = ax.get_legend_handles_labels()
    if handles:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_rmse_figure(path: Path, curves: list[dict], title: str) -> None:
    """RMSE (degrees) versus aggregation symbol index.

    Each curve dict carries ``label``, ``m``, ``rmse_deg``, and a ``kind``
    of "line" (theory) or "marker" (simulation).
    """
    fig, ax = _new_axes("OAC symbol index m", "RMSE of phase deviation (deg)", title)
    for curve in curves:
        if curve.get("kind") == "marker":
            ax.plot(curve["m"], curve["rmse_deg"], "x", ms=6, label=curve["label"])
        else:
            ax.plot(curve["m"], curve["rmse_deg"], "-", lw=1.2, label=curve["label"])
    _finish(fig, ax, path)


def save_cdf_figure(path: Path, curves: list[dict], title: str) -> None:
    """CDF of the absolute phase deviation versus threshold (degrees)."""
    fig, ax = _new_axes("|phase deviation| threshold (deg)", "CDF", title)
    for curve in curves:
        style = "--" if curve.get("kind") == "marker" else "-"
        ax.plot(curve["theta_deg"], curve["cdf"], style, lw=1.2, label=curve["label"])
    ax.set_ylim(0.0, 1.02)
    _finish(fig, ax, path)


def save_rate_figure(path: Path, entries: list[dict], title: str) -> None:
    """Computation rate versus number of aggregated symbols, per node count."""
    fig, ax = _new_axes("number of OAC symbols M", "rate (functions/(s*Hz))", title)
    for entry in entries:
        ax.plot(entry["m"], entry["rate_oac"], "-", lw=1.4,
                label=f"aggregation, K={entry['num_nodes']}")
        ax.axhline(entry["rate_traditional"], ls=":", lw=1.0,
                   label=f"collect-then-compute, K={entry['num_nodes']}")
    ax.set_xscale("log")
    _finish(fig, ax, path)
