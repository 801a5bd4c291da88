"""
SVG charts of error curves and traces (matplotlib Agg backend + seaborn).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402

SVG_RC = {"svg.hashsalt": "helmholtz-ldg", "svg.fonttype": "none"}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def error_curve_chart(frame: pd.DataFrame, path, y: str = "h1_relative", x: str = "h", hue: str = "curve", title: str = "") -> Path:
    """Log-log error vs h, one line per value of ``hue``."""
    data = frame.dropna(subset=[x, y])
    data = data[data[y] > 0]
    with plt.rc_context(SVG_RC), sns.axes_style("whitegrid"):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        sns.lineplot(data=data, x=x, y=y, hue=hue, style=hue, markers=True, dashes=False, sort=True, ax=ax)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(x)
        ax.set_ylabel(y.replace("_", " "))
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)


def trace_chart(traces: dict[str, list[tuple[float, float]]], path, title: str = "") -> Path:
    """Re u(x, 0) curves; a curve labelled "exact" is drawn dotted."""
    rows = [{"x": x, "Re u": value, "curve": label} for label, samples in traces.items() for x, value in samples]
    frame = pd.DataFrame(rows)
    with plt.rc_context(SVG_RC), sns.axes_style("whitegrid"):
        fig, ax = plt.subplots(figsize=(7, 4))
        for label, group in frame.groupby("curve", sort=False):
            ax.plot(group["x"], group["Re u"], linestyle=":" if label == "exact" else "-", label=label)
        ax.set_xlabel("x")
        ax.set_ylabel("Re u(x, 0)")
        ax.legend()
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)
