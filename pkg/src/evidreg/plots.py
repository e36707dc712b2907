"""Figure rendering for the report commands.

Figures are written straight to files (Agg backend, no display), next to
the CSV output they illustrate.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_BAND_COLOR = "0.55"


def render_fit(
    path: str,
    x: np.ndarray,
    mu: np.ndarray,
    expect_lo: np.ndarray,
    expect_hi: np.ndarray,
    bands: dict[float, tuple[np.ndarray, np.ndarray]],
    scatter: tuple[np.ndarray, np.ndarray] | None = None,
) -> None:
    """One-dimensional fit plot: interval bands, point prediction line,
    dashed lower/upper expectations, optional data scatter."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for level in sorted(bands, reverse=True):
        lo, hi = bands[level]
        ax.fill_between(x, lo, hi, color=_BAND_COLOR,
                        alpha=0.25, linewidth=0, label=f"{level:g} interval")
    if scatter is not None:
        ax.plot(scatter[0], scatter[1], "o", color="C0", markersize=3,
                alpha=0.6, label="data")
    ax.plot(x, mu, "-", color="C3", linewidth=1.6, label="prediction")
    ax.plot(x, expect_lo, "--", color="C3", linewidth=1.0,
            label="lower/upper expectation")
    ax.plot(x, expect_hi, "--", color="C3", linewidth=1.0)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_coverage(
    path: str,
    levels: list[float],
    coverage: list[float],
    mean_width: list[float],
) -> None:
    """Reliability view: empirical vs nominal coverage, widths alongside."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.6))
    ax1.plot([0, 1], [0, 1], ":", color="0.5", linewidth=1)
    ax1.plot(levels, coverage, "o-", color="C0")
    ax1.set_xlabel("nominal level")
    ax1.set_ylabel("empirical coverage")
    ax1.set_xlim(0, 1.02)
    ax1.set_ylim(0, 1.02)
    finite = [w if np.isfinite(w) else 0.0 for w in mean_width]
    ax2.bar([f"{lv:g}" for lv in levels], finite, color="0.6")
    ax2.set_xlabel("level")
    ax2.set_ylabel("mean interval width")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
