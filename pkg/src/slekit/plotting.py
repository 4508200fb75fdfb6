"""Matplotlib figures for CLI outputs (headless Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def report_figure(records: list[dict], out) -> Path:
    """Deviation of each estimate from its exact value, with the 3-sigma
    band and the discretization allowance."""
    out = Path(out)
    n = len(records)
    fig, ax = plt.subplots(figsize=(7.5, 0.45 * n + 1.6))
    y = np.arange(n)[::-1]
    for yi, r in zip(y, records):
        dev = r["mean"] - r["exact"]
        band = 3.0 * r["std_err"]
        color = "tab:green" if r["pass"] else "tab:red"
        ax.barh(yi, 2 * (band + r["allowance"]), left=-(band + r["allowance"]), height=0.6,
                color="0.88")
        ax.barh(yi, 2 * band, left=-band, height=0.6, color="0.75")
        ax.plot([dev], [yi], "o", color=color)
    ax.axvline(0.0, color="black", lw=0.8)
    ax.set_yticks(y)
    ax.set_yticklabels([r["name"] for r in records], fontsize=8)
    ax.set_xlabel("estimate - exact (dark: 3 s.e., light: 3 s.e. + allowance)")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def trace_figure(points, out, radial: bool = False, title: str | None = None,
                 baseline: bool = True) -> Path:
    """Polyline plot; the unit circle (radial) or the real axis is drawn
    underneath unless ``baseline`` is off."""
    out = Path(out)
    pts = np.asarray(points, dtype=complex)
    fig, ax = plt.subplots(figsize=(6, 6 if radial else 4))
    if radial:
        t = np.linspace(0, 2 * np.pi, 361)
        ax.plot(np.cos(t), np.sin(t), color="0.6", lw=0.6)
    elif baseline:
        ax.axhline(0.0, color="0.6", lw=0.6)
    ax.plot(pts.real, pts.imag, color="black", lw=0.5)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
