"""Figure rendering for the report path.

Every renderer takes already-computed rows and writes a PNG next to the
delimited output the CLI produces; nothing here recomputes mathematics.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGSIZE = (6.4, 4.2)
DPI = 150


def render_power_norms(rows, path):
    """Decay plot of k-th root power norms: rows of (k, norm, root)."""
    ks = [r[0] for r in rows]
    roots = [float(r[2]) for r in rows]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(ks, roots, marker="o", ms=3, lw=1.2, color="#1f6fb2")
    ax.set_xlabel("power k")
    ax.set_ylabel("norm$^{1/k}$")
    ax.set_title("power-norm roots")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def render_annulus(inner, outer, path):
    """The optimal annulus as a shaded band in the complex plane."""
    inner, outer = float(inner), float(outer)
    theta = np.linspace(0.0, 2 * np.pi, 512)
    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    if outer > 0:
        ax.fill(np.concatenate([outer * np.cos(theta), inner * np.cos(theta[::-1])]),
                np.concatenate([outer * np.sin(theta), inner * np.sin(theta[::-1])]),
                color="#1f6fb2", alpha=0.35, lw=0)
        ax.plot(outer * np.cos(theta), outer * np.sin(theta), color="#1f6fb2", lw=1.2)
        if inner > 0:
            ax.plot(inner * np.cos(theta), inner * np.sin(theta),
                    color="#1f6fb2", lw=1.2)
    ax.plot([0], [0], "k+", ms=8)
    lim = max(outer * 1.2, 1e-3)
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.set_title(f"spectral annulus  [{inner:g}, {outer:g}]")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def render_section(rows, path, axis_label="|s|"):
    """Radial in/out profile: rows of (modulus, inside)."""
    radii = [float(r) for r, _ in rows]
    inside = [1 if ok else 0 for _, ok in rows]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.step(radii, inside, where="post", color="#1f6fb2", lw=1.4)
    ax.fill_between(radii, inside, step="post", color="#1f6fb2", alpha=0.25)
    ax.set_xlabel(axis_label)
    ax.set_yticks([0, 1])
    ax.set_yticklabels(["outside", "inside"])
    ax.set_ylim(-0.1, 1.15)
    ax.set_title("hull cross-section")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path
