"""Figure rendering for the report path.

Each CLI report that emits a CSV trace also renders the matching figure next
to it: the sector overlay, the Monte-Carlo norm tiles, the output traces, and
the benchmark runtime bars.  Rendering uses the Agg backend so it works in
headless runs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def sector_figure(ys, outs, lo, hi, path) -> Path | None:
    "Scalar-channel overlay of Phi(y) between the two sector lines."
    if ys.shape[0] != 1 or outs.shape[0] != 1:
        return None  # overlay only makes sense for p = m = 1
    fig, ax = plt.subplots(figsize=(5, 3.5))
    order = np.argsort(ys[0])
    ax.plot(ys[0][order], outs[0][order], "k-", lw=1.8, label="network output")
    ax.plot(ys[0][order], lo[0][order], "b--", lw=1.2, label="lower sector line")
    ax.plot(ys[0][order], hi[0][order], "r--", lw=1.2, label="upper sector line")
    ax.set_xlabel("y")
    ax.set_ylabel("u")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def convergence_figure(tiles, path, max_lines: int = 60) -> Path:
    "Grid of norm-decay tiles, thin per-trajectory curves plus bold median."
    count = len(tiles)
    ncols = min(count, 4) or 1
    nrows = (count + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.6 * nrows),
                             squeeze=False, sharex=True)
    for idx, tile in enumerate(tiles):
        ax = axes[idx // ncols][idx % ncols]
        for j in range(min(tile.norms.shape[1], max_lines)):
            ax.plot(tile.times, tile.norms[:, j], color="0.7", lw=0.4)
        ax.plot(tile.times, tile.median_norms, "b-", lw=1.6)
        prop = tile.proportion_converged
        label = "n/a" if np.isnan(prop) else f"{prop:.2f}"
        ax.set_title(f"plant {tile.plant_index}, tau={tile.tau:g}s: "
                     f"converged {label}", fontsize=8)
        ax.set_yscale("log")
        ax.grid(alpha=0.3)
    for idx in range(count, nrows * ncols):
        axes[idx // ncols][idx % ncols].axis("off")
    fig.supxlabel("t [s]", fontsize=9)
    fig.supylabel("||x(t)||", fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def outputs_figure(trace_sets, path) -> Path:
    """Output trajectories colored per sampled system.

    trace_sets: list of (label, times, outputs matrix (steps+1, k)).
    """
    fig, ax = plt.subplots(figsize=(6, 3.5))
    cmap = plt.get_cmap("tab10")
    for i, (label, times, outputs) in enumerate(trace_sets):
        color = cmap(i % 10)
        for j in range(outputs.shape[1]):
            ax.plot(times, outputs[:, j], color=color, lw=0.6,
                    label=label if j == 0 else None)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("y(t)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def bench_figure(rows, path) -> Path:
    "Log-scale runtime bars per (h, tau) row for the two methods."
    fig, ax = plt.subplots(figsize=(5, 3.2))
    labels = [f"h={r['h']:g}, tau={r['tau']:g}" for r in rows]
    xs = np.arange(len(rows))
    width = 0.35
    iqc = [r["iqc_seconds"] if r.get("iqc_seconds") else np.nan for r in rows]
    pos = [r["positivity_seconds"] for r in rows]
    ax.bar(xs - width / 2, iqc, width, label="IQC baseline")
    ax.bar(xs + width / 2, pos, width, label="positivity certificate")
    for x, r in zip(xs, rows):
        ax.text(x - width / 2, 1e-6, r["iqc_status"], rotation=90,
                ha="center", va="bottom", fontsize=7)
    ax.set_xticks(xs, labels, fontsize=8)
    ax.set_yscale("log")
    ax.set_ylabel("verification runtime [s]")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, axis="y")
    return _save(fig, path)
