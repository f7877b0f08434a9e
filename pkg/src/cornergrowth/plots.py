"""Static figure rendering for the CLI report path.

Every experiment gets one PNG next to its CSV/JSON outputs.  Figures are
renderings of already-written data, never a data source of their own.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .stats import REFERENCE_CDFS, ExperimentReport  # noqa: E402

_CLUSTER_CMAP = ListedColormap(["#f5f5f5", "#4878b0", "#d65f5f"])


def _save(fig, path):
    fig.savefig(path, dpi=130)
    plt.close(fig)


def cdf_figure(samples, reference: str, title: str, path,
               xlabel="value") -> None:
    """Empirical CDF of the samples against the reference law."""
    x = np.sort(np.asarray(samples, dtype=float))
    y = np.arange(1, x.size + 1) / x.size
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(x, y, where="post", lw=1.2, label="empirical")
    grid = np.linspace(x[0], x[-1], 400)
    ax.plot(grid, REFERENCE_CDFS[reference](grid), "k--", lw=1.0,
            label=reference)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("CDF")
    ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    _save(fig, path)


def interface_figure(trace, path, title="competition interface") -> None:
    """The interface path in the lattice, colored by hitting time."""
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    pts = trace.sites
    sc = ax.scatter(pts[:, 0], pts[:, 1], c=trace.taus, s=4, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="hitting time")
    lim = max(pts[:, 0].max(), pts[:, 1].max()) + 1
    ax.plot([0, lim], [0, lim], color="0.8", lw=0.8, zorder=0)
    ax.set_xlim(0, lim)
    ax.set_ylim(0, lim)
    ax.set_xlabel("i")
    ax.set_ylabel("j")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def cluster_figure(label_grid, trace, path, t=None) -> None:
    """Competition clusters as an image with the interface overlaid."""
    fig, ax = plt.subplots(figsize=(6, 5.5))
    img = label_grid.labels[1:, 1:].T
    ax.imshow(img, origin="lower", cmap=_CLUSTER_CMAP, vmin=-0.5, vmax=2.5,
              extent=(0.5, label_grid.rows + 0.5, 0.5, label_grid.cols + 0.5),
              interpolation="nearest", alpha=0.85)
    if trace is not None:
        ax.plot(trace.sites[:, 0], trace.sites[:, 1], "k-", lw=1.4,
                label="interface")
        ax.legend(loc="upper right")
    ax.set_xlabel("i")
    ax.set_ylabel("j")
    ax.set_title("competition clusters" + (f" (t={t:g})" if t else ""))
    fig.tight_layout()
    _save(fig, path)


def deviation_figure(report: ExperimentReport, path) -> None:
    """Deviation/size scatter across the ladder with the power guide."""
    ns = np.asarray(report.samples["n"], dtype=float)
    dev = np.asarray(report.samples["deviation"], dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    for n in sorted(set(ns.tolist())):
        mask = ns == n
        ax.scatter(np.full(mask.sum(), n), dev[mask], s=5, alpha=0.3)
    grid = np.linspace(ns.min(), ns.max(), 100)
    expo = report.params.get("exponent", 0.8)
    ax.plot(grid, grid ** expo, "k--", lw=1.0, label=f"n^{expo}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("transversal deviation")
    ax.set_title("geodesic deviation scaling")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def occupancy_figure(report: ExperimentReport, path) -> None:
    """Per-site occupation frequencies of the two constructions."""
    sites = np.asarray(report.samples["site"], dtype=int)
    fh = np.asarray(report.samples["freq_harris"], dtype=float)
    fd = np.asarray(report.samples["freq_driven"], dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sites, fh, "o-", ms=3, lw=0.8, label="clock construction")
    ax.plot(sites, fd, "s--", ms=3, lw=0.8, label="grid construction")
    ax.set_xlabel("site")
    ax.set_ylabel("occupation frequency")
    ax.set_title(f"construction equivalence at t={report.params['T']:g}")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def coupling_figure(report: ExperimentReport, path) -> None:
    """Jump counts per seed; violations would show as red markers."""
    seeds = np.asarray(report.samples["seed"], dtype=int)
    jumps = np.asarray(report.samples["x_jumps"], dtype=int)
    bad = np.asarray(report.samples["violations"], dtype=int) > 0
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(seeds[~bad], jumps[~bad], ".", ms=4, label="verified")
    if bad.any():
        ax.plot(seeds[bad], jumps[bad], "rx", ms=6, label="violations")
    ax.set_xlabel("seed")
    ax.set_ylabel("marked-pair jumps")
    ax.set_title("pathwise coupling checks")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def stabilization_figure(report: ExperimentReport, path) -> None:
    """Coalescence indicator frequencies along the r-ladder."""
    rs = np.asarray(report.samples["r"], dtype=float)
    co = np.asarray(report.samples["coalesced"], dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    levels = sorted(set(rs.tolist()))
    fracs = [co[rs == r].mean() for r in levels]
    ax.plot(levels, fracs, "o-")
    ax.set_ylim(0, 1.05)
    ax.set_xlabel("r")
    ax.set_ylabel("coalesced fraction")
    ax.set_title("directional coalescence along the ladder")
    fig.tight_layout()
    _save(fig, path)


def shape_figure(report: ExperimentReport, path) -> None:
    """Histogram of the rescaled diagonal passage times."""
    vals = np.asarray(report.samples["g_over_n"], dtype=float)
    lo = report.tolerances["mean_low"]
    hi = report.tolerances["mean_high"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(vals, bins=16, color="#5a7fb5", edgecolor="white")
    ax.axvline(vals.mean(), color="k", lw=1.2, label=f"mean {vals.mean():.4f}")
    ax.axvspan(lo, hi, color="green", alpha=0.10, label="target window")
    ax.set_xlabel("G(n,n)/n")
    ax.set_title(f"shape check at n={report.params['n']}")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
