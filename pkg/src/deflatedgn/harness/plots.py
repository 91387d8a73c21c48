"""Figure rendering for run reports.

Every plot lands next to the CSV it visualizes.  The Agg backend is forced so
the harness works headless; all functions write a PNG and return its path.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

REGION_COLORS = {"green": "#2ca02c", "yellow": "#ffdf00", "red": "#d62728", "missing": "#bbbbbb"}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_convergence(path, traces, ylabel="residual norm", value=None):
    """Per-round convergence curves on a log scale.

    ``value`` picks the plotted quantity from each IterationRecord; defaults
    to the residual norm.
    """
    value = value or (lambda rec: rec.residual_norm)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, trace in enumerate(traces):
        ys = np.array([max(value(rec), 1e-300) for rec in trace])
        ax.semilogy(np.arange(len(ys)), ys, lw=1.0, label=f"round {i}")
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    if len(traces) <= 12:
        ax.legend(fontsize=7, ncol=2)
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_solutions_2d(path, problem, points, bounds=None):
    """Found points over log-objective contours of a 2-parameter problem."""
    from ..problems import objective

    pts = np.array([np.real(p) for p in points]) if points else np.empty((0, 2))
    if bounds is None:
        if pts.size:
            lo = pts.min(axis=0) - 2.0
            hi = pts.max(axis=0) + 2.0
        else:
            lo, hi = np.array([-6.0, -6.0]), np.array([6.0, 6.0])
    else:
        lo, hi = np.asarray(bounds)[:, 0], np.asarray(bounds)[:, 1]
    xs = np.linspace(lo[0], hi[0], 201)
    ys = np.linspace(lo[1], hi[1], 201)
    zz = np.array([[np.log10(1e-300 + objective(problem, np.array([x, y]))) for x in xs] for y in ys])
    fig, ax = plt.subplots(figsize=(6, 5))
    cs = ax.contourf(xs, ys, zz, levels=30, cmap="viridis")
    fig.colorbar(cs, ax=ax, label="log10 f")
    if pts.size:
        ax.plot(pts[:, 0], pts[:, 1], "o", color="white", mec="black", ms=5)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return _save(fig, path)


def plot_bvp_solutions(path, grid, coefficient_vectors):
    """Real part of each converged BVP solution on the collocation grid."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, c in enumerate(coefficient_vectors):
        ax.plot(grid.nodes, np.real(grid.evaluate(c)), lw=1.2, label=f"solution {i}")
    ax.set_xlabel("x")
    ax.set_ylabel("u(x)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_beta_field(path, xs, ys, beta, regions, epsilon):
    """Classified beta regions plus the beta = 1 contour."""
    fig, ax = plt.subplots(figsize=(6, 5))
    codes = {"green": 0, "yellow": 1, "red": 2, "missing": 3}
    img = np.vectorize(codes.get)(regions)
    cmap = matplotlib.colors.ListedColormap(
        [REGION_COLORS[k] for k in ("green", "yellow", "red", "missing")]
    )
    ax.pcolormesh(xs, ys, img.T, cmap=cmap, vmin=-0.5, vmax=3.5, shading="nearest")
    finite = np.isfinite(beta)
    if finite.any():
        ax.contour(xs, ys, beta.T, levels=[1.0], colors="black", linewidths=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"beta regions (epsilon = {epsilon:g})")
    return _save(fig, path)


def plot_discoveries(path, series, xlabel="discovery index", ylabel="cumulative residual evaluations"):
    """Cumulative-cost curves; ``series`` maps labels to (index, cost) pairs."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, pairs in series.items():
        if not pairs:
            continue
        idx, cost = zip(*pairs)
        ax.semilogy(idx, cost, marker="o", ms=3, lw=1.0, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)
