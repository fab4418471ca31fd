"""Render boundary-curve figures to image files (Agg backend, no display)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_region_figure(samples, surface_label: str, param_name: str, path: str) -> str:
    """Two-panel figure: bound values along the curve, and the corner
    trade-off curve in (C, Q, E) space. Returns the written path."""
    params = [s.param for s in samples]
    cq = [s.bounds.cq_bound for s in samples]
    qe = [s.bounds.qe_bound for s in samples]
    cqe = [s.bounds.cqe_bound for s in samples]

    fig = plt.figure(figsize=(10.0, 4.2))
    ax = fig.add_subplot(1, 2, 1)
    ax.plot(params, cq, label="C + 2Q bound", lw=1.5)
    ax.plot(params, qe, label="Q + E bound", lw=1.5)
    ax.plot(params, cqe, label="C + Q + E bound", lw=1.5)
    ax.set_xlabel(param_name)
    ax.set_ylabel("bits per channel use")
    ax.set_title(f"{surface_label}: boundary bounds")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)

    ax3 = fig.add_subplot(1, 2, 2, projection="3d")
    ax3.plot(
        [s.cef.c for s in samples],
        [s.cef.q for s in samples],
        [s.cef.e for s in samples],
        lw=1.8,
        color="tab:red",
    )
    ax3.set_xlabel("C")
    ax3.set_ylabel("Q")
    ax3.set_zlabel("E")
    ax3.set_title("corner trade-off curve")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
