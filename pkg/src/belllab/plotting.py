"""Figures for the CLI report path.

Only the Agg backend is used, so figures can be rendered headless.  PNG
metadata is stripped of the software tag to keep reruns byte-identical.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .scan import CellStatus  # noqa: E402

_PI_LABELS = ["0", r"$\pi/4$", r"$\pi/2$", r"$3\pi/4$", r"$\pi$"]


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_grid(grid, path, violations=(), stars=()):
    """Lattice of (A, B) pairs against (theta_a, -theta_b).

    Exact and parity-exact pairs are framed; cells with a Boole violation
    are drawn in red.  ``stars`` are extra (theta_a, theta_b) points, e.g.
    perturbed family points.
    """
    violated = {(c.i, c.j) for c, _ in violations}
    fig, ax = plt.subplots(figsize=(6, 6))
    for row in grid:
        for cell in row:
            x, y = cell.theta_a, -cell.theta_b
            framed = cell.status is not CellStatus.INFERRED
            color = "tab:red" if (cell.i, cell.j) in violated else "black"
            ax.plot(x, y, "o", color="white" if framed else "black", markeredgecolor="black", ms=6)
            bbox = dict(boxstyle="square,pad=0.2", fc="white", ec="black") if framed else None
            ax.annotate(f"({cell.A},{cell.B})", (x, y), textcoords="offset points", xytext=(0, 9),
                        ha="center", fontsize=9, color=color, bbox=bbox)
    for ta, tb in stars:
        ax.plot(ta, -tb, "*", color="tab:blue", ms=11)
    ticks = [k * math.pi / 4 for k in range(5)]
    ax.set_xticks(ticks, _PI_LABELS)
    ax.set_yticks(ticks, _PI_LABELS)
    ax.set_xlim(-0.35, math.pi + 0.35)
    ax.set_ylim(-0.35, math.pi + 0.5)
    ax.set_xlabel(r"$\theta_a$")
    ax.set_ylabel(r"$-\theta_b$")
    ax.set_title(r"$(\langle a,a'\rangle, \langle b,b'\rangle)$ on the family")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_claim2(trace, path, bound=2.0):
    eps = [s.epsilon for s in trace]
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    top.plot(eps, [s.plus_lhs for s in trace], "o-", label="upper signs")
    top.plot(eps, [s.minus_lhs for s in trace], "s-", label="lower signs")
    top.axhline(bound, color="grey", ls="--", lw=1)
    top.set_ylabel("Boole lhs")
    top.legend(frameon=False)
    bottom.plot(eps, [s.A for s in trace], "o-", label=r"$\langle a,a'\rangle$")
    bottom.plot(eps, [s.B for s in trace], "s-", label=r"$\langle b,b'\rangle$")
    bottom.set_xscale("log")
    bottom.set_xlabel(r"$\epsilon$")
    bottom.set_ylabel("same-side value")
    bottom.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)
