"""Payoff polytope figure for two-player games."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .games import RepeatedGame  # noqa: E402
from .solvers.polytope import build_payoff_polytope, pareto_front  # noqa: E402


def emit_polytope_figure(game: RepeatedGame, path: str | Path) -> Path:
    """Write an SVG of the payoff points, hull edges (dashed) and front edges (solid).

    Elements carry ids ``point-i``, ``hull-edge-i`` and ``front-edge-i``.
    The file depends only on the game.
    """
    if game.player_count != 2:
        raise ValueError("the polytope figure is two-dimensional; need a 2-player game")
    poly = build_payoff_polytope(game)
    front = pareto_front(poly)
    path = Path(path)
    with plt.rc_context({"svg.hashsalt": "malbench", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(4, 4))
        edges = [f for f in poly.faces if f.dim == 1]
        front_edges = [f for f in front.maximal_faces() if f.dim == 1]
        for i, face in enumerate(edges):
            (x0, y0), (x1, y1) = poly.face_points(face)
            (line,) = ax.plot([x0, x1], [y0, y1], linestyle="--", color="0.5", linewidth=1)
            line.set_gid(f"hull-edge-{i}")
        for i, face in enumerate(front_edges):
            (x0, y0), (x1, y1) = poly.face_points(face)
            (line,) = ax.plot([x0, x1], [y0, y1], linestyle="-", color="black", linewidth=2)
            line.set_gid(f"front-edge-{i}")
        for i, (x, y) in enumerate(poly.points):
            (mark,) = ax.plot([x], [y], marker="*", color="black", markersize=10, linestyle="none")
            mark.set_gid(f"point-{i}")
        lo = float(poly.points.min()) - 0.5
        hi = float(poly.points.max()) + 0.5
        ax.set_xlim(lo, hi)
        ax.set_ylim(lo, hi)
        ax.set_xlabel("payoff to player 1")
        ax.set_ylabel("payoff to player 2")
        ax.set_aspect("equal")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return path
