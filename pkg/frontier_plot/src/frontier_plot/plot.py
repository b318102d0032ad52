"""Render solver reports: 2D frontier bound plots and 3D direction-region maps.

Reads only the published report JSON.  Coordinates are the report's exact
rationals converted to floats once, with no resampling; colors follow the
region index so renders are reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Polygon


class PlotError(ValueError):
    pass


@dataclass(frozen=True)
class PlotJob:
    report_path: str
    state: str | None
    out_path: str
    mode: str  # "frontier2d" | "regions3"
    mec: str | None = None

    def __post_init__(self):
        if self.mode not in ("frontier2d", "regions3"):
            raise PlotError(f"unknown mode: {self.mode!r}")


def load_report(path: str) -> dict:
    with open(path) as fh:
        report = json.load(fh)
    for key in ("dimension", "states", "regions", "gap", "converged"):
        if key not in report:
            raise PlotError(f"report is missing {key!r}")
    return report


def _coords(raw) -> list[float]:
    return [float(Fraction(c)) for c in raw]


def piece_coordinates(pieces) -> list[list[list[float]]]:
    """Generator coordinates of every piece, as floats of the exact rationals."""
    return [[_coords(gen) for gen in piece] for piece in pieces]


def _frontier_polygon(generators: list[list[float]]) -> list[tuple[float, float]]:
    """Closed polygon of a 2D piece: origin, up the y-axis, along the frontier
    staircase, back down to the x-axis."""
    pts = sorted(generators)
    path = [(0.0, 0.0), (0.0, pts[0][1])]
    for i, (x, y) in enumerate(pts):
        path.append((x, y))
        if i + 1 < len(pts):
            path.append((pts[i + 1][0], y))
    path.append((pts[-1][0], 0.0))
    return path


def plot_frontier2d(report: dict, state: str, out_path: str) -> dict:
    """Lower bound filled, upper bound outlined, the gap shaded between them.

    Returns the exact coordinate lists that were drawn, keyed by bound side.
    """
    if report["dimension"] != 2:
        raise PlotError(f"frontier2d needs a 2-target report, got n={report['dimension']}")
    if state not in report["states"]:
        raise PlotError(f"state {state!r} not in the report")
    bounds = report["states"][state]
    lower = piece_coordinates(bounds["lower"])
    upper = piece_coordinates(bounds["upper"])

    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    for piece in upper:
        poly = _frontier_polygon(piece)
        ax.add_patch(Polygon(poly, closed=True, facecolor="#ffd9b0", edgecolor="none"))
    for piece in lower:
        poly = _frontier_polygon(piece)
        ax.add_patch(Polygon(poly, closed=True, facecolor="#7fb2d9", edgecolor="none"))
    for piece in upper:
        poly = _frontier_polygon(piece)
        xs, ys = zip(*(poly + [poly[0]]))
        ax.plot(xs, ys, color="#b35900", linewidth=1.4)
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    ax.set_aspect("equal")
    ax.set_xlabel("target 1 probability")
    ax.set_ylabel("target 2 probability")
    ax.set_title(f"bounds at {state} (gap {report['gap']})")
    fig.savefig(out_path, dpi=110, metadata={})
    plt.close(fig)
    return {"state": state, "lower": lower, "upper": upper}


_TRIANGLE = {
    0: (1.0, 0.0),  # [(1,0,0)] bottom right
    1: (-1.0, 0.0),  # [(0,1,0)] bottom left
    2: (0.0, 1.7320508075688772),  # [(0,0,1)] top
}


def _project_direction(coords: list[float]) -> tuple[float, float]:
    x = sum(c * _TRIANGLE[i][0] for i, c in enumerate(coords))
    y = sum(c * _TRIANGLE[i][1] for i, c in enumerate(coords))
    return x, y


def _palette(index: int) -> tuple:
    return plt.get_cmap("tab20")(index % 20)


def plot_regions3(report: dict, out_path: str, mec: str | None = None) -> dict:
    """Direction-triangle map of one MEC's region partition.

    Regions are color-coded by index: open triangles filled, segments drawn as
    lines, point regions as dots.  Returns the drawn region data.
    """
    if report["dimension"] != 3:
        raise PlotError(f"regions3 needs a 3-target report, got n={report['dimension']}")
    if not report["regions"]:
        raise PlotError("report contains no region partitions")
    entry = None
    if mec is None:
        entry = report["regions"][0]
    else:
        wanted = sorted(mec.split(","))
        for candidate in report["regions"]:
            if candidate["mec"] == wanted:
                entry = candidate
        if entry is None:
            raise PlotError(f"no partition for a component with states {wanted}")

    fig, ax = plt.subplots(figsize=(5, 4.6))
    corner = [_TRIANGLE[0], _TRIANGLE[2], _TRIANGLE[1]]
    xs, ys = zip(*(corner + [corner[0]]))
    ax.plot(xs, ys, color="0.6", linewidth=1.0)
    drawn = []
    for index, region in enumerate(entry["regions"]):
        vertices = [_coords(v) for v in region["vertices"]]
        pts = [_project_direction(v) for v in vertices]
        color = _palette(index)
        if len(pts) == 1:
            ax.plot([pts[0][0]], [pts[0][1]], marker="o", markersize=5, color=color)
        elif len(pts) == 2:
            ax.plot([pts[0][0], pts[1][0]], [pts[0][1], pts[1][1]], color=color, linewidth=1.6)
        else:
            ax.add_patch(Polygon(pts, closed=True, facecolor=color, edgecolor="none", alpha=0.85))
        drawn.append({"index": index, "vertices": vertices, "argmin": region.get("argmin", {})})
    for i, label in ((0, "[(1,0,0)]"), (1, "[(0,1,0)]"), (2, "[(0,0,1)]")):
        x, y = _TRIANGLE[i]
        ax.annotate(label, (x, y), textcoords="offset points", xytext=(0, -12 if y == 0 else 6),
                    ha="center", fontsize=8)
    ax.set_xlim(-1.25, 1.25)
    ax.set_ylim(-0.25, 1.95)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title("regions for " + ",".join(entry["mec"]))
    fig.savefig(out_path, dpi=110, metadata={})
    plt.close(fig)
    return {"mec": entry["mec"], "regions": drawn}


def run_job(job: PlotJob) -> dict:
    report = load_report(job.report_path)
    if job.mode == "frontier2d":
        if job.state is None:
            raise PlotError("frontier2d needs --state")
        return plot_frontier2d(report, job.state, job.out_path)
    return plot_regions3(report, job.out_path, job.mec)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="frontier-plot", description="Render solver report files"
    )
    parser.add_argument("--report", required=True)
    parser.add_argument("--state", default=None)
    parser.add_argument("--mode", required=True, choices=("frontier2d", "regions3"))
    parser.add_argument("--mec", default=None, help="comma-separated state names")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        run_job(PlotJob(args.report, args.state, args.out, args.mode, args.mec))
    except (PlotError, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
