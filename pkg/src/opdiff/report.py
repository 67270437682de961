"""CSV, SVG and JSON emission for curve data, figures and bound reports."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import matplotlib as mpl
import numpy as np
from matplotlib.figure import Figure
from pydantic import BaseModel
from pydantic_core import to_json

from opdiff.figures import FigureData
from opdiff.models import FigureSummary
from opdiff.quadrature import FloatArray

logger = logging.getLogger(__name__)

CANVAS_POINTS = (800, 600)
_SVG_RC = {
    "svg.hashsalt": "opdiff",
    "svg.fonttype": "none",
    "svg.image_inline": True,
}


def write_csv(path: Path, x: FloatArray, columns: Mapping[str, FloatArray]) -> Path:
    """One ``x`` column plus one column per curve, 17 significant digits, LF endings."""
    for name in columns:
        if "," in name or '"' in name:
            raise ValueError(f"column name {name!r} would need CSV quoting")
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([np.asarray(x, dtype=np.float64), *columns.values()])
    header = ",".join(["x", *columns])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", newline="\n", header=header, comments="")
    logger.info("wrote %s", path)
    return path


def write_svg(
    path: Path,
    x: FloatArray,
    columns: Mapping[str, FloatArray],
    *,
    title: str,
    ylabel: str,
) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    width, height = CANVAS_POINTS
    with mpl.rc_context(_SVG_RC):
        fig = Figure(figsize=(width / 72, height / 72), dpi=72)
        ax = fig.add_subplot()
        for name, values in columns.items():
            ax.plot(x, values, label=name, linewidth=1.2)
        ax.set_xlim(0.0, 1.0)
        ax.set_xlabel("x")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info("wrote %s", path)
    return path


def write_json(path: Path, document: BaseModel | Mapping[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = document.model_dump(mode="json") if isinstance(document, BaseModel) else document
    path.write_bytes(to_json(payload, indent=2) + b"\n")
    logger.info("wrote %s", path)
    return path


def figure_summary(data: FigureData) -> FigureSummary:
    fig = data.spec
    report = data.report
    return FigureSummary(
        example_id=fig.example_id,
        source=fig.source,
        family=fig.family,
        theorem=fig.theorem,
        r=fig.r,
        n_list=fig.n_list,
        left_n=fig.left_n,
        sup_errors=data.sup_errors,
        strictly_decreasing=data.strictly_decreasing,
        max_left_gap=data.max_gap,
        rhs_total_grid=report.rhs_total_grid,
        rhs_total_lipschitz=report.rhs_total_lipschitz,
        verdict=report.verdict,
        grid_points=report.grid_points,
    )


def emit_figure(data: FigureData, out_dir: Path) -> list[Path]:
    """figure{2e-1}.csv/.svg for the left curves, figure{2e}.csv/.svg for the errors,
    and example{e}.json with the summary."""
    fig = data.spec
    left, right = 2 * fig.example_id - 1, 2 * fig.example_id
    label = fig.spec(fig.left_n).label()
    ns = ", ".join(str(n) for n in fig.n_list)
    if not data.strictly_decreasing:
        logger.warning("example %d: sup errors do not decrease along n = %s", fig.example_id, ns)
    return [
        write_csv(out_dir / f"figure{left}.csv", data.x, data.left_columns),
        write_svg(
            out_dir / f"figure{left}.svg",
            data.x,
            data.left_columns,
            title=f"Example {fig.example_id}: {label}",
            ylabel=f"order {fig.r} derivatives",
        ),
        write_csv(out_dir / f"figure{right}.csv", data.x, data.right_columns),
        write_svg(
            out_dir / f"figure{right}.svg",
            data.x,
            data.right_columns,
            title=f"Example {fig.example_id}: E_n,{fig.r} for n = {ns}",
            ylabel="error",
        ),
        write_json(out_dir / f"example{fig.example_id}.json", figure_summary(data)),
    ]
