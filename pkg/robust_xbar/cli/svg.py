"""SVG figures: the X-bar chart of a dataset and the limit curves of a sensitivity sweep."""

import io
from typing import Dict, List, Optional, Sequence

import matplotlib
from matplotlib.figure import Figure

from robust_xbar.charts import ControlLimits, Method
from robust_xbar.core.files import PathLike, atomic_write_text
from robust_xbar.core.types import Subgroup
from robust_xbar.sensitivity import SweepRow

# Fixed element ids and no creation date, so reruns give identical bytes.
_SVG_RC = {"svg.hashsalt": "robust-xbar", "svg.fonttype": "none"}

_METHOD_STYLES: Dict[Method, Dict[str, str]] = {
    Method.I: {"color": "black", "linestyle": "-"},
    Method.II: {"color": "tab:blue", "linestyle": "--"},
    Method.III: {"color": "tab:red", "linestyle": ":"},
}


def _render(figure: Figure) -> str:
    buffer = io.StringIO()
    with matplotlib.rc_context(_SVG_RC):
        figure.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def xbar_chart_svg(
    samples: Sequence[Subgroup], limits: ControlLimits, title: Optional[str] = None
) -> str:
    """Subgroup means with the center line and both control limits."""
    positions = list(range(1, len(samples) + 1))
    means = [sum(s.values) / s.n for s in samples]

    figure = Figure(figsize=(8, 4.5))
    axes = figure.add_subplot()
    axes.plot(positions, means, marker="o", color="black", linewidth=1)
    outside = [(x, y) for x, y in zip(positions, means) if y < limits.lcl or y > limits.ucl]
    if outside:
        axes.scatter(*zip(*outside), color="tab:red", zorder=3)
    for value, label, style in (
        (limits.ucl, "UCL", "--"),
        (limits.cl, "CL", "-"),
        (limits.lcl, "LCL", "--"),
    ):
        axes.axhline(value, color="tab:gray", linestyle=style, linewidth=1)
        axes.annotate(
            f"{label} = {value:.5f}",
            xy=(1.0, value),
            xycoords=("axes fraction", "data"),
            xytext=(4, 0),
            textcoords="offset points",
            va="center",
            fontsize=8,
        )
    axes.set_xlabel("Subgroup")
    axes.set_ylabel("Subgroup mean")
    if title:
        axes.set_title(title)
    figure.tight_layout()
    return _render(figure)


def sweep_svg(rows: Sequence[SweepRow], title: Optional[str] = None) -> str:
    """LCL, CL and UCL against delta, one line style per method."""
    by_method: Dict[Method, List[SweepRow]] = {}
    for row in rows:
        by_method.setdefault(row.method, []).append(row)

    figure = Figure(figsize=(8, 5))
    axes = figure.add_subplot()
    for method, selected in by_method.items():
        deltas = [r.delta for r in selected]
        style = _METHOD_STYLES[method]
        for attribute in ("ucl", "cl", "lcl"):
            axes.plot(
                deltas,
                [getattr(r, attribute) for r in selected],
                linewidth=1,
                label=f"Method-{method.value}" if attribute == "ucl" else None,
                **style,
            )
    axes.set_xlabel("delta")
    axes.set_ylabel("Control limits")
    axes.legend(loc="best", fontsize=8)
    if title:
        axes.set_title(title)
    figure.tight_layout()
    return _render(figure)


def write_svg(text: str, path: PathLike) -> None:
    atomic_write_text(path, text)
