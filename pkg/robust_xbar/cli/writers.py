"""
Report writers.

Output is a pure function of the report: no timestamps, fixed key and row
order, floats in shortest round-trip form. Files are written atomically.
"""

import csv
import io
import json
from typing import Any, Dict, List, Sequence, Tuple, Union

from robust_xbar.charts import ControlLimits, PhaseIEstimate
from robust_xbar.core.files import PathLike, atomic_write_text
from robust_xbar.sensitivity import LimitRange, SweepRow
from robust_xbar.simulation.efficiency import EfficiencyReport
from robust_xbar.simulation.run_length import RunLengthReport

Report = Union[EfficiencyReport, RunLengthReport]


def dumps_json(document: Any) -> str:
    return json.dumps(document, indent=2) + "\n"


def dumps_csv(fieldnames: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
    output = io.StringIO()
    writer = csv.DictWriter(output, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return output.getvalue()


def limits_document(estimate: PhaseIEstimate, limits: ControlLimits) -> Dict[str, Any]:
    return {
        "method": estimate.method.value,
        "pooling": estimate.pooling.value,
        "location": estimate.location.estimator.value,
        "scale": estimate.scale.estimator.value,
        "m": estimate.m,
        "sizes": list(estimate.sizes),
        "mu_hat": estimate.mu_hat,
        "sigma_hat": estimate.sigma_hat,
        "nk": limits.n_k,
        "g": limits.g,
        "lcl": limits.lcl,
        "cl": limits.cl,
        "ucl": limits.ucl,
        "factor_version": estimate.factor_version,
    }


LIMITS_FIELDS = ("method", "pooling", "nk", "g", "mu_hat", "sigma_hat", "lcl", "cl", "ucl")


def limits_csv(estimate: PhaseIEstimate, limits: ControlLimits) -> str:
    document = limits_document(estimate, limits)
    return dumps_csv(LIMITS_FIELDS, [{k: document[k] for k in LIMITS_FIELDS}])


EFFICIENCY_FIELDS = (
    "kind",
    "estimator",
    "pooling",
    "variance",
    "bias",
    "mse",
    "re_percent",
    "theoretical_variance",
)

RUN_LENGTH_FIELDS = (
    "method",
    "pooling",
    "arl",
    "sdrl",
    "prl",
    "percentile",
    "skewness",
    "censored_count",
    "replications",
)


def report_csv(report: Report) -> str:
    """One row per cell, in report order."""
    document = report.to_dict()
    fields = EFFICIENCY_FIELDS if isinstance(report, EfficiencyReport) else RUN_LENGTH_FIELDS
    return dumps_csv(fields, [{k: cell[k] for k in fields} for cell in document["cells"]])


def write_report(report: Report, prefix: PathLike) -> Tuple[str, str]:
    """Write ``<prefix>.json`` and ``<prefix>.csv``; returns both paths."""
    json_path, csv_path = f"{prefix}.json", f"{prefix}.csv"
    atomic_write_text(json_path, dumps_json(report.to_dict()))
    atomic_write_text(csv_path, report_csv(report))
    return json_path, csv_path


SWEEP_FIELDS = ("delta", "method", "lcl", "cl", "ucl")


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    return dumps_csv(
        SWEEP_FIELDS,
        [
            {"delta": r.delta, "method": r.method.value, "lcl": r.lcl, "cl": r.cl, "ucl": r.ucl}
            for r in rows
        ],
    )


def range_lines(ranges: Dict[Any, LimitRange]) -> List[str]:
    """Text lines summarising the spread of each limit per method."""
    return [
        f"Method-{method.value}: range LCL={r.lcl:.6g} CL={r.cl:.6g} UCL={r.ucl:.6g}"
        for method, r in ranges.items()
    ]
