"""
Phase-I dataset files: CSV with header ``sample_id,value``, one measurement per row.

Subgroups are formed by shared ``sample_id`` and kept in order of first
appearance; rows of one subgroup need not be adjacent.
"""

import csv
import io
import logging
import math
from typing import Dict, List, NamedTuple, Sequence

from robust_xbar.core.errors import DataError
from robust_xbar.core.files import PathLike, atomic_write_text
from robust_xbar.core.types import Subgroup

logger = logging.getLogger("robust_xbar.cli.datasets")

HEADER = ("sample_id", "value")


class DatasetSummary(NamedTuple):
    subgroups: int
    observations: int
    sizes: List[int]


def parse_dataset(text: str, origin: str = "<data>") -> List[Subgroup]:
    """
    Parse dataset text.

    Raises:
        DataError: On a wrong header, a malformed or non-finite value, or no data rows
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty dataset", path=origin) from None
    if tuple(h.strip().lower() for h in header) != HEADER:
        raise DataError(f"expected header 'sample_id,value', got {','.join(header)!r}", path=origin, line=1)

    groups: Dict[str, List[float]] = {}
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise DataError(f"expected 2 fields, got {len(row)}", path=origin, line=line)
        sample_id, raw = row[0].strip(), row[1].strip()
        if not sample_id:
            raise DataError("empty sample_id", path=origin, line=line)
        try:
            value = float(raw)
        except ValueError:
            raise DataError(f"value {raw!r} is not a number", path=origin, line=line) from None
        if not math.isfinite(value):
            raise DataError(f"value {raw!r} is not finite", path=origin, line=line)
        groups.setdefault(sample_id, []).append(value)

    if not groups:
        raise DataError("no data rows", path=origin)
    return [Subgroup.of(sample_id, values) for sample_id, values in groups.items()]


def read_dataset(path: PathLike) -> List[Subgroup]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            text = handle.read()
    except OSError as e:
        raise DataError(f"cannot read dataset: {e}", path=str(path)) from e
    samples = parse_dataset(text, origin=str(path))
    logger.debug(f"Read {len(samples)} subgroups from {path}")
    return samples


def dumps_dataset(samples: Sequence[Subgroup]) -> str:
    """Dataset text with every value written to 17 significant digits."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(HEADER)
    for sample in samples:
        for value in sample.values:
            writer.writerow([sample.id, format(value, ".17g")])
    return output.getvalue()


def write_dataset(samples: Sequence[Subgroup], path: PathLike) -> None:
    try:
        atomic_write_text(path, dumps_dataset(samples))
    except OSError as e:
        raise DataError(f"cannot write dataset: {e}", path=str(path)) from e


def summarize_dataset(samples: Sequence[Subgroup]) -> DatasetSummary:
    sizes = [sample.n for sample in samples]
    return DatasetSummary(subgroups=len(samples), observations=sum(sizes), sizes=sizes)
