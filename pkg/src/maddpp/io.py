"""Records CSV schema shared by the simulated and real pipelines.

Header is exactly `proba,group,label`: proba as a decimal with 17
significant digits (lossless float round trip), group in {0, 1}, label in
{0, 1} or empty when absent.
"""

from __future__ import annotations

import csv

from .densities import ScoredRecord
from .errors import EmptyPopulation, InvalidProbability, MissingLabels

HEADER = ["proba", "group", "label"]


def format_proba(p: float) -> str:
    return format(p, ".17g")


def write_records(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for r in records:
            w.writerow([format_proba(r.proba), r.group,
                        "" if r.label is None else r.label])


def read_records(path, require_labels: bool = False) -> list[ScoredRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or reader.fieldnames[:2] != HEADER[:2]:
            raise InvalidProbability(f"{path}: expected header {','.join(HEADER)}")
        has_label_col = "label" in reader.fieldnames
        for row in reader:
            label_raw = row.get("label") if has_label_col else None
            label = None if label_raw in (None, "") else int(label_raw)
            if require_labels and label is None:
                raise MissingLabels(f"{path}: label required on every row")
            records.append(ScoredRecord(proba=float(row["proba"]),
                                        group=int(row["group"]), label=label))
    if not records:
        raise EmptyPopulation(f"{path}: no records")
    return records
