"""Counting-based audit of whether a shift leaves P(Y | V) unchanged.

A shift that only moves P(V) keeps every within-bin label rate fixed.  The
audit compares those rates between a source table and one or more shifted
tables.  Invariance of P(X | Y, V) is *not* checked; the report says so.
"""
from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientRowsError, VocabularyMismatchError

DEFAULT_TOLERANCE = 0.05
DEFAULT_MIN_BIN = 30
UNCHECKED_NOTE = "P(X|Y,V) invariance is not verified by this audit"


@dataclass(frozen=True)
class LabeledTable:
    """Rows of (covariate bin, binary label vector) belonging to one evaluation set."""

    set_id: str
    v_bins: np.ndarray
    labels: np.ndarray
    label_names: tuple[str, ...]
    vocabulary: tuple[str, ...]

    def __post_init__(self):
        v_bins = np.asarray(self.v_bins, dtype=object).astype(str)
        labels = np.asarray(self.labels, dtype=np.int8)
        if labels.ndim == 1:
            labels = labels[:, None]
        if labels.shape != (len(v_bins), len(self.label_names)):
            raise ValueError(f"labels shape {labels.shape} does not match rows/label names")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        vocab = tuple(str(b) for b in self.vocabulary)
        bad = set(np.unique(v_bins)) - set(vocab)
        if bad:
            raise VocabularyMismatchError(f"bins {sorted(bad)} are not in the vocabulary {vocab}")
        object.__setattr__(self, "v_bins", v_bins)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "label_names", tuple(self.label_names))
        object.__setattr__(self, "vocabulary", vocab)

    def __len__(self) -> int:
        return len(self.v_bins)

    def take(self, idx, set_id: str) -> "LabeledTable":
        return LabeledTable(set_id, self.v_bins[idx], self.labels[idx], self.label_names,
                            self.vocabulary)


def read_tables(path, vocabulary: Sequence[str] | None = None) -> list[LabeledTable]:
    """Parse ``set,v_bin,label_1,...`` text into one table per set id."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["set", "v_bin"] or len(header) < 3:
            raise ValueError(f"{path}: header must be 'set,v_bin,<label>,...'")
        rows = [r for r in reader if r]
    names = tuple(header[2:])
    if vocabulary is None:
        vocabulary = tuple(dict.fromkeys(r[1] for r in rows))
    grouped: dict[str, list] = {}
    for r in rows:
        if len(r) != len(header):
            raise ValueError(f"{path}: row {r} has {len(r)} fields, expected {len(header)}")
        grouped.setdefault(r[0], []).append(r)
    return [
        LabeledTable(sid, [r[1] for r in rs], [[int(c) for c in r[2:]] for r in rs], names,
                     vocabulary)
        for sid, rs in grouped.items()
    ]


def write_tables(path, tables: Sequence[LabeledTable]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["set", "v_bin", *tables[0].label_names])
        for t in tables:
            for b, row in zip(t.v_bins, t.labels):
                writer.writerow([t.set_id, b, *row.tolist()])


def subsample_shift(table: LabeledTable, high_bin: str, fraction: float, n: int, seed) -> LabeledTable:
    """Draw ``n`` rows without replacement, ``ceil(fraction * n)`` of them from ``high_bin``."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    if high_bin not in table.vocabulary:
        raise VocabularyMismatchError(f"{high_bin!r} is not in the vocabulary")
    n_high = math.ceil(fraction * n - 1e-9)
    high = np.flatnonzero(table.v_bins == high_bin)
    rest = np.flatnonzero(table.v_bins != high_bin)
    if len(high) < n_high:
        raise InsufficientRowsError(f"bin {high_bin!r} has {len(high)} rows, need {n_high}")
    if len(rest) < n - n_high:
        raise InsufficientRowsError(
            f"bins other than {high_bin!r} have {len(rest)} rows, need {n - n_high}"
        )
    rng = np.random.default_rng(seed)
    picked = np.concatenate([rng.choice(high, n_high, replace=False),
                             rng.choice(rest, n - n_high, replace=False)])
    return table.take(np.sort(picked), f"{round(100 * fraction)}% {high_bin}")


@dataclass(frozen=True)
class CondEstimate:
    estimate: float | None
    count: int


def estimate_cond(table: LabeledTable) -> dict[tuple[str, str], CondEstimate]:
    """``{(label, bin): P(label=1 | bin)}`` by counting; empty bins give ``None``."""
    if len(table) == 0:
        raise ValueError("cannot estimate from an empty table")
    out = {}
    for b in table.vocabulary:
        mask = table.v_bins == b
        count = int(mask.sum())
        rates = table.labels[mask].mean(axis=0) if count else [None] * len(table.label_names)
        for name, rate in zip(table.label_names, rates):
            out[name, b] = CondEstimate(None if rate is None else float(rate), count)
    return out


@dataclass(frozen=True)
class AuditEntry:
    set_id: str
    label: str
    v_bin: str
    estimate: float | None
    count: int
    deviation: float | None
    included: bool


@dataclass
class ShiftAuditReport:
    entries: list[AuditEntry]
    max_deviation: dict[str, float]
    verdict: str
    tolerance: float
    min_bin: int
    note: str = field(default=UNCHECKED_NOTE)

    @property
    def overall_max(self) -> float:
        return max(self.max_deviation.values())

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["set", "label", "v_bin", "estimate", "count", "abs_deviation",
                             "included"])
            for e in self.entries:
                writer.writerow([e.set_id, e.label, e.v_bin,
                                 "" if e.estimate is None else repr(e.estimate), e.count,
                                 "" if e.deviation is None else repr(e.deviation),
                                 int(e.included)])
            for label, dev in self.max_deviation.items():
                writer.writerow(["#max_deviation", label, "", "", "", repr(dev), ""])
            writer.writerow([f"#verdict={self.verdict}", f"tolerance={self.tolerance}",
                             f"min_bin={self.min_bin}", self.note])


def audit(source: LabeledTable, targets: Sequence[LabeledTable], tolerance: float = DEFAULT_TOLERANCE,
          min_bin: int = DEFAULT_MIN_BIN) -> ShiftAuditReport:
    """Largest |P_t(Y|V) - P_s(Y|V)| over labels, bins and targets.

    Bins with fewer than ``min_bin`` rows in either table are reported but do
    not enter the verdict.  The verdict is ``cause_consistent`` iff the
    largest included deviation is at most ``tolerance``.
    """
    for t in targets:
        if t.vocabulary != source.vocabulary:
            raise VocabularyMismatchError(
                f"set {t.set_id!r} vocabulary {t.vocabulary} != source {source.vocabulary}")
        if t.label_names != source.label_names:
            raise VocabularyMismatchError(
                f"set {t.set_id!r} labels {t.label_names} != source {source.label_names}")
    src = estimate_cond(source)
    entries = [AuditEntry(source.set_id, label, b, e.estimate, e.count, 0.0 if e.estimate is not None else None,
                          e.count >= min_bin)
               for (label, b), e in src.items()]
    max_dev = {name: 0.0 for name in source.label_names}
    compared = 0
    for t in targets:
        for (label, b), e in estimate_cond(t).items():
            s = src[label, b]
            dev = None
            if e.estimate is not None and s.estimate is not None:
                dev = abs(e.estimate - s.estimate)
            included = dev is not None and e.count >= min_bin and s.count >= min_bin
            if included:
                compared += 1
                max_dev[label] = max(max_dev[label], dev)
            entries.append(AuditEntry(t.set_id, label, b, e.estimate, e.count, dev, included))
    if targets and compared == 0:
        raise InsufficientRowsError(f"no (label, bin) pair reaches min_bin={min_bin} rows in both sets")
    verdict = "cause_consistent" if max(max_dev.values()) <= tolerance else "inconsistent"
    return ShiftAuditReport(entries, max_dev, verdict, tolerance, min_bin)
