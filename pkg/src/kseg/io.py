"""File formats: signal CSV, segmentation result JSON, corpus manifest.

Signals travel as UTF-8 CSV with a ``time`` column followed by one column
per feature; parse failures name the offending line.  Segmentation results
are single JSON documents; corpus manifests are JSON lines, one entry per
generated signal.  All writers are deterministic for fixed inputs (key
order and float formatting never depend on the environment).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .exceptions import SignalFormatError
from .signal import KSegment, Signal


def read_signal_csv(path) -> Signal:
    """Parse a signal file, reporting malformed content by line number."""
    path = Path(path)
    times: list[float] = []
    rows: list[list[float]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SignalFormatError(1, "empty file") from None
        if not header or header[0].strip() != "time":
            raise SignalFormatError(1, "first column must be 'time'")
        width = len(header)
        if width < 2:
            raise SignalFormatError(1, "need at least one feature column")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise SignalFormatError(
                    lineno, f"expected {width} columns, found {len(row)}"
                )
            try:
                values = [float(v) for v in row]
            except ValueError as err:
                raise SignalFormatError(lineno, str(err)) from None
            if not all(np.isfinite(values)):
                raise SignalFormatError(lineno, "non-finite value")
            if times and values[0] <= times[-1]:
                raise SignalFormatError(
                    lineno,
                    f"time {values[0]} does not increase past {times[-1]}",
                )
            times.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise SignalFormatError(2, "no data rows")
    return Signal(np.array(times), np.array(rows))


def write_signal_csv(path, signal: Signal) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["time"] + [f"f{j}" for j in range(signal.d)]
        )
        for t, x in zip(signal.times, signal.values):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in x])


def result_document(
    signal: Signal,
    segmentation: KSegment,
    cost: float,
    algorithm: str,
    elapsed_seconds: float,
) -> dict:
    """Assemble the JSON-ready result payload for one segmentation run."""
    cps = [int(b) for b in segmentation.change_points]
    return {
        "change_points": cps,
        "change_times": [float(signal.times[b]) for b in cps],
        "segments": [
            {
                "c": [float(v) for v in seg.intercept],
                "m": [float(v) for v in seg.slope],
                "start": seg.start_idx,
                "end": seg.end_idx,
            }
            for seg in segmentation.segments
        ],
        "cost": float(cost),
        "algorithm": algorithm,
        "elapsed_seconds": float(elapsed_seconds),
    }


def write_result_json(path, document: dict) -> None:
    Path(path).write_text(json.dumps(document, indent=2) + "\n")


def read_result_json(path) -> dict:
    return json.loads(Path(path).read_text())


def read_change_points(path) -> tuple[np.ndarray, int]:
    """Load change points and n from a result document or a bare
    {"n": ..., "change_points": [...]} file."""
    doc = read_result_json(path)
    cps = np.asarray(doc.get("change_points", []), dtype=np.intp)
    if "n" in doc:
        n = int(doc["n"])
    elif doc.get("segments"):
        n = int(doc["segments"][-1]["end"])
    else:
        raise ValueError(f"{path}: cannot determine signal length")
    return cps, n


def write_manifest(path, entries: list[dict]) -> None:
    with Path(path).open("w") as fh:
        for entry in entries:
            fh.write(json.dumps(entry) + "\n")


def read_manifest(path) -> list[dict]:
    entries = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries
