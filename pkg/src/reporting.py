import csv
import os
from pathlib import Path

import numpy as np
from loguru import logger

from src.exceptions import GraphFormatError
from src.models import TraceRecord

TRACE_HEADER = ["phase", "iteration", "stage", "modularity", "moves", "millis"]
COLOR_HISTOGRAM_HEADER = ["phase", "color", "size"]


class TraceWriter:
    """
    Trace sink that streams records to a CSV file. Usable as a context
    manager; the instance itself is the callable handed to the engine.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.count = 0
        self._file = None
        self._writer = None

    def __enter__(self) -> "TraceWriter":
        if self.path.parent != Path(""):
            os.makedirs(self.path.parent, exist_ok=True)
        self._file = open(self.path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._file, lineterminator="\n")
        self._writer.writerow(TRACE_HEADER)
        return self

    def __call__(self, record: TraceRecord) -> None:
        self._writer.writerow(record.as_row())
        self.count += 1

    def __exit__(self, *exc) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None
        logger.info(f"Trace saved to {self.path} ({self.count} records)")


class TraceCollector(list):
    """In-memory trace sink."""

    def __call__(self, record: TraceRecord) -> None:
        self.append(record)

    def stages(self, phase: int) -> list[str]:
        return [r.stage for r in self if r.phase == phase]


def write_assignment(assignment: np.ndarray, path: str | os.PathLike) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        os.makedirs(path.parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for vertex, community in enumerate(np.asarray(assignment)):
            f.write(f"{vertex} {int(community)}\n")
    logger.info(f"Assignment saved to {path}")
    return path


def color_histogram_path(trace_path: str | os.PathLike) -> Path:
    trace_path = Path(trace_path)
    return trace_path.with_name(f"{trace_path.stem}_colors.csv")


def write_color_histogram(histograms: dict[int, np.ndarray], path: str | os.PathLike) -> Path:
    """One row per color class of every colored phase."""
    path = Path(path)
    if path.parent != Path(""):
        os.makedirs(path.parent, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(COLOR_HISTOGRAM_HEADER)
        for phase in sorted(histograms):
            for color, size in enumerate(histograms[phase]):
                writer.writerow([phase, color, int(size)])
    logger.info(f"Color histogram saved to {path} ({len(histograms)} colored phases)")
    return path


def read_assignment_map(path: str | os.PathLike) -> dict[int, int]:
    """
    Reads `vertex community` lines into a vertex -> community mapping. Blank
    lines and '#' comments are skipped; a vertex listed twice is an error.
    """
    mapping: dict[int, int] = {}
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 2:
                raise GraphFormatError(f"expected 'vertex community', got {line!r}", line_number)
            try:
                vertex, community = int(fields[0]), int(fields[1])
            except ValueError:
                raise GraphFormatError(f"non-integer field in {line!r}", line_number) from None
            if vertex in mapping:
                raise GraphFormatError(f"vertex {vertex} listed twice", line_number)
            mapping[vertex] = community
    return mapping


def read_assignment(path: str | os.PathLike) -> np.ndarray:
    """Assignment file whose vertices are exactly 0..n-1, as a dense array."""
    mapping = read_assignment_map(path)
    n = len(mapping)
    if set(mapping) != set(range(n)):
        raise GraphFormatError(f"{path}: vertex ids must be exactly 0..{n - 1}")
    return np.fromiter((mapping[v] for v in range(n)), dtype=np.int64, count=n)
