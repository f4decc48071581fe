"""Embedding files (vemb binary, CSV), score records and sweep tables.

vemb layout, all little-endian::

    offset  size  field
    0       4     magic  b"VEMB"
    4       2     version (uint16) = 1
    6       2     flags   (uint16) = 0
    8       8     n       (uint64)
    16      8     d       (uint64)
    24      4*n*d float32 payload, row-major
"""
from __future__ import annotations

import csv
import io as _io
import json
import struct
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .entropy import ScoreReport
from .errors import (
    BadMagic,
    InvalidParams,
    IoFailure,
    NonFiniteValue,
    PayloadSizeMismatch,
    RaggedRows,
    TruncatedPayload,
)
from .kernels import as_embeddings

MAGIC = b"VEMB"
VERSION = 1
HEADER = struct.Struct("<4sHHQQ")

SCORE_FIELDS = ("method", "kernel", "sigma", "alpha", "t", "seed", "n", "score", "entropy", "elapsed_seconds")
TABLE_COLUMNS = ("method", "alpha", "t", "sigma", "n", "repeat", "seed", "score", "elapsed_seconds")
STDOUT = ("-", "stdout")


@contextmanager
def _open_text(path, mode="w"):
    if path is None or str(path) in STDOUT:
        yield sys.stdout
        return
    try:
        with open(path, mode, newline="") as fh:
            yield fh
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def infer_format(path) -> str:
    return "csv" if Path(path).suffix.lower() in (".csv", ".txt") else "vemb"


def read_embeddings(path, format: str | None = None) -> np.ndarray:
    fmt = (format or infer_format(path)).lower()
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if fmt == "vemb":
        return _parse_vemb(data)
    if fmt == "csv":
        return _parse_csv(data.decode("utf-8"))
    raise InvalidParams(f"unknown embedding format {format!r}; expected 'vemb' or 'csv'")


def _check_finite(arr: np.ndarray) -> None:
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        i, j = bad[0]
        raise NonFiniteValue(f"non-finite value {arr[i, j]} at row {i}, column {j}")


def _parse_vemb(data: bytes) -> np.ndarray:
    if len(data) < HEADER.size:
        raise TruncatedPayload(f"file holds {len(data)} bytes, shorter than the {HEADER.size}-byte header")
    magic, version, flags, n, d = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"expected magic {MAGIC!r}, found {magic!r}")
    if version != VERSION or flags != 0:
        raise BadMagic(f"unsupported vemb version {version} / flags {flags}")
    payload = len(data) - HEADER.size
    expected = 4 * n * d
    if payload < expected:
        raise TruncatedPayload(f"header declares {n}x{d} values ({expected} bytes) but payload has {payload}")
    if payload > expected:
        raise PayloadSizeMismatch(f"payload has {payload - expected} trailing bytes beyond the declared {n}x{d}")
    arr = np.frombuffer(data, dtype="<f4", count=n * d, offset=HEADER.size).reshape(n, d)
    _check_finite(arr)
    return as_embeddings(arr.astype(np.float64))


def _parse_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise InvalidParams("CSV file contains no rows")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]  # header line
        if not rows:
            raise InvalidParams("CSV file has a header but no data rows")
    width = len(rows[0])
    values = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(f"data row {i} has {len(row)} fields, expected {width}")
        try:
            values.append([float(c) for c in row])
        except ValueError as exc:
            raise InvalidParams(f"data row {i}: {exc}") from None
    arr = np.array(values, dtype=np.float64)
    _check_finite(arr)
    return as_embeddings(arr)


def write_embeddings(E, path) -> None:
    """Write a vemb file. Values are stored as float32."""
    E = as_embeddings(E)
    n, d = E.shape
    blob = HEADER.pack(MAGIC, VERSION, 0, n, d) + E.astype("<f4").tobytes(order="C")
    try:
        Path(path).write_bytes(blob)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def score_record(report: ScoreReport) -> dict:
    """The ten score fields in their fixed order."""
    return {
        "method": report.method.value,
        "kernel": report.kernel.kind,
        "sigma": report.kernel.sigma,
        "alpha": report.alpha,
        "t": report.t,
        "seed": report.seed,
        "n": report.n,
        "score": report.score,
        "entropy": report.entropy,
        "elapsed_seconds": report.elapsed_seconds,
    }


def _csv_cell(value) -> str:
    return "" if value is None else repr(value) if isinstance(value, float) else str(value)


def write_score(reports, path, format: str = "json-lines") -> None:
    """Write one record per report; ``path`` of ``"-"``/``"stdout"`` writes to stdout."""
    if isinstance(reports, ScoreReport):
        reports = [reports]
    fmt = format.lower()
    if fmt not in ("json-lines", "jsonl", "csv"):
        raise InvalidParams(f"unknown score format {format!r}; expected 'json-lines' or 'csv'")
    with _open_text(path) as fh:
        if fmt == "csv":
            fh.write(",".join(SCORE_FIELDS) + "\n")
            for rep in reports:
                rec = score_record(rep)
                fh.write(",".join(_csv_cell(rec[k]) for k in SCORE_FIELDS) + "\n")
        else:
            for rep in reports:
                fh.write(json.dumps(score_record(rep)) + "\n")


def write_table(rows, path, columns=TABLE_COLUMNS) -> None:
    """Write sweep rows (dicts) as CSV with a fixed header; missing cells are empty."""
    with _open_text(path) as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(row.get(c)) for c in columns) + "\n")


def read_table(path) -> list[dict]:
    """Parse a table written by :func:`write_table` back into string-valued dicts."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
