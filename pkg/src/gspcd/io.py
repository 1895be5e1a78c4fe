"""Readers and writers for rasters, target lists, detections and result tables.

Rasters are a raw little-endian float32 payload (``<name>.f32``) with a
``key=value`` text sidecar (``<name>.hdr``)::

    rows=3000
    cols=2000
    pixel_spacing_m=2.5
    dtype=float32
    byte_order=little
"""

from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import Detection, GspcdError, Image, Target

RASTER_DTYPE = np.dtype("<f4")
ROC_COLUMNS = ("C", "lambda", "detected", "known", "Pd", "false_alarms", "area_km2", "FAR")
DETECTION_COLUMNS = ("centroid_row", "centroid_col", "pixel_count",
                     "min_row", "min_col", "max_row", "max_col")
CASE_COLUMNS = ("mission", "pass", "known", "detected", "pd", "false_alarms")


class HeaderError(GspcdError):
    pass


class FormatError(GspcdError):
    pass


class DataError(GspcdError):
    pass


class ParseError(GspcdError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.lineno = lineno


def fmt(value) -> str:
    """Six significant digits, fixed ``.`` separator; integers verbatim."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6g}"


def header_path_for(data_path) -> Path:
    return Path(data_path).with_suffix(".hdr")


def _read_header(path) -> dict[str, str]:
    fields = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise HeaderError(f"{path}:{lineno}: expected key=value, got {line!r}")
            fields[key.strip()] = value.strip()
    return fields


def read_raster(data_path, header_path=None) -> Image:
    header_path = header_path_for(data_path) if header_path is None else header_path
    fields = _read_header(header_path)
    for key in ("rows", "cols", "pixel_spacing_m"):
        if key not in fields:
            raise HeaderError(f"{header_path}: missing key {key!r}")
    try:
        rows, cols = int(fields["rows"]), int(fields["cols"])
        spacing = float(fields["pixel_spacing_m"])
    except ValueError as exc:
        raise HeaderError(f"{header_path}: {exc}") from None
    if fields.get("dtype", "float32") != "float32" or fields.get("byte_order", "little") != "little":
        raise HeaderError(f"{header_path}: only little-endian float32 payloads are supported")
    if rows < 1 or cols < 1:
        raise HeaderError(f"{header_path}: rows and cols must be positive")

    payload = Path(data_path).read_bytes()
    expected = rows * cols * RASTER_DTYPE.itemsize
    if len(payload) != expected:
        raise FormatError(f"{data_path}: payload is {len(payload)} bytes, header implies {expected}")
    pixels = np.frombuffer(payload, dtype=RASTER_DTYPE).reshape(rows, cols)
    if not np.isfinite(pixels).all():
        r, c = np.argwhere(~np.isfinite(pixels))[0]
        raise DataError(f"{data_path}: non-finite pixel at (row={r}, col={c})")
    return Image(pixels, spacing)


def write_raster(image: Image, data_path, header_path=None) -> None:
    """Write ``image`` as float32. Values are rounded to float32 precision."""
    header_path = header_path_for(data_path) if header_path is None else header_path
    payload = np.ascontiguousarray(image.data, dtype=RASTER_DTYPE)
    header = (f"rows={image.rows}\ncols={image.cols}\n"
              f"pixel_spacing_m={image.pixel_spacing_m!r}\n"
              "dtype=float32\nbyte_order=little\n")
    Path(data_path).write_bytes(payload.tobytes())
    Path(header_path).write_text(header, encoding="utf-8")


def _data_lines(path):
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                yield lineno, stripped


def read_targets(path) -> list[Target]:
    targets = []
    for lineno, line in _data_lines(path):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ParseError(path, lineno, f"expected id,row,col, got {line!r}")
        try:
            row, col = float(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(path, lineno, f"non-numeric coordinate in {line!r}") from None
        if not (np.isfinite(row) and np.isfinite(col)):
            raise ParseError(path, lineno, "coordinates must be finite")
        targets.append(Target(parts[0], row, col))
    return targets


def write_targets(targets: Iterable[Target], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# id,row,col\n")
        for t in targets:
            fh.write(f"{t.id},{t.row!r},{t.col!r}\n")


def write_detections(detections: Sequence[Detection], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DETECTION_COLUMNS)
        for d in detections:
            writer.writerow([fmt(d.centroid_row), fmt(d.centroid_col), d.pixel_count,
                             *d.bounding_box])


def read_detections(path) -> list[Detection]:
    detections = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return detections
        if tuple(header) != DETECTION_COLUMNS:
            raise ParseError(path, 1, f"unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                cr, cc = float(row[0]), float(row[1])
                count, *bbox = (int(v) for v in row[2:])
                detections.append(Detection(cr, cc, count, tuple(bbox)))
            except (ValueError, TypeError) as exc:
                raise ParseError(path, lineno, str(exc)) from None
    return detections


def write_roc(table, path) -> None:
    """Write a ROC table as CSV.

    Real-valued columns use the shortest repr that round-trips exactly, so
    a re-read recovers the same doubles.
    """
    rows = list(table.rows if hasattr(table, "rows") else table)
    if not rows:
        raise ValueError("cannot write an empty ROC table")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROC_COLUMNS)
        for r in rows:
            writer.writerow([repr(float(r.c_constant)), repr(float(r.lam)), r.detected, r.known,
                             repr(float(r.pd)), r.false_alarms, repr(float(r.area_km2)),
                             repr(float(r.far))])


def read_roc(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != ROC_COLUMNS:
            raise ParseError(path, 1, f"unexpected header {reader.fieldnames}")
        out = []
        for rec in reader:
            out.append({k: int(v) if k in ("detected", "known", "false_alarms") else float(v)
                        for k, v in rec.items()})
    return out


def write_case_table(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CASE_COLUMNS)
        for r in rows:
            writer.writerow([r.mission, r.pass_, r.known, r.detected, fmt(r.pd), r.false_alarms])


def ensure_dir(path) -> Path:
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path
