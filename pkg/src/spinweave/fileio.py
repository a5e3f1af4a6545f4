"""Artifact file formats: two-column CSV and JSON reports, written atomically.

CSV is comma-separated, '.' decimal, LF line endings, UTF-8, with a
mandatory header row; floats are written as %.16e (17 significant
digits) so a read/write round trip is exact.  Every writer goes through a temp file in the target
directory followed by os.replace, so readers never observe a partial
file.
"""

import json
import os
import tempfile

import numpy as np

from .errors import ValidationError
from .spectral import ModeSet

TRACE_HEADER = ("t_ps", "signal")
SPECTRUM_HEADER = ("freq_cm1", "power")
SWEEP_HEADER = ("B_T", "nu_PR", "nu_PRe", "nu_SF", "nu_2SF", "nu_3SF")
FC_HEADER = ("k", "intensity", "ratio_to_fundamental")


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp.", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _format_row(values) -> str:
    cells = []
    for v in values:
        if isinstance(v, (int, np.integer)):
            cells.append(str(int(v)))
        else:
            cells.append(format(float(v), ".16e"))
    return ",".join(cells)


def write_columns_csv(path: str, header, columns) -> None:
    columns = [np.asarray(c) for c in columns]
    if len(columns) != len(header):
        raise ValidationError("one column per header field required")
    n = columns[0].shape[0]
    if any(c.shape != (n,) for c in columns):
        raise ValidationError("all CSV columns must have equal length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(_format_row(c[i] for c in columns))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_trace_csv(path: str, t, y) -> None:
    write_columns_csv(path, TRACE_HEADER, [t, y])


def write_spectrum_csv(path: str, freq_cm1, power) -> None:
    write_columns_csv(path, SPECTRUM_HEADER, [freq_cm1, power])


def write_sweep_csv(path: str, table: dict) -> None:
    write_columns_csv(path, SWEEP_HEADER, [table[k] for k in SWEEP_HEADER])


def write_fc_csv(path: str, ladder: dict) -> None:
    write_columns_csv(
        path,
        FC_HEADER,
        [np.asarray(ladder["k"], dtype=int), ladder["intensity"], ladder["ratio_to_fundamental"]],
    )


def read_xy_csv(path: str, expected_header=TRACE_HEADER):
    """Two float columns from a CSV file; errors cite the offending line."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValidationError(f"{path}: empty file")
    header = tuple(h.strip() for h in lines[0].split(","))
    if header != tuple(expected_header):
        raise ValidationError(
            f"{path}: line 1: expected header {','.join(expected_header)!r}, "
            f"got {lines[0]!r}"
        )
    xs, ys = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValidationError(
                f"{path}: line {lineno}: expected 2 comma-separated values, got {line!r}"
            )
        try:
            xs.append(float(parts[0]))
            ys.append(float(parts[1]))
        except ValueError:
            raise ValidationError(
                f"{path}: line {lineno}: non-numeric value in {line!r}"
            ) from None
    if not xs:
        raise ValidationError(f"{path}: no data rows")
    return np.asarray(xs), np.asarray(ys)


def write_json(path: str, obj: dict) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def write_modes_json(path: str, modes: ModeSet, extra: dict | None = None) -> None:
    doc = modes.to_dict()
    if extra:
        doc.update(extra)
    write_json(path, doc)


def read_modes_json(path: str) -> ModeSet:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    try:
        return ModeSet.from_dict(doc)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: not a mode-set document ({exc})") from None
