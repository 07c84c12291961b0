"""Shared measurement-record file format.

One integer per line, ``2 * n_shots`` lines in total. Lines at even
0-based indices hold the prepared-state placeholder ``0``; lines at odd
indices hold the measured bit (0 or 1). The same files feed correlation
analysis and note synthesis.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np


class RecordFormatError(ValueError):
    """Raised when a measurement-record file violates the line format."""

    def __init__(self, path, line_no: int | None, message: str):
        self.path = os.fspath(path)
        self.line_no = line_no
        where = self.path if line_no is None else f"{self.path}:{line_no}"
        super().__init__(f"{where}: {message}")


def write_bits(path, bits: Sequence[int]) -> None:
    """Write measured bits as an interleaved record file (placeholder 0 rows)."""
    arr = np.asarray(bits, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("bits must be a nonempty 1-D sequence")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("bits must contain only 0 and 1")
    out = np.zeros(2 * arr.size, dtype=np.int64)
    out[1::2] = arr
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(str(v) for v in out))
        fh.write("\n")


def read_bits(path, n_shots: int | None = None) -> np.ndarray:
    """Read measured bits from an interleaved record file.

    Validates the placeholder rows and, when ``n_shots`` is given, the
    exact line count ``2 * n_shots``. Returns the odd-line bits as uint8.
    """
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                raise RecordFormatError(path, line_no, "blank line in record file")
            try:
                values.append(int(text))
            except ValueError:
                raise RecordFormatError(
                    path, line_no, f"expected an integer, got {text!r}"
                ) from None

    if n_shots is not None and len(values) != 2 * n_shots:
        raise RecordFormatError(
            path, None, f"expected {2 * n_shots} lines for {n_shots} shots, got {len(values)}"
        )
    if len(values) == 0 or len(values) % 2 != 0:
        raise RecordFormatError(
            path, None, f"record files hold an even, nonzero line count, got {len(values)}"
        )

    for i in range(0, len(values), 2):
        if values[i] != 0:
            raise RecordFormatError(
                path, i + 1, f"prepared-state placeholder must be 0, got {values[i]}"
            )
    bits = np.asarray(values[1::2], dtype=np.int64)
    bad = np.nonzero((bits != 0) & (bits != 1))[0]
    if bad.size:
        line_no = 2 * int(bad[0]) + 2
        raise RecordFormatError(
            path, line_no, f"measured bit must be 0 or 1, got {values[line_no - 1]}"
        )
    return bits.astype(np.uint8)
