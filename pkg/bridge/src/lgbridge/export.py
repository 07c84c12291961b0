"""Run jobs and export measurement records in the shared CSV format.

The format contract: one integer per line, 2 * shots lines, even (0-based)
lines a literal 0 for the prepared state, odd lines the measured bit.
Writes are atomic (temp file + rename); a failed run leaves nothing behind.
"""

from __future__ import annotations

import datetime
import os
from dataclasses import dataclass
from pathlib import Path

from .backends import Backend, RunResult
from .circuits import JobSpec, build_circuit
from .errors import ExportFormatError

#: interval labels in export order; C31 runs at twice the base interval.
LABELS = ("C21", "C32", "C31")


@dataclass(frozen=True)
class ExportResult:
    path: Path
    metadata_path: Path
    job_id: str
    backend_name: str
    shots: int


def _validate_contract(path: Path, shots: int) -> None:
    """Re-read an export and enforce the record format contract."""
    lines = path.read_text(encoding="ascii").splitlines()
    if len(lines) != 2 * shots:
        raise ExportFormatError(
            f"{path}: expected {2 * shots} lines, found {len(lines)}"
        )
    for i, line in enumerate(lines):
        if i % 2 == 0 and line != "0":
            raise ExportFormatError(f"{path}:{i + 1}: placeholder line must be 0")
        if i % 2 == 1 and line not in ("0", "1"):
            raise ExportFormatError(f"{path}:{i + 1}: measured bit must be 0 or 1")


def run_and_export(spec: JobSpec, out_path, backend: Backend) -> ExportResult:
    """Run one job and write its interleaved record file atomically.

    The finished file is validated against the reader contract before the
    rename, and a job-metadata text file is written next to it.
    """
    out_path = Path(out_path)
    result: RunResult = backend.run(build_circuit(spec), shots=spec.shots)
    if len(result.memory) != spec.shots:
        raise ExportFormatError(
            f"backend returned {len(result.memory)} shots, expected {spec.shots}"
        )
    if any(bit not in ("0", "1") for bit in result.memory):
        raise ExportFormatError("per-shot memory must contain only '0' and '1'")

    out_path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = out_path.with_name(f".{out_path.name}.tmp-{os.getpid()}")
    try:
        with open(tmp_path, "w", encoding="ascii") as fh:
            for bit in result.memory:
                fh.write(f"0\n{bit}\n")
        _validate_contract(tmp_path, spec.shots)
        os.replace(tmp_path, out_path)
    finally:
        tmp_path.unlink(missing_ok=True)

    metadata_path = out_path.with_suffix(".meta.txt")
    metadata_path.write_text(
        f"backend = {result.backend_name}\n"
        f"job_id = {result.job_id}\n"
        f"date = {datetime.datetime.now().isoformat()}\n"
        f"shots = {spec.shots}\n"
        f"theta = {spec.theta}\n"
        f"interval_multiple = {spec.interval_multiple}\n",
        encoding="ascii",
    )
    return ExportResult(out_path, metadata_path, result.job_id,
                        result.backend_name, spec.shots)


def export_experiment(theta: float, shots: int, backend: Backend,
                      out_dir) -> list[ExportResult]:
    """Export the three record sets of one experiment, ordered by label."""
    out_dir = Path(out_dir)
    results = []
    for label in LABELS:
        multiple = 2 if label == "C31" else 1
        spec = JobSpec(theta=theta, interval_multiple=multiple, shots=shots,
                       backend=backend.name)
        path = out_dir / f"records_{label.lower()}.csv"
        results.append(run_and_export(spec, path, backend))
    return results
