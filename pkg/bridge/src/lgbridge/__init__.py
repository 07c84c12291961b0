"""Adapter between cloud quantum services and the shared record format.

Builds the single-qubit Rx-and-measure circuits, runs them on a backend
(a remote runtime service or the built-in sampling simulator), and exports
per-shot results as interleaved measurement-record CSVs that the analysis
and synthesis tools consume unchanged. No correlation math lives here.
"""

from .circuits import CircuitDescription, JobSpec, build_circuit
from .backends import Backend, LocalSamplingBackend, RunResult
from .errors import (
    AuthenticationError,
    BridgeError,
    ExportFormatError,
    JobFailedError,
    QueueTimeoutError,
)
from .export import ExportResult, export_experiment, run_and_export
from .runtime import RemoteRuntimeBackend, RuntimeSession

__version__ = "0.1.0"

__all__ = [
    "AuthenticationError",
    "Backend",
    "BridgeError",
    "CircuitDescription",
    "ExportFormatError",
    "ExportResult",
    "JobFailedError",
    "JobSpec",
    "LocalSamplingBackend",
    "QueueTimeoutError",
    "RemoteRuntimeBackend",
    "RunResult",
    "RuntimeSession",
    "build_circuit",
    "export_experiment",
    "run_and_export",
]
