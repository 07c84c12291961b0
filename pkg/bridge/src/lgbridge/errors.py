"""Bridge error types; each remote failure mode surfaces distinctly."""

from __future__ import annotations


class BridgeError(Exception):
    """Base type for bridge failures."""


class AuthenticationError(BridgeError):
    """Missing or rejected service credentials."""


class QueueTimeoutError(BridgeError):
    """Job did not leave the provider queue within the allowed time."""

    def __init__(self, message: str, job_id: str | None = None):
        super().__init__(message)
        self.job_id = job_id


class JobFailedError(BridgeError):
    """The provider reported a failed job."""

    def __init__(self, message: str, job_id: str | None = None):
        super().__init__(message)
        self.job_id = job_id


class ExportFormatError(BridgeError):
    """An export did not round-trip under the record format contract."""
