"""Remote runtime client: submit jobs over HTTP and collect per-shot memory.

Credentials come from the environment, never from flags or files:

    QBRIDGE_ENDPOINT  service base URL
    QBRIDGE_TOKEN     bearer token

The wire format is a small JSON protocol (submit, poll, results); the HTTP
transport is injectable so tests run without a network.
"""

from __future__ import annotations

import os
import time
from typing import Callable

from .circuits import CircuitDescription
from .backends import RunResult
from .errors import AuthenticationError, BridgeError, JobFailedError, QueueTimeoutError

ENDPOINT_VAR = "QBRIDGE_ENDPOINT"
TOKEN_VAR = "QBRIDGE_TOKEN"

#: transport signature: (method, url, headers, json_body) -> (status, payload)
Transport = Callable[[str, str, dict, dict | None], tuple[int, dict]]

_TERMINAL = ("completed", "failed")


def _requests_transport(method: str, url: str, headers: dict,
                        json_body: dict | None) -> tuple[int, dict]:
    import requests

    response = requests.request(method, url, headers=headers, json=json_body,
                                timeout=60.0)
    try:
        payload = response.json()
    except ValueError:
        payload = {}
    return response.status_code, payload


class RuntimeSession:
    """Authenticated connection to the runtime service."""

    def __init__(
        self,
        endpoint: str | None = None,
        token: str | None = None,
        transport: Transport = _requests_transport,
        queue_timeout_s: float = 1800.0,
        poll_interval_s: float = 2.0,
    ):
        self.endpoint = (endpoint or os.environ.get(ENDPOINT_VAR, "")).rstrip("/")
        self.token = token or os.environ.get(TOKEN_VAR, "")
        if not self.endpoint or not self.token:
            raise AuthenticationError(
                f"set {ENDPOINT_VAR} and {TOKEN_VAR} to reach the runtime service"
            )
        self.transport = transport
        self.queue_timeout_s = queue_timeout_s
        self.poll_interval_s = poll_interval_s

    def _call(self, method: str, path: str, body: dict | None = None) -> dict:
        status, payload = self.transport(
            method,
            f"{self.endpoint}{path}",
            {"Authorization": f"Bearer {self.token}",
             "Content-Type": "application/json"},
            body,
        )
        if status in (401, 403):
            raise AuthenticationError(f"service rejected the token (HTTP {status})")
        if status >= 400:
            raise BridgeError(f"{method} {path} failed with HTTP {status}: {payload}")
        return payload

    def least_busy_backend(self) -> str:
        """Operational non-simulator backend with the shortest queue."""
        listing = self._call("GET", "/backends").get("backends", [])
        candidates = [
            b for b in listing
            if b.get("operational", False) and not b.get("simulator", False)
        ]
        if not candidates:
            raise BridgeError("no operational hardware backend available")
        return min(candidates, key=lambda b: b.get("pending_jobs", 0))["name"]

    def submit(self, backend_name: str, circuit: CircuitDescription,
               shots: int) -> str:
        payload = self._call("POST", "/jobs", {
            "backend": backend_name,
            "shots": shots,
            "memory": True,
            "program": circuit.as_payload(),
        })
        job_id = payload.get("id")
        if not job_id:
            raise BridgeError(f"submission returned no job id: {payload}")
        return job_id

    def wait(self, job_id: str) -> None:
        deadline = time.monotonic() + self.queue_timeout_s
        while True:
            state = self._call("GET", f"/jobs/{job_id}").get("state", {})
            status = str(state.get("status", "")).lower()
            if status == "completed":
                return
            if status == "failed":
                raise JobFailedError(
                    f"job failed: {state.get('reason', 'no reason given')}",
                    job_id=job_id,
                )
            if time.monotonic() >= deadline:
                raise QueueTimeoutError(
                    f"job still {status or 'pending'} after "
                    f"{self.queue_timeout_s:.0f} s",
                    job_id=job_id,
                )
            time.sleep(self.poll_interval_s)

    def memory(self, job_id: str) -> tuple[str, ...]:
        payload = self._call("GET", f"/jobs/{job_id}/results")
        memory = payload.get("memory")
        if not isinstance(memory, list):
            raise JobFailedError(
                f"results carried no per-shot memory: {payload}", job_id=job_id
            )
        return tuple(str(bit) for bit in memory)


class RemoteRuntimeBackend:
    """Backend protocol adapter over a RuntimeSession."""

    def __init__(self, session: RuntimeSession, selector: str = "least-busy"):
        self.session = session
        self.selector = selector
        self.name = (
            session.least_busy_backend() if selector == "least-busy" else selector
        )

    def run(self, circuit: CircuitDescription, shots: int) -> RunResult:
        job_id = self.session.submit(self.name, circuit, shots)
        self.session.wait(job_id)
        return RunResult(
            memory=self.session.memory(job_id),
            job_id=job_id,
            backend_name=self.name,
        )
