"""Fake transports standing in for the runtime service."""

import pytest

from lgbridge.runtime import RuntimeSession


class FakeService:
    """In-memory runtime service: submit, poll, results."""

    def __init__(self, memory=("0", "1"), fail_reason=None, stuck=False,
                 backends=None):
        self.memory = list(memory)
        self.fail_reason = fail_reason
        self.stuck = stuck
        self.backends = backends if backends is not None else [
            {"name": "drum-1", "operational": True, "simulator": False,
             "pending_jobs": 4},
            {"name": "drum-2", "operational": True, "simulator": False,
             "pending_jobs": 1},
            {"name": "sim-0", "operational": True, "simulator": True,
             "pending_jobs": 0},
            {"name": "drum-3", "operational": False, "simulator": False,
             "pending_jobs": 0},
        ]
        self.submissions = []

    def __call__(self, method, url, headers, body):
        assert headers["Authorization"].startswith("Bearer ")
        if url.endswith("/backends") and method == "GET":
            return 200, {"backends": self.backends}
        if url.endswith("/jobs") and method == "POST":
            self.submissions.append(body)
            return 200, {"id": f"job-{len(self.submissions)}"}
        if url.endswith("/results") and method == "GET":
            return 200, {"memory": self.memory}
        if "/jobs/" in url and method == "GET":
            if self.stuck:
                return 200, {"state": {"status": "Queued"}}
            if self.fail_reason:
                return 200, {"state": {"status": "Failed",
                                       "reason": self.fail_reason}}
            return 200, {"state": {"status": "Completed"}}
        return 404, {}


@pytest.fixture
def session_for():
    def make(service, **kwargs):
        kwargs.setdefault("queue_timeout_s", 0.05)
        kwargs.setdefault("poll_interval_s", 0.0)
        return RuntimeSession(
            endpoint="https://q.example/api", token="t0ken",
            transport=service, **kwargs,
        )
    return make
