"""Backend protocol and the built-in sampling simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .circuits import CircuitDescription
from .errors import JobFailedError

# Probabilities within this distance of 0/1 are float residue of pi-multiple
# angles; snap so full rotations stay deterministic.
_PROB_SNAP = 1e-12


@dataclass(frozen=True)
class RunResult:
    """Per-shot measured bits (as '0'/'1' strings) plus job provenance."""

    memory: tuple[str, ...]
    job_id: str
    backend_name: str


@runtime_checkable
class Backend(Protocol):
    """Anything that can run a circuit and return per-shot memory."""

    name: str

    def run(self, circuit: CircuitDescription, shots: int) -> RunResult: ...


class LocalSamplingBackend:
    """Provider-simulator stand-in: exact Born sampling of the Rx circuit.

    Good for smoke runs and offline tests; each job draws from a stream
    derived from (seed, job counter), so repeated runs are reproducible.
    """

    def __init__(self, seed: int = 0, name: str = "local-sampler"):
        self.name = name
        self._seed = seed
        self._jobs = 0

    def run(self, circuit: CircuitDescription, shots: int) -> RunResult:
        if shots < 1:
            raise ValueError(f"shots must be >= 1, got {shots}")
        angle = 0.0
        for gate, value in circuit.gates:
            if gate != "rx":
                raise JobFailedError(f"unsupported gate {gate!r}")
            angle += value
        p = math.sin(angle / 2.0) ** 2
        if p < _PROB_SNAP:
            p = 0.0
        elif p > 1.0 - _PROB_SNAP:
            p = 1.0
        self._jobs += 1
        rng = np.random.default_rng([self._seed, self._jobs])
        bits = rng.random(shots) < p
        return RunResult(
            memory=tuple("1" if b else "0" for b in bits),
            job_id=f"{self.name}-{self._jobs}",
            backend_name=self.name,
        )
