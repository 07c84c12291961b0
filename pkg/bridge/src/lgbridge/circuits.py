"""Job specifications and the single-qubit circuit they run."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class JobSpec:
    """One record-set job: rotation per base interval, multiple, shot count.

    ``backend`` selects a provider backend by name, or "least-busy" to let
    the service pick the shortest queue.
    """

    theta: float
    interval_multiple: int = 1
    shots: int = 500
    backend: str = "least-busy"

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")
        if self.interval_multiple not in (1, 2):
            raise ValueError(
                f"interval multiple must be 1 or 2, got {self.interval_multiple}"
            )
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")


@dataclass(frozen=True)
class CircuitDescription:
    """Gate list on one qubit, ending in a Z-basis measurement of one bit.

    Gates are (name, angle) pairs; the only gate this bridge emits is "rx".
    """

    gates: tuple[tuple[str, float], ...]
    measure: bool = True
    n_qubits: int = 1
    n_bits: int = 1

    def as_payload(self) -> dict:
        """JSON-ready form for job submission."""
        return {
            "qubits": self.n_qubits,
            "bits": self.n_bits,
            "gates": [[name, angle] for name, angle in self.gates],
            "measure": self.measure,
        }


def build_circuit(spec: JobSpec) -> CircuitDescription:
    """Rx(theta * multiple) on qubit 0, then measure into one classical bit."""
    return CircuitDescription(gates=(("rx", spec.theta * spec.interval_multiple),))
