"""Single-qubit Leggett-Garg experiment engine.

Simulates the prepare -> Rx-evolve -> measure protocol exactly on a
two-amplitude statevector, estimates two-time correlations from shot
records, and evaluates the K statistic against the macrorealist window
-3 <= K <= 1. Spin convention: measured bit b maps to Q = 2*b - 1, so the
prepared basis-0 state carries Q = -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import records

SPIN_DOWN = -1
SPIN_UP = 1

LABELS = ("C21", "C32", "C31")
# Per-set RNG streams derive as seed XOR a fixed label constant.
_LABEL_SALT = {"C21": 0xC21, "C32": 0xC32, "C31": 0xC31}

#: theta/pi for the four standard measurement intervals.
TABLE_THETA_OVER_PI = (1 / 3, 1 / 2, 0.712, 1.0)

CLASSICAL = "classical"
VIOLATES_UPPER = "violates_upper"
VIOLATES_LOWER = "violates_lower"

# Born probabilities within this distance of 0 or 1 are float residue of
# pi-multiple angles (sin(pi)^2 ~ 1.5e-32); snap them so the deterministic
# limits stay exact.
_PROB_SNAP = 1e-12


@dataclass(frozen=True)
class QubitState:
    """Two complex amplitudes of unit norm."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized: |amp|^2 = {norm}")


def prepare_initial() -> QubitState:
    """Basis-0 state, the prepared Q = -1 eigenstate."""
    return QubitState(1.0 + 0.0j, 0.0j)


def rx_apply(state: QubitState, theta: float) -> QubitState:
    """Apply the X rotation exp(-i*theta*sigma_x/2)."""
    if not math.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta}")
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return QubitState(
        c * state.amp0 - 1j * s * state.amp1,
        -1j * s * state.amp0 + c * state.amp1,
    )


def prob_plus(state: QubitState) -> float:
    """Born probability of measuring spin +1 (bit 1)."""
    return abs(state.amp1) ** 2


def spin_value(bit: int) -> int:
    """Map a measured bit to the spin observable Q = 2*bit - 1."""
    return 2 * bit - 1


@dataclass(frozen=True)
class ShotRecord:
    """One prepare -> measure repetition: (prepared spin, measured spin)."""

    q1: int
    q2: int

    def __post_init__(self):
        if self.q1 != SPIN_DOWN:
            raise ValueError(f"prepared spin is always -1, got {self.q1}")
        if self.q2 not in (SPIN_DOWN, SPIN_UP):
            raise ValueError(f"measured spin must be +-1, got {self.q2}")


@dataclass(frozen=True)
class RecordSet:
    """Ordered shot outcomes for one measurement interval.

    ``spins`` holds the measured +-1 values; the prepared value is -1 for
    every shot. ``seed`` is None for hardware-imported data.
    """

    interval_label: str
    interval_multiple: int
    spins: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.interval_label not in LABELS:
            raise ValueError(f"unknown interval label {self.interval_label!r}")
        expected = 2 if self.interval_label == "C31" else 1
        if self.interval_multiple != expected:
            raise ValueError(
                f"{self.interval_label} runs at {expected}x the base interval, "
                f"got multiple {self.interval_multiple}"
            )
        spins = np.asarray(self.spins, dtype=np.int8)
        if spins.ndim != 1 or spins.size == 0:
            raise ValueError("record set must hold at least one shot")
        if not np.isin(spins, (SPIN_DOWN, SPIN_UP)).all():
            raise ValueError("measured spins must be +-1")
        object.__setattr__(self, "spins", spins)

    @property
    def n_shots(self) -> int:
        return self.spins.size

    @property
    def bits(self) -> np.ndarray:
        """Measured bits (0/1) in shot order."""
        return ((self.spins + 1) // 2).astype(np.uint8)

    @property
    def shots(self) -> list[ShotRecord]:
        """Materialized (q1, q2) pairs; intended for inspection, not bulk math."""
        return [ShotRecord(SPIN_DOWN, int(s)) for s in self.spins]


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: rotation angle per base interval, shots, RNG seed.

    ``noise_p`` is an emulation knob: a depolarizing flip of the measured
    spin with probability p/2, scaling expected correlations by (1 - p).
    It does not model any specific hardware.
    """

    theta: float
    n_shots: int = 500
    seed: int = 0
    noise_p: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")
        if self.n_shots < 1:
            raise ValueError(f"n_shots must be >= 1, got {self.n_shots}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.noise_p is not None and not 0.0 <= self.noise_p <= 1.0:
            raise ValueError(f"noise_p must lie in [0, 1], got {self.noise_p}")


@dataclass(frozen=True)
class CorrelationEstimate:
    """Empirical two-time correlation: mean of q1*q2 over the shots."""

    value: float
    n_shots: int

    def __post_init__(self):
        if self.n_shots < 1:
            raise ValueError("estimate needs at least one shot")
        if not -1.0 <= self.value <= 1.0:
            raise ValueError(f"correlation must lie in [-1, 1], got {self.value}")
        # A mean of n terms of +-1: value*n is an integer of n's parity.
        total = self.value * self.n_shots
        if abs(total - round(total)) > 1e-6 or (round(total) - self.n_shots) % 2 != 0:
            raise ValueError(
                f"value {self.value} is not a mean of {self.n_shots} +-1 terms"
            )


@dataclass(frozen=True)
class KStatistic:
    """Three correlation estimates and their Leggett-Garg combination."""

    c21: CorrelationEstimate
    c32: CorrelationEstimate
    c31: CorrelationEstimate
    k: float
    classification: str

    def __post_init__(self):
        if self.classification not in (CLASSICAL, VIOLATES_UPPER, VIOLATES_LOWER):
            raise ValueError(f"unknown classification {self.classification!r}")


def classify_k(k: float) -> str:
    """Classify K against the macrorealist window -3 <= K <= 1."""
    if k > 1.0:
        return VIOLATES_UPPER
    if k < -3.0:
        return VIOLATES_LOWER
    return CLASSICAL


def run_record_set(config: ExperimentConfig, label: str) -> RecordSet:
    """Simulate one record set: n_shots of prepare -> Rx -> measure.

    The C31 set evolves for twice the base interval. Deterministic for a
    fixed (config, seed); the three labels use independent derived streams.
    """
    if label not in LABELS:
        raise ValueError(f"unknown interval label {label!r}")
    multiple = 2 if label == "C31" else 1
    state = rx_apply(prepare_initial(), config.theta * multiple)
    p = prob_plus(state)
    if p < _PROB_SNAP:
        p = 0.0
    elif p > 1.0 - _PROB_SNAP:
        p = 1.0

    rng = np.random.default_rng(config.seed ^ _LABEL_SALT[label])
    bits = rng.random(config.n_shots) < p
    if config.noise_p:
        bits ^= rng.random(config.n_shots) < config.noise_p / 2.0
    spins = (2 * bits.astype(np.int8) - 1).astype(np.int8)
    return RecordSet(label, multiple, spins, seed=config.seed)


def estimate_correlation(rs: RecordSet) -> CorrelationEstimate:
    """Empirical C = P(-1,-1) - P(-1,+1) = mean(q1*q2); q1 is always -1."""
    total = int(rs.spins.sum(dtype=np.int64))
    return CorrelationEstimate(value=-total / rs.n_shots, n_shots=rs.n_shots)


def correlation_theoretical(theta: float) -> float:
    """Ideal two-time correlation cos(theta) for the evolving qubit."""
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    return math.cos(theta)


def k_statistic(
    c21: CorrelationEstimate, c32: CorrelationEstimate, c31: CorrelationEstimate
) -> KStatistic:
    """Combine the three estimates into K = C21 + C32 - C31 and classify."""
    k = c21.value + c32.value - c31.value
    return KStatistic(c21, c32, c31, k, classify_k(k))


def k_theoretical(theta: float) -> float:
    """Ideal K = 2*cos(theta) - cos(2*theta) for equal intervals."""
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    return 2.0 * math.cos(theta) - math.cos(2.0 * theta)


def cumulative_k(
    c21_records: RecordSet, c32_records: RecordSet, c31_records: RecordSet
) -> np.ndarray:
    """K over growing shot prefixes.

    Returns an (N, 2) array of (shot_count, k); row m-1 uses the first m
    shots of each set. Integer prefix sums keep the final row exactly equal
    to ``k_statistic`` over the full sets.
    """
    sets = (c21_records, c32_records, c31_records)
    n = sets[0].n_shots
    if any(rs.n_shots != n for rs in sets):
        lengths = tuple(rs.n_shots for rs in sets)
        raise ValueError(f"record sets must have equal length, got {lengths}")
    counts = np.arange(1, n + 1, dtype=np.int64)
    c21, c32, c31 = (-np.cumsum(rs.spins, dtype=np.int64) / counts for rs in sets)
    k = c21 + c32 - c31
    return np.column_stack([counts.astype(np.float64), k])


def run_experiment(config: ExperimentConfig) -> tuple[dict[str, RecordSet], KStatistic]:
    """Run the three record sets of one experiment and evaluate K."""
    record_sets = {label: run_record_set(config, label) for label in LABELS}
    stat = k_statistic(*(estimate_correlation(record_sets[lbl]) for lbl in LABELS))
    return record_sets, stat


# ---------------------------------------------------------------------------
# File interfaces

def save_record_set(path, rs: RecordSet) -> None:
    """Write a record set in the shared interleaved CSV format."""
    records.write_bits(path, rs.bits)


def load_record_set(path, label: str, n_shots: int | None = None) -> RecordSet:
    """Read a record set from the shared CSV format (seed None: imported data)."""
    bits = records.read_bits(path, n_shots)
    spins = (2 * bits.astype(np.int8) - 1).astype(np.int8)
    multiple = 2 if label == "C31" else 1
    return RecordSet(label, multiple, spins, seed=None)


def write_k_report(path, rows) -> None:
    """Write (theta_over_pi, k_exp, k_theor, classification) rows as CSV."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("theta_over_pi,k_exp,k_theor,classification\n")
        for theta_over_pi, k_exp, k_theor, classification in rows:
            fh.write(f"{theta_over_pi:.6g},{k_exp:.6f},{k_theor:.6f},{classification}\n")


def write_cumulative_csv(path, series: np.ndarray) -> None:
    """Write a cumulative-K series as two-column (shot_count, k) CSV."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("shot_count,k\n")
        for count, k in series:
            fh.write(f"{int(count)},{k:.6f}\n")
