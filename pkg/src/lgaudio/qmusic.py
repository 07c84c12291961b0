"""Shepard-tone rendering of measurement records.

Each measured bit moves a walker one step up (bit 1) or down (bit 0) a
seven-degree scale ring; every step plays as a Shepard tone, a stack of
octave-spaced sines under a fixed spectral bell, so ascent and descent
carry no loudness cue. Three such voices (two at the base interval, one
at twice it) mix into one movement; movements concatenate into the piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import records
from .wavio import write_wav

#: peak level for mixed movements, about -1 dBFS.
PEAK_LEVEL = 0.891

#: per-voice gains: the doubled-interval voice plays louder.
VOICE_VOLUMES = (1.0, 1.0, 2.0)

_NOTE_PC = {
    "C": 0, "C#": 1, "Db": 1, "D": 2, "D#": 3, "Eb": 3, "E": 4, "F": 5,
    "F#": 6, "Gb": 6, "G": 7, "G#": 8, "Ab": 8, "A": 9, "A#": 10, "Bb": 10,
    "B": 11,
}


@dataclass(frozen=True)
class ScaleRing:
    """Seven pitch-class names with semitone offsets above the ring root.

    Indexing wraps modulo 7 in both directions; octave placement is left
    to the Shepard construction, which erases octave identity anyway.
    """

    names: tuple[str, ...]
    offsets: tuple[int, ...]
    root_pc: int

    def __post_init__(self):
        if len(self.names) != 7 or len(self.offsets) != 7:
            raise ValueError("a scale ring holds exactly 7 degrees")
        if list(self.offsets) != sorted(set(self.offsets)) or not (
            0 <= self.offsets[0] and self.offsets[-1] < 12
        ):
            raise ValueError("offsets must be strictly increasing within one octave")
        if not 0 <= self.root_pc < 12:
            raise ValueError(f"root pitch class must lie in 0..11, got {self.root_pc}")

    def degree(self, index: int) -> int:
        return index % 7

    def name(self, index: int) -> str:
        return self.names[self.degree(index)]

    def pitch_class(self, index: int) -> int:
        """C-based pitch class (0..11) of a walk index."""
        return (self.root_pc + self.offsets[self.degree(index)]) % 12


EB_DORIAN = ScaleRing(
    names=("Eb", "F", "Gb", "Ab", "Bb", "C", "Db"),
    offsets=(0, 2, 3, 5, 7, 9, 10),
    root_pc=_NOTE_PC["Eb"],
)


def ring_from_names(names: Sequence[str]) -> ScaleRing:
    """Build a ring from 7 pitch-class names ascending from the first."""
    names = tuple(names)
    if len(names) != 7:
        raise ValueError(f"a scale needs exactly 7 names, got {len(names)}")
    try:
        pcs = [_NOTE_PC[n] for n in names]
    except KeyError as exc:
        raise ValueError(f"unknown pitch-class name {exc.args[0]!r}") from None
    root = pcs[0]
    offsets = tuple((pc - root) % 12 for pc in pcs)
    return ScaleRing(names=names, offsets=offsets, root_pc=root)


@dataclass(frozen=True)
class NoteWalk:
    """Scale-degree positions played per shot, plus the closing position."""

    indices: tuple[int, ...]
    final_index: int

    def __post_init__(self):
        if not self.indices:
            raise ValueError("a walk plays at least one note")
        if self.indices[0] != 0:
            raise ValueError("walks start at index 0")
        steps = np.diff(np.asarray(self.indices + (self.final_index,)))
        if steps.size and not np.isin(steps, (-1, 1)).all():
            raise ValueError("walk indices must move by exactly +-1")


def walk_from_bits(bits: Sequence[int]) -> NoteWalk:
    """Play-then-update walk: note at the current index, then step by the bit.

    Bit 1 ascends, bit 0 descends. The position after the last step is
    kept for the closing long note.
    """
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size == 0:
        raise ValueError("need a nonempty bit sequence")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    steps = 2 * bits.astype(np.int64) - 1
    positions = np.concatenate([[0], np.cumsum(steps)])
    return NoteWalk(tuple(int(i) for i in positions[:-1]), int(positions[-1]))


def scale_pitch(index: int, ring: ScaleRing) -> str:
    """Pitch-class name of a walk index (nonnegative modulo 7)."""
    return ring.name(index)


@dataclass(frozen=True)
class ShepardParams:
    """Tone and envelope parameters for rendering."""

    note_dur: float = 0.15
    attack: float = 0.02
    release: float = 0.02
    center_midi: float = 68.0
    octaves: tuple[int, int] = (1, 9)
    final_dur: float = 0.7
    final_attack: float = 0.2
    final_release: float = 0.5
    render_rate: int = 44100

    def __post_init__(self):
        for field in ("note_dur", "attack", "release", "final_dur",
                      "final_attack", "final_release"):
            if getattr(self, field) <= 0:
                raise ValueError(f"{field} must be positive")
        lo, hi = self.octaves
        if lo > hi or lo < 0:
            raise ValueError(f"empty or negative octave range {self.octaves}")
        if self.render_rate <= 0:
            raise ValueError("render rate must be positive")


def _envelope(n: int, attack_samples: int, release_samples: int) -> np.ndarray:
    env = np.ones(n)
    na = min(attack_samples, n)
    nr = min(release_samples, n)
    if na:
        env[:na] = np.arange(1, na + 1) / na
    if nr:
        env[n - nr:] *= np.arange(nr, 0, -1) / nr
    return env


def shepard_tone(
    pitch_class: int,
    params: ShepardParams,
    volume: float = 1.0,
    dur: float | None = None,
    attack: float | None = None,
    release: float | None = None,
) -> np.ndarray:
    """Render one Shepard tone for a C-based pitch class (0..11).

    Octave o contributes a sine at MIDI m = 12*(o+1) + pitch_class with
    amplitude (30/m^1.5) * volume * 2^(-((m-center)/10.7)^2/10), shaped by
    a linear attack/sustain/release envelope.
    """
    if not 0 <= pitch_class < 12:
        raise ValueError(f"pitch class must lie in 0..11, got {pitch_class}")
    dur = params.note_dur if dur is None else dur
    attack = params.attack if attack is None else attack
    release = params.release if release is None else release
    rate = params.render_rate
    n = round((attack + dur + release) * rate)
    t = np.arange(n) / rate
    out = np.zeros(n)
    for octave in range(params.octaves[0], params.octaves[1] + 1):
        m = 12 * (octave + 1) + pitch_class
        freq = 440.0 * 2.0 ** ((m - 69) / 12.0)
        amp = 30.0 / m**1.5 * volume * 2.0 ** (-(((m - params.center_midi) / 10.7) ** 2) / 10.0)
        out += amp * np.sin(2.0 * np.pi * freq * t)
    return out * _envelope(n, round(attack * rate), round(release * rate))


def render_voice(
    walk: NoteWalk,
    ring: ScaleRing = EB_DORIAN,
    params: ShepardParams = ShepardParams(),
    volume: float = 1.0,
) -> np.ndarray:
    """Render a walk: notes at note_dur spacing, then the closing long note.

    Note buffers outlast the spacing by the attack/release tails; overlaps
    add, as they would on a live synthesizer. The buffer ends with the
    closing note's full envelope.
    """
    rate = params.render_rate
    step = round(params.note_dur * rate)
    final_len = round((params.final_attack + params.final_dur + params.final_release) * rate)
    out = np.zeros(len(walk.indices) * step + final_len)
    cache: dict[int, np.ndarray] = {}
    for i, index in enumerate(walk.indices):
        pc = ring.pitch_class(index)
        buf = cache.get(pc)
        if buf is None:
            buf = cache[pc] = shepard_tone(pc, params, volume)
        out[i * step: i * step + buf.size] += buf
    closing = shepard_tone(
        ring.pitch_class(walk.final_index),
        params,
        volume,
        dur=params.final_dur,
        attack=params.final_attack,
        release=params.final_release,
    )
    out[len(walk.indices) * step:] += closing
    return out


@dataclass(frozen=True)
class Movement:
    """Three voices of one experiment: two base-interval walks and one doubled."""

    walks: tuple[NoteWalk, NoteWalk, NoteWalk]
    k_label: float
    volumes: tuple[float, float, float] = VOICE_VOLUMES

    def __post_init__(self):
        if len(self.walks) != 3 or len(self.volumes) != 3:
            raise ValueError("a movement holds exactly three voices")


def parse_measurement_csv(path, n_shots: int | None = None) -> np.ndarray:
    """Read measured bits from the shared interleaved record format."""
    return records.read_bits(path, n_shots)


def movement_from_csvs(paths: Sequence, k_label: float,
                       n_shots: int | None = None) -> Movement:
    """Build a movement from the three per-voice record files."""
    if len(paths) != 3:
        raise ValueError(f"a movement needs exactly 3 record files, got {len(paths)}")
    walks = tuple(walk_from_bits(parse_measurement_csv(p, n_shots)) for p in paths)
    return Movement(walks, k_label)


def sum_voices(buffers: Sequence[np.ndarray]) -> np.ndarray:
    """Sample-wise sum, zero-padded to the longest buffer."""
    buffers = [np.asarray(b, dtype=np.float64) for b in buffers]
    if not buffers:
        raise ValueError("nothing to mix")
    n = max(b.size for b in buffers)
    out = np.zeros(n)
    for b in buffers:
        out[: b.size] += b
    return out


def mix_movement(buffers: Sequence[np.ndarray]) -> np.ndarray:
    """Sum the voice buffers and normalize the peak to about -1 dBFS."""
    out = sum_voices(buffers)
    peak = np.abs(out).max()
    if peak > 0.0:
        out = out * (PEAK_LEVEL / peak)
    return out


def render_movement(
    movement: Movement,
    ring: ScaleRing = EB_DORIAN,
    params: ShepardParams = ShepardParams(),
) -> np.ndarray:
    """Render and mix the three voices of a movement."""
    voices = [
        render_voice(walk, ring, params, volume)
        for walk, volume in zip(movement.walks, movement.volumes)
    ]
    return mix_movement(voices)


def compose(
    movement_buffers: Sequence[np.ndarray],
    gap_s: float = 2.0,
    render_rate: int = 44100,
    shuffle: bool = False,
    seed: int | None = None,
) -> tuple[np.ndarray, list[int]]:
    """Concatenate movements with silent gaps.

    Returns (audio, order): ``order`` is the permutation of input positions
    actually played, the identity unless ``shuffle`` is set.
    """
    if not movement_buffers:
        raise ValueError("need at least one movement")
    if gap_s < 0:
        raise ValueError(f"gap must be nonnegative, got {gap_s}")
    order = list(range(len(movement_buffers)))
    if shuffle:
        rng = np.random.default_rng(seed)
        order = [int(i) for i in rng.permutation(len(movement_buffers))]
    gap = np.zeros(round(gap_s * render_rate))
    parts: list[np.ndarray] = []
    for pos, idx in enumerate(order):
        if pos:
            parts.append(gap)
        parts.append(np.asarray(movement_buffers[idx], dtype=np.float64))
    return np.concatenate(parts), order


def export_movement_wav(path, buffer: np.ndarray, render_rate: int = 44100) -> None:
    """Write a rendered buffer as 16-bit PCM mono."""
    write_wav(path, buffer, render_rate)
