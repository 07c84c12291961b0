"""Scale walks, Shepard tones, and movement rendering tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgaudio import qmusic, records
from conftest import reference_walk, rms_db

PARAMS = qmusic.ShepardParams()


# ---------------------------------------------------------------------------
# Walks

def test_walk_all_ones_ascends():
    walk = qmusic.walk_from_bits([1] * 6)
    assert walk.indices == (0, 1, 2, 3, 4, 5)
    assert walk.final_index == 6


def test_walk_all_zeros_descends():
    walk = qmusic.walk_from_bits([0] * 4)
    assert walk.indices == (0, -1, -2, -3)
    assert walk.final_index == -4


def test_walk_play_then_update_order():
    walk = qmusic.walk_from_bits([1, 0, 0, 1])
    assert walk.indices == (0, 1, 0, -1)
    assert walk.final_index == 0


def test_walk_rejects_bad_input():
    with pytest.raises(ValueError):
        qmusic.walk_from_bits([])
    with pytest.raises(ValueError):
        qmusic.walk_from_bits([0, 2])


@given(st.lists(st.sampled_from([0, 1]), min_size=1, max_size=64))
def test_walk_matches_reference_loop(bits):
    walk = qmusic.walk_from_bits(bits)
    played, final = reference_walk(bits)
    assert list(walk.indices) == played
    assert walk.final_index == final


@given(st.lists(st.sampled_from([0, 1]), min_size=1, max_size=64))
def test_walk_validity_invariants(bits):
    walk = qmusic.walk_from_bits(bits)
    assert walk.indices[0] == 0
    steps = np.diff(np.asarray(walk.indices + (walk.final_index,)))
    assert set(np.abs(steps)) == {1}


def test_note_walk_validation():
    with pytest.raises(ValueError):
        qmusic.NoteWalk((1, 2), 3)
    with pytest.raises(ValueError):
        qmusic.NoteWalk((0, 2), 3)
    with pytest.raises(ValueError):
        qmusic.NoteWalk((0, 1), 3)


# ---------------------------------------------------------------------------
# Scale ring

def test_scale_pitch_wrapping():
    assert qmusic.scale_pitch(0, qmusic.EB_DORIAN) == "Eb"
    assert qmusic.scale_pitch(7, qmusic.EB_DORIAN) == "Eb"
    assert qmusic.scale_pitch(-1, qmusic.EB_DORIAN) == "Db"
    # Ring semantics oracle: -1 mod 7 = 6 with mathematical modulo.
    assert qmusic.EB_DORIAN.degree(-1) == 6


def test_perfect_correlation_pitch_sequences():
    up = [qmusic.scale_pitch(i, qmusic.EB_DORIAN) for i in qmusic.walk_from_bits([1] * 8).indices]
    assert up == ["Eb", "F", "Gb", "Ab", "Bb", "C", "Db", "Eb"]
    down = [qmusic.scale_pitch(i, qmusic.EB_DORIAN) for i in qmusic.walk_from_bits([0] * 4).indices]
    assert down == ["Eb", "Db", "C", "Bb"]


def test_ring_pitch_classes_and_anchor():
    # Eb anchors to pitch class 3; Eb4 is MIDI 63 = 12*(4+1) + 3.
    assert qmusic.EB_DORIAN.pitch_class(0) == 3
    assert 12 * (4 + 1) + qmusic.EB_DORIAN.pitch_class(0) == 63
    assert qmusic.EB_DORIAN.pitch_class(-1) == 1  # Db


def test_ring_from_names():
    ring = qmusic.ring_from_names(["C", "D", "Eb", "F", "G", "A", "Bb"])
    assert ring.root_pc == 0
    assert ring.offsets == (0, 2, 3, 5, 7, 9, 10)
    with pytest.raises(ValueError):
        qmusic.ring_from_names(["C", "D"])
    with pytest.raises(ValueError):
        qmusic.ring_from_names(["C", "D", "E", "F", "G", "A", "H"])


def test_scale_ring_validation():
    with pytest.raises(ValueError):
        qmusic.ScaleRing(("a",) * 7, (0, 2, 3, 5, 7, 9, 13), 0)
    with pytest.raises(ValueError):
        qmusic.ScaleRing(("a",) * 6, (0, 2, 3, 5, 7, 9), 0)


# ---------------------------------------------------------------------------
# Shepard tones

def test_shepard_buffer_length():
    buf = qmusic.shepard_tone(3, PARAMS)
    expected = round((0.02 + 0.15 + 0.02) * 44100)
    assert buf.size == expected


def test_shepard_octave_partial_is_concert_pitch():
    # Single octave: pitch class 9 (A) in octave 4 is MIDI 69 -> 440 Hz.
    params = qmusic.ShepardParams(octaves=(4, 4), note_dur=1.0)
    buf = qmusic.shepard_tone(9, params)
    spectrum = np.abs(np.fft.rfft(buf))
    freqs = np.fft.rfftfreq(buf.size, 1 / 44100)
    assert freqs[np.argmax(spectrum)] == pytest.approx(440.0, abs=1.0)


def test_shepard_spectral_bell_weights():
    # MIDI 68 sits at the bell center; 68 + 10.7 would fall off by 2^-0.1.
    params = qmusic.ShepardParams(octaves=(4, 4), note_dur=1.0)
    center = qmusic.shepard_tone(8, params)  # Ab4 = midi 68
    amp_center = np.abs(center).max()
    expected = 30.0 / 68**1.5
    assert amp_center == pytest.approx(expected, rel=1e-3)
    assert 2.0 ** (-((10.7 / 10.7) ** 2) / 10.0) == pytest.approx(0.933, abs=5e-4)


def test_shepard_equal_loudness_across_the_ring():
    levels = [
        rms_db(qmusic.shepard_tone(qmusic.EB_DORIAN.pitch_class(i), PARAMS))
        for i in range(7)
    ]
    mean = float(np.mean(levels))
    assert max(abs(level - mean) for level in levels) <= 1.5


def test_shepard_volume_scales_linearly():
    a = qmusic.shepard_tone(3, PARAMS, volume=1.0)
    b = qmusic.shepard_tone(3, PARAMS, volume=2.0)
    np.testing.assert_allclose(b, 2.0 * a, atol=1e-12)


# ---------------------------------------------------------------------------
# Voices and movements

def test_render_voice_duration_law():
    walk = qmusic.walk_from_bits([1, 0, 1])
    buf = qmusic.render_voice(walk, params=PARAMS)
    step = round(0.15 * 44100)
    final_len = round((0.2 + 0.7 + 0.5) * 44100)
    assert buf.size == 3 * step + final_len


def test_render_voice_single_note_walk():
    walk = qmusic.walk_from_bits([1])
    buf = qmusic.render_voice(walk, params=PARAMS)
    assert buf.size == round(0.15 * 44100) + round(1.4 * 44100)
    assert np.abs(buf).max() > 0


def test_movement_duration_law_full_scale():
    bits = np.random.default_rng(0).integers(0, 2, 500)
    walk = qmusic.walk_from_bits(bits)
    buf = qmusic.render_voice(walk, params=PARAMS)
    assert buf.size / 44100 == pytest.approx(500 * 0.15 + 1.4, abs=0.05)


def test_mix_silence_and_padding():
    silent = [np.zeros(10), np.zeros(10), np.zeros(12)]
    out = qmusic.mix_movement(silent)
    assert out.size == 12
    np.testing.assert_array_equal(out, 0.0)


def test_mix_identical_buffers_keeps_shape():
    t = np.arange(1000) / 44100
    buf = np.sin(2 * np.pi * 440 * t)
    out = qmusic.mix_movement([buf, buf, buf])
    assert out.size == buf.size
    np.testing.assert_allclose(out, buf * (0.891 / np.abs(buf).max()), atol=1e-12)


def test_mixing_linearity_before_normalization():
    rng = np.random.default_rng(3)
    a, b, c = rng.normal(size=50), rng.normal(size=60), rng.normal(size=55)
    zero = np.zeros(1)
    combined = qmusic.sum_voices([a, b, c])
    recombined = qmusic.sum_voices([
        qmusic.sum_voices([a, zero, zero]),
        qmusic.sum_voices([zero, b, zero]),
        qmusic.sum_voices([zero, zero, c]),
    ])
    np.testing.assert_array_equal(combined, recombined)


def test_movement_needs_three_voices():
    walk = qmusic.walk_from_bits([1])
    with pytest.raises(ValueError):
        qmusic.Movement((walk, walk), 1.0)


def test_movement_from_csvs(tmp_path):
    paths = []
    for i, bits in enumerate([[1, 1], [0, 0], [1, 0]]):
        path = tmp_path / f"v{i}.csv"
        records.write_bits(path, bits)
        paths.append(path)
    movement = qmusic.movement_from_csvs(paths, k_label=0.5)
    assert movement.k_label == 0.5
    assert movement.walks[0].indices == (0, 1)
    assert movement.volumes == (1.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        qmusic.movement_from_csvs(paths[:2], k_label=0.0)


def test_parse_measurement_csv_examples(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("0\n1\n0\n1\n")
    assert qmusic.parse_measurement_csv(path).tolist() == [1, 1]
    path.write_text("1\n0\n")
    with pytest.raises(records.RecordFormatError):
        qmusic.parse_measurement_csv(path)


# ---------------------------------------------------------------------------
# Composition

def test_compose_single_movement_is_identity():
    buf = np.sin(np.arange(2000) / 30.0)
    audio, order = qmusic.compose([buf], gap_s=5.0)
    np.testing.assert_array_equal(audio, buf)
    assert order == [0]


def test_compose_gap_arithmetic():
    bufs = [np.ones(100), np.ones(200), np.ones(150)]
    audio, order = qmusic.compose(bufs, gap_s=1.0, render_rate=100)
    assert audio.size == 100 + 200 + 150 + 2 * 100
    assert order == [0, 1, 2]


def test_compose_shuffle_reproducible():
    bufs = [np.full(10, float(i)) for i in range(4)]
    _, order_a = qmusic.compose(bufs, shuffle=True, seed=3)
    _, order_b = qmusic.compose(bufs, shuffle=True, seed=3)
    assert order_a == order_b
    assert sorted(order_a) == [0, 1, 2, 3]


def test_compose_validation():
    with pytest.raises(ValueError):
        qmusic.compose([])
    with pytest.raises(ValueError):
        qmusic.compose([np.ones(4)], gap_s=-1.0)


def test_render_determinism(tmp_path):
    bits = [1, 0, 1, 1, 0]
    movement = qmusic.Movement(
        tuple(qmusic.walk_from_bits(bits) for _ in range(3)), k_label=0.2
    )
    a = qmusic.render_movement(movement)
    b = qmusic.render_movement(movement)
    assert a.tobytes() == b.tobytes()
    pa, pb = tmp_path / "a.wav", tmp_path / "b.wav"
    qmusic.export_movement_wav(pa, a)
    qmusic.export_movement_wav(pb, b)
    assert pa.read_bytes() == pb.read_bytes()
