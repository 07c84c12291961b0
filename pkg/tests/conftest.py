"""Shared test oracles, independent of the implementation paths they check."""

import numpy as np
import pytest


def rx_matrix(theta: float) -> np.ndarray:
    """2x2 X-rotation matrix for direct matrix-multiplication oracles."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]])


def brute_force_inverse_dft(values: np.ndarray) -> np.ndarray:
    """O(L^2) inverse DFT: x[n] = (1/L) sum_k X[k] exp(+2i pi k n / L)."""
    values = np.asarray(values, dtype=np.complex128)
    L = values.size
    n = np.arange(L)
    out = np.empty(L, dtype=np.complex128)
    for i in n:
        out[i] = np.sum(values * np.exp(2j * np.pi * np.arange(L) * i / L)) / L
    return out


def reference_walk(bits) -> tuple[list[int], int]:
    """Play-then-update walk loop, mirroring the synthesizer scheduling."""
    played = []
    position = 0
    for bit in bits:
        played.append(position)
        if bit == 0:
            position -= 1
        else:
            position += 1
    return played, position


def rms_db(samples: np.ndarray) -> float:
    return 20.0 * np.log10(np.sqrt(np.mean(np.square(samples))))


@pytest.fixture
def tmp_out(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    return out
