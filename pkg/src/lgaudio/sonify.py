"""Spectrum-series sonification.

Turns ordered voltage-vs-frequency spectra into audio: moving average over
acquisition order, noise-floor subtraction, random phase assignment,
Hermitian extension, inverse DFT, band-pass filtering, and WAV/spectrogram
export, plus a dominant-frequency switch detector and a synthetic spectrum
generator for desk-scale runs.

A spectral bin b plays back at b * sample_rate / (2*M - 1) Hz, where M is
the points-per-file count; the physical frequency column only defines the
grid, not the pitch.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal as _signal

from .wavio import write_wav

PLANCK_H = 6.626e-34  # J / Hz
BOLTZMANN_K = 1.38e-23  # J / K

#: peak level used for WAV normalization, about -1 dBFS.
PEAK_LEVEL = 0.891

_GRID_RTOL = 1e-6


class SpectrumFormatError(ValueError):
    """Raised for unreadable or inconsistent spectrum files."""

    def __init__(self, path, line_no: int | None, message: str):
        self.path = None if path is None else os.fspath(path)
        self.line_no = line_no
        if self.path is None:
            where = ""
        elif line_no is None:
            where = f"{self.path}: "
        else:
            where = f"{self.path}:{line_no}: "
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class SpectrumFile:
    """One measured spectrum: amplitude per frequency, plus acquisition index."""

    freqs: np.ndarray
    amps: np.ndarray
    index: int

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=np.float64)
        amps = np.asarray(self.amps, dtype=np.float64)
        if freqs.ndim != 1 or amps.ndim != 1 or freqs.size != amps.size:
            raise ValueError("freqs and amps must be 1-D arrays of equal length")
        if freqs.size < 2:
            raise ValueError("a spectrum needs at least two points")
        steps = np.diff(freqs)
        if not (steps > 0).all():
            raise ValueError("frequency grid must be strictly increasing")
        spacing = steps.mean()
        if np.abs(steps - spacing).max() > _GRID_RTOL * spacing:
            raise ValueError("frequency grid must be uniformly spaced")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "amps", amps)

    @property
    def n_points(self) -> int:
        return self.freqs.size

    @property
    def spacing(self) -> float:
        return float(self.freqs[1] - self.freqs[0])


@dataclass(frozen=True)
class SpectrumSeries:
    """Ordered spectra sharing one frequency grid."""

    files: tuple[SpectrumFile, ...]

    def __post_init__(self):
        files = tuple(self.files)
        if not files:
            raise ValueError("series must hold at least one spectrum")
        grid = files[0].freqs
        for f in files[1:]:
            if f.n_points != grid.size or not np.allclose(
                f.freqs, grid, rtol=_GRID_RTOL, atol=0.0
            ):
                raise ValueError(
                    f"spectrum {f.index} does not share the series frequency grid"
                )
        object.__setattr__(self, "files", files)

    @property
    def n_files(self) -> int:
        return len(self.files)

    @property
    def n_points(self) -> int:
        return self.files[0].n_points


@dataclass(frozen=True)
class ComplexSpectrum:
    """Amplitudes with assigned phases; magnitudes match the source spectrum."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1:
            raise ValueError("values must be a 1-D array")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class TimeSeries:
    """Real audio samples at a fixed rate."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be a 1-D array")
        if not np.isfinite(samples).all():
            raise ValueError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class SonifyConfig:
    """Pipeline knobs; defaults match the instrument-scale acquisition."""

    window: int = 10
    noise_floor_range: tuple[int, int] = (1500, 1800)
    sample_rate: float = 2015.0
    band: tuple[float, float] = (400.0, 550.0)
    seed: int = 0

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        lo, hi = self.noise_floor_range
        if not 0 <= lo < hi:
            raise ValueError(f"bad noise-floor range {self.noise_floor_range}")
        low, high = self.band
        if not 0.0 <= low < high < self.sample_rate / 2.0:
            raise ValueError(f"band {self.band} must satisfy 0 <= low < high < rate/2")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")


@dataclass(frozen=True)
class SpectrogramData:
    """Magnitude short-time spectrum: times x freqs matrix."""

    times: np.ndarray
    freqs: np.ndarray
    magnitudes: np.ndarray
    window_len: int
    hop: int

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        freqs = np.asarray(self.freqs, dtype=np.float64)
        mags = np.asarray(self.magnitudes, dtype=np.float64)
        if mags.shape != (times.size, freqs.size):
            raise ValueError("magnitude matrix must be shaped (times, freqs)")
        if (mags < 0).any():
            raise ValueError("magnitudes must be nonnegative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "magnitudes", mags)


@dataclass(frozen=True)
class SyntheticConfig:
    """Synthetic stand-in data: flat noise floor plus a Lorentzian peak.

    The optional ``switch`` = (file_index, bin_shift, relaxation_files)
    shifts the peak center from ``file_index`` on and relaxes it back
    linearly over ``relaxation_files`` files. ``noise_jitter`` is the
    relative per-point jitter of the floor.
    """

    n_files: int = 200
    points_per_file: int = 4095
    bin_spacing: float = 6.706
    peak_center_bin: int = 1910
    peak_linewidth_bins: float = 4.0
    peak_amp: float = 1.0
    noise_floor_amp: float = 0.05
    noise_jitter: float = 0.1
    switch: tuple[int, int, int] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_files < 1 or self.points_per_file < 2:
            raise ValueError("need at least one file of at least two points")
        if not 0 <= self.peak_center_bin < self.points_per_file:
            raise ValueError(
                f"peak bin {self.peak_center_bin} outside 0..{self.points_per_file - 1}"
            )
        if self.peak_linewidth_bins <= 0:
            raise ValueError("peak linewidth must be positive")
        if self.peak_amp < 0 or self.noise_floor_amp < 0 or self.noise_jitter < 0:
            raise ValueError("amplitudes must be nonnegative")
        if self.bin_spacing <= 0:
            raise ValueError("bin spacing must be positive")
        if self.switch is not None:
            file_index, _, relaxation = self.switch
            if not 0 <= file_index < self.n_files:
                raise ValueError(f"switch file index {file_index} out of range")
            if relaxation < 1:
                raise ValueError("relaxation must span at least one file")


# ---------------------------------------------------------------------------
# Loading and saving spectrum directories

def _numeric_stem(path: Path) -> int:
    if not re.fullmatch(r"-?\d+", path.stem):
        raise SpectrumFormatError(
            path, None, "spectrum files must have integer-stem names"
        )
    return int(path.stem)


def load_spectra(
    directory,
    column_map: tuple[int, int] = (0, 1),
    skip_rows: int = 0,
) -> SpectrumSeries:
    """Load a directory of tab-separated spectra, sorted by numeric stem.

    ``column_map`` selects (frequency column, amplitude column);
    ``skip_rows`` drops leading header rows from every file.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise SpectrumFormatError(directory, None, "not a directory")
    paths = sorted(directory.glob("*.txt"), key=_numeric_stem)
    if not paths:
        raise SpectrumFormatError(directory, None, "no .txt spectrum files found")

    freq_col, amp_col = column_map
    need = max(freq_col, amp_col) + 1
    files = []
    for out_index, path in enumerate(paths):
        freqs, amps = [], []
        width = None
        try:
            fh = open(path, "r", encoding="ascii")
        except OSError as exc:
            raise SpectrumFormatError(path, None, f"unreadable: {exc}") from exc
        with fh:
            for line_no, line in enumerate(fh, start=1):
                if line_no <= skip_rows:
                    continue
                fields = line.split()
                if not fields:
                    continue
                if width is None:
                    width = len(fields)
                if len(fields) != width or len(fields) < need:
                    raise SpectrumFormatError(
                        path, line_no, f"ragged row: expected {max(width, need)} "
                        f"fields, got {len(fields)}"
                    )
                try:
                    freqs.append(float(fields[freq_col]))
                    amps.append(float(fields[amp_col]))
                except ValueError:
                    raise SpectrumFormatError(
                        path, line_no, f"non-numeric field in {fields!r}"
                    ) from None
        try:
            files.append(SpectrumFile(np.array(freqs), np.array(amps), out_index))
        except ValueError as exc:
            raise SpectrumFormatError(path, None, str(exc)) from exc
    try:
        return SpectrumSeries(tuple(files))
    except ValueError as exc:
        raise SpectrumFormatError(directory, None, str(exc)) from exc


def save_spectra(directory, series: SpectrumSeries) -> None:
    """Write a series as <index>.txt files (tab-separated freq/amp rows)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for f in series.files:
        with open(directory / f"{f.index}.txt", "w", encoding="ascii") as fh:
            for freq, amp in zip(f.freqs, f.amps):
                fh.write(f"{freq:.8g}\t{amp:.8g}\n")


# ---------------------------------------------------------------------------
# Pipeline stages

def moving_average(series: SpectrumSeries, window: int) -> SpectrumSeries:
    """Amplitude-wise moving average over acquisition order.

    Output file n averages input files n..n+window-1; the result has
    N - window + 1 files on the unchanged frequency grid.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window > series.n_files:
        raise ValueError(
            f"window {window} exceeds the {series.n_files}-file series"
        )
    stack = np.stack([f.amps for f in series.files])
    csum = np.vstack([np.zeros((1, stack.shape[1])), np.cumsum(stack, axis=0)])
    means = (csum[window:] - csum[:-window]) / window
    grid = series.files[0].freqs
    files = tuple(
        SpectrumFile(grid, means[n], n) for n in range(means.shape[0])
    )
    return SpectrumSeries(files)


def subtract_noise_floor(
    spectrum: SpectrumFile, floor_range: tuple[int, int]
) -> SpectrumFile:
    """Subtract the mean amplitude over the index range [lo, hi).

    Negative results are kept; random phases make the sign immaterial.
    """
    lo, hi = floor_range
    if not 0 <= lo < hi <= spectrum.n_points:
        raise ValueError(
            f"floor range {floor_range} outside 0..{spectrum.n_points}"
        )
    floor = spectrum.amps[lo:hi].mean()
    return SpectrumFile(spectrum.freqs, spectrum.amps - floor, spectrum.index)


def assign_random_phases(
    spectrum: SpectrumFile, rng: np.random.Generator
) -> ComplexSpectrum:
    """Attach i.i.d. uniform (0, 2pi) phases; magnitudes are preserved."""
    phases = rng.uniform(0.0, 2.0 * np.pi, spectrum.n_points)
    return ComplexSpectrum(spectrum.amps * np.exp(1j * phases))


def hermitian_extend(cs: ComplexSpectrum) -> ComplexSpectrum:
    """Append the reversed conjugate of bins 1..M-1, giving length 2M-1.

    The result satisfies out[L-k] = conj(out[k]) for k = 1..M-1, so its
    inverse DFT is real up to the constant Im(X[0])/L offset.
    """
    m = len(cs)
    if m < 2:
        raise ValueError(f"need at least two bins to extend, got {m}")
    v = cs.values
    return ComplexSpectrum(np.concatenate([v, np.conj(v[:0:-1])]))


def inverse_dft(cs: ComplexSpectrum) -> np.ndarray:
    """Inverse DFT x[n] = (1/L) * sum_k X[k] exp(+2i*pi*k*n/L)."""
    return np.fft.ifft(cs.values)


def real_signal(blocks, sample_rate: float) -> TimeSeries:
    """Concatenate the real parts of per-file complex blocks."""
    blocks = list(blocks)
    if not blocks:
        raise ValueError("no blocks to concatenate")
    return TimeSeries(
        np.concatenate([np.real(np.asarray(b)) for b in blocks]), sample_rate
    )


def design_bandpass(
    low: float,
    high: float,
    sample_rate: float,
    transition_hz: float = 25.0,
    stopband_db: float = 40.0,
) -> np.ndarray:
    """Linear-phase Kaiser windowed-sinc band-pass taps (odd length)."""
    nyq = sample_rate / 2.0
    if not 0.0 <= low < high < nyq:
        raise ValueError(f"band ({low}, {high}) must satisfy 0 <= low < high < {nyq}")
    width = 2.0 * transition_hz / nyq
    # 6 dB design margin keeps the declared mask met with room to spare.
    numtaps, beta = _signal.kaiserord(stopband_db + 6.0, width)
    numtaps |= 1
    return _signal.firwin(
        numtaps, [low, high], window=("kaiser", beta), pass_zero=False, fs=sample_rate
    )


def bandpass(
    ts: TimeSeries,
    low: float,
    high: float,
    transition_hz: float = 25.0,
    stopband_db: float = 40.0,
) -> TimeSeries:
    """Band-pass filter with same-length output (group delay compensated)."""
    taps = design_bandpass(low, high, ts.sample_rate, transition_hz, stopband_db)
    if ts.samples.size == 0:
        return ts
    filtered = _signal.oaconvolve(ts.samples, taps, mode="same")
    return TimeSeries(filtered, ts.sample_rate)


def export_wav(
    ts: TimeSeries,
    path,
    normalize_peak: float = PEAK_LEVEL,
    resample_to: int | None = None,
) -> None:
    """Write 16-bit PCM mono, scaled so the peak equals ``normalize_peak``.

    An all-zero signal is written as silence without scaling. With
    ``resample_to``, a linear-phase polyphase resampler converts the rate
    first (players commonly reject the native 2015 Hz).
    """
    if ts.samples.size == 0:
        raise ValueError("refusing to write an empty signal")
    if not 0.0 < normalize_peak < 1.0:
        raise ValueError(f"normalize_peak must lie in (0, 1), got {normalize_peak}")
    samples, rate = ts.samples, ts.sample_rate
    if resample_to is not None and resample_to != rate:
        src = int(round(rate))
        g = math.gcd(int(resample_to), src)
        samples = _signal.resample_poly(samples, int(resample_to) // g, src // g)
        rate = float(resample_to)
    peak = np.abs(samples).max()
    if peak > 0.0:
        samples = samples * (normalize_peak / peak)
    write_wav(path, samples, rate)


def spectrogram(
    ts: TimeSeries,
    window_len: int = 1024,
    hop: int = 256,
    fmin: float = 440.0,
    fmax: float = 520.0,
) -> SpectrogramData:
    """Hann-window magnitude STFT, cropped to the [fmin, fmax] band."""
    n = ts.samples.size
    if window_len > n:
        raise ValueError(f"window {window_len} longer than the {n}-sample signal")
    if hop < 1:
        raise ValueError(f"hop must be >= 1, got {hop}")
    if not 0.0 <= fmin < fmax:
        raise ValueError(f"need 0 <= fmin < fmax, got ({fmin}, {fmax})")
    win = np.hanning(window_len)
    frames = np.lib.stride_tricks.sliding_window_view(ts.samples, window_len)[::hop]
    mags = np.abs(np.fft.rfft(frames * win, axis=1))
    freqs = np.fft.rfftfreq(window_len, 1.0 / ts.sample_rate)
    sel = (freqs >= fmin) & (freqs <= fmax)
    if not sel.any():
        raise ValueError(f"no STFT bins inside ({fmin}, {fmax})")
    starts = np.arange(frames.shape[0]) * hop
    times = (starts + window_len / 2.0) / ts.sample_rate
    return SpectrogramData(times, freqs[sel], mags[:, sel], window_len, hop)


def _centered_median(values: np.ndarray, kernel: int) -> np.ndarray:
    half = kernel // 2
    return np.array([
        np.median(values[max(0, i - half): i + half + 1])
        for i in range(values.size)
    ])


def detect_frequency_switch(
    sg: SpectrogramData,
    jump_threshold_hz: float = 15.0,
    baseline_frames: int = 10,
    smooth_frames: int = 33,
) -> list[tuple[float, float]]:
    """Find abrupt jumps of the dominant in-band frequency.

    The track is the per-frame magnitude argmax, median-smoothed over a
    centered ``smooth_frames`` window (random phases make single-frame
    argmax flicker between comparable peaks; 33 frames is about one
    averaged file at the instrument-scale geometry). A frame qualifies
    when the track deviates from the median of the preceding
    ``baseline_frames`` frames by at least ``jump_threshold_hz``;
    qualifying frames closer than ``baseline_frames`` apart merge into one
    (time_s, delta_hz) event.
    """
    if sg.times.size == 0:
        return []
    track = sg.freqs[np.argmax(sg.magnitudes, axis=1)]
    if smooth_frames > 1:
        track = _centered_median(track, smooth_frames)
    events: list[tuple[float, float]] = []
    last_hit = None
    for i in range(1, track.size):
        base = float(np.median(track[max(0, i - baseline_frames):i]))
        delta = track[i] - base
        if abs(delta) >= jump_threshold_hz:
            if last_hit is None or i - last_hit > baseline_frames:
                events.append((float(sg.times[i]), float(delta)))
            last_hit = i
    return events


def generate_synthetic(cfg: SyntheticConfig) -> SpectrumSeries:
    """Build a synthetic series per the config; deterministic per seed."""
    m = cfg.points_per_file
    bins = np.arange(m, dtype=np.float64)
    freqs = bins * cfg.bin_spacing
    gamma = cfg.peak_linewidth_bins
    files = []
    for i in range(cfg.n_files):
        center = float(cfg.peak_center_bin)
        if cfg.switch is not None and i >= cfg.switch[0]:
            file_index, bin_shift, relaxation = cfg.switch
            center += bin_shift * max(0.0, 1.0 - (i - file_index) / relaxation)
        amps = cfg.peak_amp * gamma**2 / ((bins - center) ** 2 + gamma**2)
        if cfg.noise_floor_amp > 0.0:
            # Salted stream: keeps jitter decoupled from the phase streams
            # when the same seed later drives sonification.
            rng = np.random.default_rng([cfg.seed, i, 0x53594E])
            jitter = cfg.noise_jitter * rng.uniform(-1.0, 1.0, m)
            amps = amps + cfg.noise_floor_amp * (1.0 + jitter)
        files.append(SpectrumFile(freqs, amps, i))
    return SpectrumSeries(tuple(files))


def sonify_series(series: SpectrumSeries, cfg: SonifyConfig) -> TimeSeries:
    """Full pipeline: average, flatten, phase, extend, invert, filter.

    Each averaged file draws phases from its own (seed, index) stream, so
    files may be processed concurrently without changing the output.
    """
    lo, hi = cfg.noise_floor_range
    if hi > series.n_points:
        raise ValueError(
            f"noise-floor range {cfg.noise_floor_range} outside the "
            f"{series.n_points}-point files"
        )
    averaged = moving_average(series, cfg.window)
    blocks = []
    for f in averaged.files:
        flat = subtract_noise_floor(f, cfg.noise_floor_range)
        rng = np.random.default_rng([cfg.seed, f.index])
        cs = assign_random_phases(flat, rng)
        blocks.append(inverse_dft(hermitian_extend(cs)))
    ts = real_signal(blocks, cfg.sample_rate)
    return bandpass(ts, *cfg.band)


def pipeline_duration_s(
    n_files: int,
    points_per_file: int,
    window: int = 10,
    sample_rate: float = 2015.0,
) -> float:
    """Sonification duration in seconds without rendering any audio.

    After the moving average, N - window + 1 files of 2M - 1 samples each
    play back at the configured rate.
    """
    if window < 1 or window > n_files:
        raise ValueError(f"window {window} invalid for {n_files} files")
    if points_per_file < 2 or sample_rate <= 0:
        raise ValueError("need at least two points per file and a positive rate")
    return (n_files - window + 1) * (2 * points_per_file - 1) / sample_rate


def thermal_occupation(f0: float, temperature: float) -> float:
    """Bose-Einstein mean occupation 1/(exp(h*f0/(kB*T)) - 1)."""
    if f0 <= 0 or temperature <= 0:
        raise ValueError("frequency and temperature must be positive")
    ratio = PLANCK_H * f0 / (BOLTZMANN_K * temperature)
    if ratio > 700.0:
        return 0.0  # occupation below double precision; exp would overflow
    return 1.0 / math.expm1(ratio)


# ---------------------------------------------------------------------------
# Artifact writers

def write_spectrogram_csv(path, sg: SpectrogramData) -> None:
    """CSV matrix: first row the frequency axis, first column the time axis."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("," + ",".join(f"{f:.8g}" for f in sg.freqs) + "\n")
        for t, row in zip(sg.times, sg.magnitudes):
            fh.write(f"{t:.8g}," + ",".join(f"{v:.8g}" for v in row) + "\n")


def write_spectrogram_png(path, sg: SpectrogramData) -> None:
    """Render the spectrogram image (time on x, frequency on y)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(10, 4))
    mesh = ax.pcolormesh(
        sg.times, sg.freqs, sg.magnitudes.T, cmap="magma_r", shading="auto"
    )
    ax.set_xlabel("t (secs)")
    ax.set_ylabel("f (Hz)")
    fig.colorbar(mesh, ax=ax, label="amplitude")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def write_events_csv(path, events) -> None:
    """Write detected switch events as (time_s, delta_hz) rows."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("time_s,delta_hz\n")
        for time_s, delta_hz in events:
            fh.write(f"{time_s:.6f},{delta_hz:.6f}\n")
