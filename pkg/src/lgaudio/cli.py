"""Command-line entry point: experiment -> records -> audio/report workflows.

Subcommands: lg-run (one experiment), lg-table (the four standard
intervals), sonify (spectra or synthetic data to WAV/spectrogram/events),
compose (record files to the Shepard-tone piece), gen-synth (write a
synthetic spectrum directory). Every run writes a manifest.txt next to its
outputs; identical flags and seeds reproduce identical data files.
"""

from __future__ import annotations

import argparse
import datetime
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, lgcore, qmusic, sonify
from .records import RecordFormatError
from .sonify import SpectrumFormatError

RECORD_FILES = {
    "C21": "records_c21.csv",
    "C32": "records_c32.csv",
    "C31": "records_c31.csv",
}


# ---------------------------------------------------------------------------
# Argument parsing helpers

def theta_over_pi(text: str) -> float:
    """Rotation angle in units of pi, given as a float or fraction like 1/3."""
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            value = float(num) / float(den)
        else:
            value = float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite, got {text!r}")
    return value


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {value}")
    return value


def int_pair(text: str) -> tuple[int, int]:
    parts = text.replace(",", ":").split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    return int(parts[0]), int(parts[1])


def float_pair(text: str) -> tuple[float, float]:
    parts = text.replace(",", ":").split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    return float(parts[0]), float(parts[1])


def int_triple(text: str) -> tuple[int, int, int]:
    parts = text.replace(",", ":").split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected FILE:SHIFT:RELAX, got {text!r}")
    return int(parts[0]), int(parts[1]), int(parts[2])


def volume_triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three volumes, got {text!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def scale_ring(text: str) -> qmusic.ScaleRing:
    if text == "eb-dorian":
        return qmusic.EB_DORIAN
    try:
        return qmusic.ring_from_names(text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------------------
# Manifest

def write_manifest(out_dir: Path, command: str, entries: dict) -> None:
    """One human-readable key-value manifest per artifact-producing run."""
    lines = [
        f"command = {command}",
        f"version = {__version__}",
        f"timestamp = {datetime.datetime.now().isoformat()}",
    ]
    lines += [f"{key} = {value}" for key, value in entries.items()]
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="ascii")


def _make_out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Subcommands

def cmd_lg_run(args) -> int:
    out = _make_out_dir(args)
    theta = args.theta * math.pi
    config = lgcore.ExperimentConfig(
        theta=theta, n_shots=args.shots, seed=args.seed, noise_p=args.noise_p
    )
    record_sets, stat = lgcore.run_experiment(config)
    for label, rs in record_sets.items():
        lgcore.save_record_set(out / RECORD_FILES[label], rs)
    k_theor = lgcore.k_theoretical(theta)
    lgcore.write_k_report(
        out / "k_report.csv", [(args.theta, stat.k, k_theor, stat.classification)]
    )
    series = lgcore.cumulative_k(*(record_sets[lbl] for lbl in lgcore.LABELS))
    lgcore.write_cumulative_csv(out / "cumulative_k.csv", series)
    write_manifest(out, "lg-run", {
        "theta_over_pi": args.theta,
        "shots": args.shots,
        "seed": args.seed,
        "noise_p": args.noise_p,
        "k_exp": f"{stat.k:.6f}",
        "k_theor": f"{k_theor:.6f}",
        "classification": stat.classification,
        "outputs": ", ".join(sorted(p.name for p in out.iterdir() if p.name != "manifest.txt")),
    })
    return 0


def cmd_lg_table(args) -> int:
    out = _make_out_dir(args)
    rows = []
    for i, top in enumerate(lgcore.TABLE_THETA_OVER_PI):
        theta = top * math.pi
        config = lgcore.ExperimentConfig(
            theta=theta, n_shots=args.shots, seed=args.seed + i, noise_p=args.noise_p
        )
        _, stat = lgcore.run_experiment(config)
        rows.append((top, stat.k, lgcore.k_theoretical(theta), stat.classification))
    lgcore.write_k_report(out / "k_table.csv", rows)
    write_manifest(out, "lg-table", {
        "shots": args.shots,
        "seed": args.seed,
        "noise_p": args.noise_p,
        "theta_over_pi": ", ".join(f"{t:.6g}" for t in lgcore.TABLE_THETA_OVER_PI),
        "outputs": "k_table.csv",
    })
    return 0


def _synthetic_config(args) -> sonify.SyntheticConfig:
    return sonify.SyntheticConfig(
        n_files=args.synth_files,
        points_per_file=args.synth_points,
        peak_center_bin=args.synth_peak_bin,
        peak_linewidth_bins=args.synth_linewidth,
        peak_amp=args.synth_peak_amp,
        noise_floor_amp=args.synth_floor_amp,
        switch=args.synth_switch,
        seed=args.seed,
    )


def _add_synth_args(parser) -> None:
    parser.add_argument("--synth-files", type=positive_int, default=200,
                        help="number of synthetic spectra (default 200)")
    parser.add_argument("--synth-points", type=positive_int, default=4095,
                        help="points per spectrum (default 4095)")
    parser.add_argument("--synth-peak-bin", type=nonneg_int, default=1910,
                        help="Lorentzian center bin (default 1910, ~470 Hz at 2015 Hz)")
    parser.add_argument("--synth-linewidth", type=float, default=4.0,
                        help="Lorentzian half-width in bins (default 4)")
    parser.add_argument("--synth-peak-amp", type=float, default=1.0,
                        help="peak amplitude (default 1.0)")
    parser.add_argument("--synth-floor-amp", type=float, default=0.05,
                        help="noise-floor amplitude (default 0.05)")
    parser.add_argument("--synth-switch", type=int_triple, default=None,
                        metavar="FILE:SHIFT:RELAX",
                        help="inject a frequency switch: onset file, bin shift, "
                             "relaxation span in files")


def cmd_sonify(args) -> int:
    if (args.input is None) == (not args.synthetic):
        print("error: pass an input directory or --synthetic, not both/neither",
              file=sys.stderr)
        return 1
    out = _make_out_dir(args)
    if args.synthetic:
        series = sonify.generate_synthetic(_synthetic_config(args))
        source = "synthetic"
    else:
        series = sonify.load_spectra(args.input, args.column_map, args.skip_rows)
        source = str(args.input)
    config = sonify.SonifyConfig(
        window=args.window,
        noise_floor_range=args.noise_floor_range,
        sample_rate=args.sample_rate,
        band=args.band,
        seed=args.seed,
    )
    ts = sonify.sonify_series(series, config)
    sonify.export_wav(ts, out / "sound.wav",
                      resample_to=44100 if args.resample else None)
    fmin, fmax = args.spec_range
    sg = sonify.spectrogram(ts, args.spec_window, args.spec_hop, fmin, fmax)
    sonify.write_spectrogram_csv(out / "spectrogram.csv", sg)
    sonify.write_spectrogram_png(out / "spectrogram.png", sg)
    events = sonify.detect_frequency_switch(sg, args.jump_threshold)
    sonify.write_events_csv(out / "events.csv", events)
    write_manifest(out, "sonify", {
        "input": source,
        "n_files": series.n_files,
        "points_per_file": series.n_points,
        "window": args.window,
        "noise_floor_range": f"{config.noise_floor_range[0]}:{config.noise_floor_range[1]}",
        "sample_rate": args.sample_rate,
        "band": f"{config.band[0]}:{config.band[1]}",
        "seed": args.seed,
        "skip_rows": args.skip_rows,
        "column_map": f"{args.column_map[0]}:{args.column_map[1]}",
        "resample": args.resample,
        "duration_s": f"{ts.duration_s:.3f}",
        "events": len(events),
        "outputs": "sound.wav, spectrogram.csv, spectrogram.png, events.csv",
    })
    return 0


def cmd_gen_synth(args) -> int:
    out = _make_out_dir(args)
    series = sonify.generate_synthetic(_synthetic_config(args))
    # Spectra go in a subdirectory: the loader owns every .txt file there.
    sonify.save_spectra(out / "spectra", series)
    write_manifest(out, "gen-synth", {
        "n_files": series.n_files,
        "points_per_file": series.n_points,
        "seed": args.seed,
        "switch": args.synth_switch,
        "outputs": f"spectra/0.txt .. spectra/{series.n_files - 1}.txt",
    })
    return 0


def _movement_sources(args) -> list[tuple[Path, Path, Path]]:
    if args.from_lg_run:
        triples = []
        for run_dir in args.from_lg_run:
            run_dir = Path(run_dir)
            triples.append(tuple(run_dir / RECORD_FILES[lbl] for lbl in lgcore.LABELS))
        return triples
    if not args.records or len(args.records) % 3 != 0:
        raise ValueError(
            "pass record files in groups of three (C21 C32 C31) or --from-lg-run"
        )
    paths = [Path(p) for p in args.records]
    return [tuple(paths[i: i + 3]) for i in range(0, len(paths), 3)]


def cmd_compose(args) -> int:
    out = _make_out_dir(args)
    triples = _movement_sources(args)
    movements = []
    for triple in triples:
        for p in triple:
            if not Path(p).is_file():
                raise FileNotFoundError(f"missing record file: {p}")
        sets = [lgcore.load_record_set(p, lbl) for p, lbl in zip(triple, lgcore.LABELS)]
        stat = lgcore.k_statistic(*(lgcore.estimate_correlation(rs) for rs in sets))
        walks = tuple(qmusic.walk_from_bits(rs.bits) for rs in sets)
        movements.append((qmusic.Movement(walks, stat.k, args.voice_volumes), triple, sets))

    # Movements play in ascending-K order unless shuffled.
    movements.sort(key=lambda entry: entry[0].k_label)
    params = qmusic.ShepardParams(
        note_dur=args.tempo, center_midi=args.center_midi, octaves=args.octaves
    )
    buffers = [qmusic.render_movement(m, args.scale, params) for m, _, _ in movements]
    for i, buf in enumerate(buffers, start=1):
        qmusic.export_movement_wav(out / f"movement_{i}.wav", buf, params.render_rate)
    audio, order = qmusic.compose(
        buffers, gap_s=args.gap, render_rate=params.render_rate,
        shuffle=args.shuffle, seed=args.seed,
    )
    qmusic.export_movement_wav(out / "composition.wav", audio, params.render_rate)

    entries: dict = {
        "scale": ",".join(args.scale.names),
        "tempo_s": args.tempo,
        "center_midi": args.center_midi,
        "octaves": f"{args.octaves[0]}:{args.octaves[1]}",
        "voice_volumes": ",".join(f"{v:g}" for v in args.voice_volumes),
        "gap_s": args.gap,
        "shuffle": args.shuffle,
        "seed": args.seed,
        "play_order": ", ".join(f"movement_{i + 1}" for i in order),
    }
    for i, (movement, triple, sets) in enumerate(movements, start=1):
        entries[f"movement_{i}.k_exp"] = f"{movement.k_label:.6f}"
        entries[f"movement_{i}.shots"] = ", ".join(str(rs.n_shots) for rs in sets)
        entries[f"movement_{i}.sources"] = ", ".join(str(p) for p in triple)
    write_manifest(out, "compose", entries)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly

def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="lgaudio",
        description="Qubit correlation experiments as data, sound, and music.",
    )
    parser.add_argument("--version", action="version", version=f"lgaudio {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    submap = {}

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--config", default=None,
                       help="key=value file supplying defaults (flags win)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=nonneg_int, default=0, help="RNG seed (default 0)")
        submap[name] = p
        return p

    p = add("lg-run", cmd_lg_run, "run one experiment and write records + K reports")
    p.add_argument("--theta", type=theta_over_pi, required=True,
                   help="rotation per base interval, in units of pi (e.g. 1/3, 0.712)")
    p.add_argument("--shots", type=positive_int, default=500,
                   help="shots per record set (default 500)")
    p.add_argument("--noise-p", type=probability, default=None,
                   help="depolarizing emulation knob in [0, 1]")

    p = add("lg-table", cmd_lg_table, "run the four standard intervals into one table")
    p.add_argument("--shots", type=positive_int, default=500)
    p.add_argument("--noise-p", type=probability, default=None)

    p = add("sonify", cmd_sonify, "turn a spectrum directory (or synthetic data) into audio")
    p.add_argument("input", nargs="?", default=None, help="directory of .txt spectra")
    p.add_argument("--synthetic", action="store_true",
                   help="use the synthetic generator instead of an input directory")
    p.add_argument("--window", type=positive_int, default=10,
                   help="moving-average length in files (default 10)")
    p.add_argument("--noise-floor-range", type=int_pair, default=(1500, 1800),
                   metavar="LO:HI", help="noise-floor index range (default 1500:1800)")
    p.add_argument("--sample-rate", type=float, default=2015.0,
                   help="playback rate in Hz (default 2015)")
    p.add_argument("--band", type=float_pair, default=(400.0, 550.0),
                   metavar="LOW:HIGH", help="band-pass cutoffs in Hz (default 400:550)")
    p.add_argument("--skip-rows", type=nonneg_int, default=0,
                   help="leading header rows to drop per file (default 0)")
    p.add_argument("--column-map", type=int_pair, default=(0, 1), metavar="FREQ:AMP",
                   help="column indices for frequency and amplitude (default 0:1)")
    p.add_argument("--resample", action="store_true",
                   help="write the WAV at 44100 Hz instead of the native rate")
    p.add_argument("--spec-window", type=positive_int, default=1024,
                   help="spectrogram window length in samples (default 1024)")
    p.add_argument("--spec-hop", type=positive_int, default=256,
                   help="spectrogram hop in samples (default 256)")
    p.add_argument("--spec-range", type=float_pair, default=(440.0, 520.0),
                   metavar="FMIN:FMAX", help="spectrogram band in Hz (default 440:520)")
    p.add_argument("--jump-threshold", type=float, default=15.0,
                   help="switch-event threshold in Hz (default 15)")
    _add_synth_args(p)

    p = add("gen-synth", cmd_gen_synth, "write a synthetic spectrum directory")
    _add_synth_args(p)

    p = add("compose", cmd_compose, "render record files into the Shepard-tone piece")
    p.add_argument("records", nargs="*",
                   help="record files in groups of three (C21 C32 C31 per movement)")
    p.add_argument("--from-lg-run", nargs="+", default=None, metavar="DIR",
                   help="lg-run output directories, one per movement")
    p.add_argument("--scale", type=scale_ring, default=qmusic.EB_DORIAN,
                   help='"eb-dorian" or seven comma-separated names (default eb-dorian)')
    p.add_argument("--tempo", type=float, default=0.15,
                   help="seconds per note (default 0.15)")
    p.add_argument("--center-midi", type=float, default=68.0,
                   help="center of the Shepard spectral bell (default 68)")
    p.add_argument("--octaves", type=int_pair, default=(1, 9), metavar="LO:HI",
                   help="octave span of each tone (default 1:9)")
    p.add_argument("--voice-volumes", type=volume_triple, default=qmusic.VOICE_VOLUMES,
                   metavar="V21,V32,V31", help="per-voice gains (default 1,1,2)")
    p.add_argument("--gap", type=float, default=2.0,
                   help="silence between movements in seconds (default 2)")
    p.add_argument("--shuffle", action="store_true",
                   help="randomize movement order (permutation logged)")

    return parser, submap


def _load_config_file(path: str) -> dict:
    overrides = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ValueError(f"{path}:{line_no}: expected key = value, got {text!r}")
        key, value = text.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _apply_config(argv: list[str], submap: dict) -> None:
    """Feed --config values in as subparser defaults so flags still win."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config":
            if i + 1 < len(argv):
                path = argv[i + 1]
            break
        if token.startswith("--config="):
            path = token.split("=", 1)[1]
            break
    if path is None:
        return
    name = next((a for a in argv if not a.startswith("-")), None)
    if name not in submap:
        return
    sub = submap[name]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in _load_config_file(path).items():
        dest = key.replace("-", "_")
        if dest not in actions:
            raise ValueError(f"unknown config key {key!r} for {name}")
        action = actions[dest]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = raw.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            defaults[dest] = action.type(raw)
        else:
            defaults[dest] = raw
    sub.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser, submap = build_parser()
    try:
        _apply_config(argv, submap)
        args = parser.parse_args(argv)
        return args.func(args)
    except (ValueError, OSError, RecordFormatError, SpectrumFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
