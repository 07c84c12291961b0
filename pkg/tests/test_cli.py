"""Command-line workflow tests (in-process main() calls)."""

import numpy as np
import pytest

from lgaudio import cli
from lgaudio.records import read_bits

SMALL_SONIFY = [
    "--synth-files", "40", "--synth-points", "1024",
    "--synth-peak-bin", "477", "--noise-floor-range", "700:900",
]


def run(*argv):
    return cli.main(list(argv))


def read_k_report(path):
    lines = path.read_text().splitlines()[1:]
    return [line.split(",") for line in lines]


# ---------------------------------------------------------------------------
# lg-run / lg-table

def test_lg_run_outputs(tmp_out):
    assert run("lg-run", "--theta", "1/3", "--shots", "500", "--seed", "7",
               "--out", str(tmp_out)) == 0
    for name in ("records_c21.csv", "records_c32.csv", "records_c31.csv",
                 "k_report.csv", "cumulative_k.csv", "manifest.txt"):
        assert (tmp_out / name).exists()
    ((theta, k_exp, k_theor, label),) = read_k_report(tmp_out / "k_report.csv")
    assert float(k_theor) == 1.5
    assert float(k_exp) > 1.0
    assert label == "violates_upper"
    assert len(read_bits(tmp_out / "records_c21.csv")) == 500


def test_lg_run_theta_pi_deterministic(tmp_out):
    assert run("lg-run", "--theta", "1", "--shots", "100", "--out", str(tmp_out)) == 0
    assert read_bits(tmp_out / "records_c21.csv").tolist() == [1] * 100
    assert read_bits(tmp_out / "records_c31.csv").tolist() == [0] * 100
    ((_, k_exp, k_theor, label),) = read_k_report(tmp_out / "k_report.csv")
    assert k_exp == "-3.000000"
    assert k_theor == "-3.000000"
    assert label == "classical"


def test_lg_run_rejects_zero_shots(tmp_out):
    with pytest.raises(SystemExit) as err:
        run("lg-run", "--theta", "1/3", "--shots", "0", "--out", str(tmp_out))
    assert err.value.code == 2


def test_lg_table_theory_column(tmp_out):
    assert run("lg-table", "--shots", "200", "--seed", "5", "--out", str(tmp_out)) == 0
    rows = read_k_report(tmp_out / "k_table.csv")
    assert [r[0] for r in rows] == ["0.333333", "0.5", "0.712", "1"]
    theor = [float(r[2]) for r in rows]
    assert theor[0] == 1.5 and theor[1] == 1.0 and theor[3] == -3.0
    assert abs(theor[2] - (-1.0)) <= 2e-3


def test_lg_table_noise_brackets_hardware_value(tmp_out):
    assert run("lg-table", "--shots", "500", "--seed", "1", "--noise-p", "0.107",
               "--out", str(tmp_out)) == 0
    rows = read_k_report(tmp_out / "k_table.csv")
    assert abs(float(rows[0][1]) - 1.34) < 0.25


def test_lg_table_replay_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("lg-table", "--seed", "9", "--out", str(out)) == 0
    assert (a / "k_table.csv").read_bytes() == (b / "k_table.csv").read_bytes()


# ---------------------------------------------------------------------------
# sonify / gen-synth

def test_sonify_synthetic_outputs(tmp_out):
    assert run("sonify", "--synthetic", *SMALL_SONIFY, "--out", str(tmp_out)) == 0
    for name in ("sound.wav", "spectrogram.csv", "spectrogram.png",
                 "events.csv", "manifest.txt"):
        assert (tmp_out / name).exists()
    assert (tmp_out / "events.csv").read_text().splitlines() == ["time_s,delta_hz"]


def test_sonify_switch_event_row(tmp_out):
    assert run("sonify", "--synthetic", "--synth-files", "120", "--synth-points",
               "1024", "--synth-peak-bin", "477", "--synth-linewidth", "3",
               "--synth-switch", "60:31:200", "--noise-floor-range", "700:900",
               "--spec-range", "440:540", "--seed", "8", "--out", str(tmp_out)) == 0
    lines = (tmp_out / "events.csv").read_text().splitlines()
    assert lines[0] == "time_s,delta_hz"
    assert len(lines) == 2
    assert float(lines[1].split(",")[1]) > 15.0


def test_sonify_requires_one_input(tmp_out):
    assert run("sonify", "--out", str(tmp_out)) == 1


def test_sonify_empty_directory_fails(tmp_path, tmp_out):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run("sonify", str(empty), "--out", str(tmp_out)) == 1


def test_sonify_deterministic_bytes(tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert run("sonify", "--synthetic", *SMALL_SONIFY, "--seed", "3",
                   "--out", str(out)) == 0
    for name in ("sound.wav", "spectrogram.csv", "events.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_gen_synth_round_trip(tmp_path):
    out = tmp_path / "gen"
    assert run("gen-synth", "--synth-files", "5", "--synth-points", "64",
               "--synth-peak-bin", "20", "--seed", "2", "--out", str(out)) == 0
    spectra = out / "spectra"
    assert sorted(p.name for p in spectra.glob("*.txt")) == [f"{i}.txt" for i in range(5)]
    run2 = tmp_path / "gen2"
    assert run("gen-synth", "--synth-files", "5", "--synth-points", "64",
               "--synth-peak-bin", "20", "--seed", "2", "--out", str(run2)) == 0
    for i in range(5):
        assert ((spectra / f"{i}.txt").read_bytes()
                == (run2 / "spectra" / f"{i}.txt").read_bytes())


def test_sonify_reads_generated_directory(tmp_path):
    gen = tmp_path / "gen"
    assert run("gen-synth", "--synth-files", "24", "--synth-points", "512",
               "--synth-peak-bin", "238", "--out", str(gen)) == 0
    out = tmp_path / "audio"
    assert run("sonify", str(gen / "spectra"), "--noise-floor-range", "350:450",
               "--out", str(out)) == 0
    assert (out / "sound.wav").exists()


# ---------------------------------------------------------------------------
# compose

def make_runs(tmp_path, thetas=("1/3", "1/2", "0.712", "1"), shots="20"):
    dirs = []
    for i, theta in enumerate(thetas):
        out = tmp_path / f"run{i}"
        assert run("lg-run", "--theta", theta, "--shots", shots, "--seed", str(40 + i),
                   "--out", str(out)) == 0
        dirs.append(str(out))
    return dirs


def test_compose_from_lg_runs(tmp_path, tmp_out):
    dirs = make_runs(tmp_path)
    assert run("compose", "--from-lg-run", *dirs, "--out", str(tmp_out)) == 0
    for i in range(1, 5):
        assert (tmp_out / f"movement_{i}.wav").exists()
    assert (tmp_out / "composition.wav").exists()
    manifest = (tmp_out / "manifest.txt").read_text()
    k_values = [float(line.split("=")[1]) for line in manifest.splitlines()
                if ".k_exp" in line]
    assert k_values == sorted(k_values)
    from lgaudio.wavio import read_wav
    audio, rate = read_wav(tmp_out / "composition.wav")
    # Four 20-shot movements (20 * 0.15 + 1.4 s each) with three 2 s gaps.
    assert audio.size / rate == pytest.approx(4 * (20 * 0.15 + 1.4) + 3 * 2.0, abs=0.05)


def test_compose_explicit_records_and_duration(tmp_path, tmp_out):
    (run_dir,) = make_runs(tmp_path, thetas=("1/3",), shots="10")
    files = [f"{run_dir}/records_c{ij}.csv" for ij in ("21", "32", "31")]
    assert run("compose", *files, "--gap", "0.5", "--out", str(tmp_out)) == 0
    from lgaudio.wavio import read_wav
    audio, rate = read_wav(tmp_out / "composition.wav")
    assert rate == 44100
    assert audio.size / rate == pytest.approx(10 * 0.15 + 1.4, abs=0.05)


def test_compose_missing_file_names_path(tmp_path, tmp_out, capsys):
    missing = tmp_path / "nope.csv"
    code = run("compose", str(missing), str(missing), str(missing),
               "--out", str(tmp_out))
    assert code == 1
    assert str(missing) in capsys.readouterr().err


def test_compose_shuffle_logged_and_reproducible(tmp_path):
    dirs = make_runs(tmp_path, shots="10")
    orders = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run("compose", "--from-lg-run", *dirs, "--shuffle", "--seed", "3",
                   "--out", str(out)) == 0
        manifest = (out / "manifest.txt").read_text()
        (line,) = [ln for ln in manifest.splitlines() if ln.startswith("play_order")]
        orders.append(line)
    assert orders[0] == orders[1]


def test_compose_wav_determinism(tmp_path):
    dirs = make_runs(tmp_path, thetas=("1/3",), shots="10")
    outs = [tmp_path / "x", tmp_path / "y"]
    for out in outs:
        assert run("compose", "--from-lg-run", *dirs, "--out", str(out)) == 0
    assert ((outs[0] / "composition.wav").read_bytes()
            == (outs[1] / "composition.wav").read_bytes())


def test_compose_bad_group_count(tmp_path, tmp_out):
    (run_dir,) = make_runs(tmp_path, thetas=("1/3",), shots="10")
    code = run("compose", f"{run_dir}/records_c21.csv", "--out", str(tmp_out))
    assert code == 1


# ---------------------------------------------------------------------------
# config file and misc

def test_config_file_defaults_and_flag_override(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("shots = 25\nseed = 4\n")
    a = tmp_path / "a"
    assert run("lg-run", "--theta", "1/3", "--config", str(config),
               "--out", str(a)) == 0
    assert len(read_bits(a / "records_c21.csv")) == 25
    b = tmp_path / "b"
    assert run("lg-run", "--theta", "1/3", "--config", str(config),
               "--shots", "30", "--out", str(b)) == 0
    assert len(read_bits(b / "records_c21.csv")) == 30


def test_config_file_rejects_unknown_key(tmp_path, tmp_out):
    config = tmp_path / "run.conf"
    config.write_text("bogus = 1\n")
    assert run("lg-run", "--theta", "1/3", "--config", str(config),
               "--out", str(tmp_out)) == 1


def test_unknown_subcommand_exits_with_usage():
    with pytest.raises(SystemExit) as err:
        run("frobnicate")
    assert err.value.code == 2


def test_theta_parsing(tmp_out):
    with pytest.raises(SystemExit):
        run("lg-run", "--theta", "x/y", "--out", str(tmp_out))
