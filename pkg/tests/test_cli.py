import json

from hypothesis import given
from hypothesis import strategies as st

from wsncodes.cli import main
from wsncodes.experiment import CODECS, ExperimentConfig


def test_run_discus_reports_five_bits(flat_histogram, tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--codec", "discus", "--source", f"pseudo:{flat_histogram}",
               "--correlation", "bitflip:1", "--samples", "100", "--seed", "7",
               "--out", str(out), "--format", "json"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)[0]
    assert report["avg_bits"] == 5.0
    assert {p.name for p in out.iterdir()} == {"events.jsonl", "report.json", "series.csv", "config.txt", "packets.hex"}
    lines = (out / "packets.hex").read_text().splitlines()
    assert lines[0].startswith("broadcast ") and len(lines) == 1 + 200 + 200
    assert all(len(l.split()[1]) == {"broadcast": 10, "sensor": 18, "pc": 38}[l.split()[0]] for l in lines)


def test_run_fibonacci_trace_is_lossless(walk_trace, capsys):
    rc = main(["run", "--codec", "fibonacci", "--source", f"trace:{walk_trace}", "--samples", "50",
               "--format", "json"])
    report = json.loads(capsys.readouterr().out)[0]
    assert rc == 0 and (report["error_mean"], report["error_std"]) == (0.0, 0.0)


def test_same_seed_gives_identical_artifacts(flat_histogram, tmp_path):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        assert main(["run", "--codec", "modulo", "--source", f"pseudo:{flat_histogram}",
                     "--samples", "300", "--seed", "4", "--out", str(d), "--format", "csv"]) == 0
    for name in ("events.csv", "report.csv", "series.csv", "config.txt", "packets.hex"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_config_errors_exit_one_without_artifacts(walk_trace, tmp_path, capsys):
    out = tmp_path / "never"
    assert main(["run", "--codec", "zip", "--source", f"trace:{walk_trace}", "--out", str(out)]) == 1
    assert main(["run", "--codec", "dpcm", "--source", f"trace:{walk_trace}", "--rate", "500",
                 "--out", str(out)]) == 1
    assert main(["run", "--codec", "discus", "--source", f"trace:{walk_trace}",
                 "--correlation", "additive:3", "--out", str(out)]) == 1
    assert main(["run", "--codec", "dpcm", "--source", f"trace:{walk_trace}", "--samples", "99999",
                 "--out", str(out)]) == 1
    assert main(["run", "--bogus-flag"]) == 1
    assert not out.exists()
    assert "config error" in capsys.readouterr().err


def test_config_file_with_flag_override(walk_trace, tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(f"codec = dpcm\nsource = trace:{walk_trace}\nsamples = 40\nformat = json\n")
    assert main(["run", "--config", str(cfg), "--frame", "8"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["sample_count"] == 80


def test_compare_all_codecs_in_order(walk_trace, capsys):
    rc = main(["compare", "--codec", ",".join(CODECS), "--source", f"trace:{walk_trace}",
               "--samples", "200", "--format", "json"])
    rows = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert [r["codec"] for r in rows] == list(CODECS)


def test_compare_single_matches_run(walk_trace, capsys):
    args = ["--codec", "haar", "--source", f"trace:{walk_trace}", "--samples", "64", "--format", "csv"]
    main(["run", *args])
    single = capsys.readouterr().out
    main(["compare", *args])
    assert capsys.readouterr().out == single


def test_compare_reports_failed_rows(walk_trace, capsys):
    rc = main(["compare", "--codec", "dpcm,discus", "--source", f"trace:{walk_trace}",
               "--correlation", "additive:2", "--samples", "20", "--format", "table"])
    out = capsys.readouterr().out
    assert rc == 2
    assert "dpcm" in out and "FAILED" in out


def test_compare_without_configs_is_usage_error(capsys):
    assert main(["compare"]) == 1


def test_table_columns(walk_trace, capsys):
    main(["run", "--codec", "mulaw", "--source", f"trace:{walk_trace}", "--samples", "30"])
    header = capsys.readouterr().out.splitlines()[0]
    cols = [c.strip() for c in header.split("|")]
    assert cols == ["Code", "Avg Bits", "Err mu", "Err sigma", "Enc mu", "Enc sigma",
                    "Dec mu", "Dec sigma", "Energy (J)"]


@given(
    codec=st.sampled_from(CODECS),
    rate=st.floats(2, 125, allow_nan=False),
    samples=st.integers(1, 10**6),
    frame=st.integers(1, 64),
    seed=st.integers(0, 2**32),
    correlation=st.one_of(st.none(), st.sampled_from(["bitflip:1", "same-bin:8", "additive:5"])),
    fmt=st.sampled_from(["csv", "json", "table"]),
)
def test_config_render_parse_roundtrip(codec, rate, samples, frame, seed, correlation, fmt):
    cfg = ExperimentConfig(codec=codec, source="trace:x.csv", correlation=correlation, rate=rate,
                           samples=samples, frame=frame, seed=seed, format=fmt, out="runs/a")
    assert ExperimentConfig.parse(cfg.render()) == cfg
