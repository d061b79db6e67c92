import pytest

from aphisim import cli
from aphisim.cli import CSV_COLUMNS, RunRequest


GOLDEN_HEADER = (
    "t,q1,q2,q3,q4,q5,q6,qd1,qd2,qd3,qd4,qd5,qd6,"
    "qt1,qt2,qt3,qt4,qt5,qt6,T1,T2,T3,T4,T5,T6,"
    "dhat1,dhat2,dhat3,dhat4,dhat5,dhat6,h1,h2,h3,h4,h5,h6,"
    "qp_status,fc_x,fc_y,fc_z,cart_x,cart_v"
)


@pytest.fixture
def short_scenario_file(tmp_path):
    f = tmp_path / "short.toml"
    f.write_text(
        'scenario = "wall_push"\nduration = 0.2\nname = "short"\n',
        encoding="utf-8",
    )
    return f


def test_csv_header_is_stable():
    assert ",".join(CSV_COLUMNS) == GOLDEN_HEADER


def test_run_writes_csv_and_metrics(short_scenario_file, tmp_path):
    out = tmp_path / "out"
    code = cli.main(
        [
            "run",
            "--scenario",
            str(short_scenario_file),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    csv = out / "short_safety_filter.csv"
    met = out / "short_safety_filter_metrics.txt"
    assert csv.exists() and met.exists()
    lines = csv.read_text().splitlines()
    assert lines[0] == GOLDEN_HEADER
    assert len(lines) == 202  # header + 201 rows
    assert all(len(line.split(",")) == len(CSV_COLUMNS) for line in lines[1:])
    metrics_text = met.read_text()
    assert "thrust_violation_steps" in metrics_text
    assert "rms_tracking_error_1" in metrics_text


def test_run_repetitions_use_offset_seeds(short_scenario_file, tmp_path):
    out = tmp_path / "reps"
    code = cli.main(
        [
            "run",
            "--scenario",
            str(short_scenario_file),
            "--reps",
            "5",
            "--seed",
            "3",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    files = sorted(p.name for p in out.glob("*.csv"))
    assert files == [f"short_safety_filter_rep{k}.csv" for k in range(5)]
    # wind noise differs across seeds
    a = (out / files[0]).read_bytes()
    b = (out / files[1]).read_bytes()
    assert a != b


def test_run_deterministic_csv_bytes(short_scenario_file, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert (
            cli.main(
                ["run", "--scenario", str(short_scenario_file), "--out", str(out)]
            )
            == 0
        )
    assert (out1 / "short_safety_filter.csv").read_bytes() == (
        out2 / "short_safety_filter.csv"
    ).read_bytes()


def test_controller_override(short_scenario_file, tmp_path):
    out = tmp_path / "o"
    code = cli.main(
        [
            "run",
            "--scenario",
            str(short_scenario_file),
            "--controller",
            "clamp",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert (out / "short_direct_clamp.csv").exists()


def test_compare_mode(short_scenario_file, tmp_path):
    out = tmp_path / "cmp"
    code = cli.main(
        ["compare", "--scenario", str(short_scenario_file), "--out", str(out)]
    )
    assert code == 0
    for variant in ("no_filter", "direct_clamp", "safety_filter"):
        assert (out / f"short_{variant}.csv").exists()
        assert (out / f"short_{variant}_metrics.txt").exists()
    table = (out / "short_comparison.txt").read_text().splitlines()
    header = table[0].split()
    assert header == ["metric", "no_filter", "direct_clamp", "safety_filter"]
    assert any(line.startswith("thrust_violation_steps") for line in table)


def test_validate_command(short_scenario_file, tmp_path):
    assert cli.main(["validate", str(short_scenario_file)]) == 0
    bad = tmp_path / "bad.toml"
    bad.write_text("[barrier]\nt_min = 99.0\n", encoding="utf-8")
    assert cli.main(["validate", str(bad)]) == 1
    assert cli.main(["validate", str(tmp_path / "missing.toml")]) == 2


def test_out_dir_env_var(short_scenario_file, tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(target))
    code = cli.main(["run", "--scenario", str(short_scenario_file)])
    assert code == 0
    assert (target / "short_safety_filter.csv").exists()


def test_run_request_validation():
    with pytest.raises(ValueError):
        RunRequest(scenario_path="x", repetitions=0)


def test_run_bad_scenario_exits_2(tmp_path):
    assert (
        cli.main(["run", "--scenario", str(tmp_path / "nope.toml"), "--out", str(tmp_path)])
        == 2
    )


def test_run_preset_name_accepted(tmp_path):
    out = tmp_path / "preset"
    code = cli.main(
        [
            "run",
            "--scenario",
            "plug_extract",
            "--duration",
            "0.1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert (out / "plug_extract_safety_filter.csv").exists()
