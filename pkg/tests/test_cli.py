import json

import pytest

import cli.command
from cli.schema import SpectrumReport, VerificationReport
from data_manager import dumps_report, save_json
from errors import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, ConvergenceError
from main import main
from presets import PRESET_NAMES
from report_manager import SECTOR_COLUMNS, STATE_COLUMNS

DOUBLET = ["--preset", "tavis_cummings", "--j", "1/2", "--mu", "1/2", "--n", "0"]


def run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_preset_list(capsys):
    code, out = run(capsys, ["preset", "list"])
    assert code == EXIT_OK
    listing = json.loads(out)
    assert set(listing) == set(PRESET_NAMES)
    assert listing["lmg"]["params"] == {"g": 0.3, "g_prime": 1.0}


def test_sectors_json(capsys):
    code, out = run(capsys, ["sectors", "--preset", "tavis_cummings", "--j", "1/2", "--max-bosons", "0"])
    assert code == EXIT_OK
    sectors = json.loads(out)["sectors"]
    assert [s["kappa"] for s in sectors] == ["1/4", "3/4"]
    assert [s["dim"] for s in sectors] == [1, 2]


def test_sectors_csv(capsys):
    code, out = run(capsys, ["sectors", "--preset", "lmg", "--j", "2", "--format", "csv"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == ",".join(SECTOR_COLUMNS)
    assert len(lines) == 3


def test_spectrum_json_round_trip(capsys):
    code, out = run(capsys, ["spectrum", *DOUBLET])
    assert code == EXIT_OK
    report = SpectrumReport.model_validate_json(out)
    assert [s.E for s in report.sectors[0].states] == pytest.approx([0.4, 0.6])
    assert report.sectors[0].labels["kappa"] == "3/4"
    assert dumps_report(report) + "\n" == out


def test_spectrum_csv(capsys):
    code, out = run(capsys, ["spectrum", *DOUBLET, "--format", "csv"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == ",".join(SECTOR_COLUMNS + STATE_COLUMNS)
    assert len(lines) == 3


def test_spectrum_refine(capsys):
    code, out = run(capsys, ["spectrum", "--preset", "tavis_cummings", "--j", "1", "--mu", "1", "--n", "2", "--refine"])
    assert code == EXIT_OK
    states = json.loads(out)["sectors"][0]["states"]
    assert len(states) == 3
    assert all(s["refined"] for s in states)


def test_output_file(capsys, tmp_path):
    path = tmp_path / "spectrum.json"
    code, out = run(capsys, ["spectrum", *DOUBLET, "--output", str(path)])
    assert code == EXIT_OK
    assert out == ""
    report = SpectrumReport.model_validate_json(path.read_text(encoding="utf-8"))
    assert report.sectors[0].states[1].E == pytest.approx(0.6)


def test_roots_command(capsys):
    code, out = run(capsys, ["roots", *DOUBLET, "--index", "1"])
    assert code == EXIT_OK
    states = json.loads(out)["sectors"][0]["states"]
    assert len(states) == 1
    assert states[0]["E"] == pytest.approx(0.6)


def test_config_file_and_overrides(capsys, tmp_path):
    path = tmp_path / "run.json"
    save_json(
        path,
        {
            "preset": {"name": "tavis_cummings", "params": {"g": 0.2}},
            "j": "1/2",
            "sector": {"mu": "1/2", "n": [0]},
        },
    )
    code, out = run(capsys, ["spectrum", "--config", str(path)])
    assert code == EXIT_OK
    assert [s["E"] for s in json.loads(out)["sectors"][0]["states"]] == pytest.approx([0.3, 0.7])

    code, out = run(capsys, ["spectrum", "--config", str(path), "--param", "g=0.3"])
    assert code == EXIT_OK
    assert [s["E"] for s in json.loads(out)["sectors"][0]["states"]] == pytest.approx([0.2, 0.8])


def test_inline_model(capsys, tmp_path):
    path = tmp_path / "model.json"
    save_json(path, {"model": {"M": 0, "r": 1, "s": 2, "g_prime": 1.0, "g": 0.5}, "j": 1})
    code, out = run(capsys, ["sectors", "--config", str(path)])
    assert code == EXIT_OK
    assert sum(s["dim"] for s in json.loads(out)["sectors"]) == 3

    # 命令行给出预设时忽略配置文件中的 model
    code, _ = run(capsys, ["sectors", "--config", str(path), "--preset", "lmg"])
    assert code == EXIT_OK


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["spectrum", "--preset", "lmg"],
        ["sectors", "--j", "1"],
        ["sectors", "--j", "1", "--param", "g=1"],
        ["sectors", "--preset", "lmg", "--j", "1", "--n", "0"],
        ["sectors", "--preset", "lmg", "--j", "abc"],
        ["sectors", "--preset", "lmg", "--j", "1", "--param", "w=2"],
        ["sectors", "--preset", "lmg", "--j", "1", "--param", "g"],
        ["sectors", "--config", "missing.json", "--j", "1"],
        ["roots", "--preset", "lmg", "--j", "1"],
        ["roots", *DOUBLET, "--index", "5"],
        ["spectrum", "--preset", "tavis_cummings", "--j", "1/2", "--mu", "3/2", "--n", "0"],
    ],
)
def test_usage_errors(capsys, argv):
    code, out = run(capsys, argv)
    assert code == EXIT_USAGE
    assert out == ""


def test_model_and_preset_conflict(capsys, tmp_path):
    path = tmp_path / "both.json"
    save_json(path, {"model": {"M": 0, "r": 1, "s": 1}, "preset": {"name": "lmg"}, "j": 1})
    code, _ = run(capsys, ["sectors", "--config", str(path)])
    assert code == EXIT_USAGE


def test_numerical_failure(capsys, monkeypatch):
    def fail(*args, **kwargs):
        raise ConvergenceError("Jacobi 未收敛")

    monkeypatch.setattr(cli.command, "solve_sector", fail)
    code, out = run(capsys, ["spectrum", *DOUBLET])
    assert code == EXIT_NUMERICAL
    assert out == ""


@pytest.mark.parametrize("passed, expected", [(True, EXIT_OK), (False, EXIT_VERIFY_FAILED)])
def test_verify_exit_codes(capsys, monkeypatch, passed, expected):
    def fake(config, hook=None, **options):
        return VerificationReport(passed=passed)

    monkeypatch.setattr(cli.command, "run_verification", fake)
    code, out = run(capsys, ["verify", "--preset", "lmg"])
    assert code == expected
    assert json.loads(out)["passed"] is passed


def test_spectrum_with_multiple_roots(capsys, tmp_path):
    path = tmp_path / "rotated.json"
    save_json(path, {"model": {"M": 0, "r": 1, "s": 1, "g_prime": 1.0, "g": 0.5}, "j": 4})
    code, out = run(capsys, ["spectrum", "--config", str(path)])
    assert code == EXIT_OK
    states = json.loads(out)["sectors"][0]["states"]
    assert len(states) == 9
    assert all(s["degenerate_roots"] and s["residual"] is None for s in states)
    assert all(len(s["roots"]) == 8 for s in states)
