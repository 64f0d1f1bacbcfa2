import json

import pytest

import main
from config import ARTIFACT_VERSION
from helpers.exporters import header_line, output_file
from models.experiment import Command, ExperimentConfig


def last_error(capsys) -> dict:
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_no_subcommand_prints_help(capsys):
    assert main.main([]) == 2
    assert "hyplab" in capsys.readouterr().out


def test_density_writes_a_profile(tmp_path):
    code = main.main(
        ["density", "--set", "multiples", "--step", "3", "--horizons", "9,99", "--horizon", "100", "--output", str(tmp_path)]
    )
    assert code == 0
    lines = (tmp_path / "density-multiples-upper.csv").read_text().splitlines()
    assert lines[0].startswith(f"# hyplab {ARTIFACT_VERSION} config=")
    assert lines[1] == '"functional_tag","N","value","running_sup","running_inf"'
    assert len(lines) == 4


def test_density_of_a_construction_set(tmp_path):
    code = main.main(
        ["density", "--set", "bg-A", "--p", "1", "--functional", "lower", "--horizons", "99,999", "--horizon", "1000", "--output", str(tmp_path)]
    )
    assert code == 0
    assert (tmp_path / "density-bg-a-lower.csv").exists()


def test_construct_writes_sets_and_verification(tmp_path):
    assert main.main(["construct", "bg", "--horizon", "10000", "--output", str(tmp_path)]) == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"construct-bg-weights.csv", "construct-bg-a.csv", "construct-bg-verification.json"} <= names
    payload = json.loads((tmp_path / "construct-bg-verification.json").read_text())
    assert payload["hyplab"] == ARTIFACT_VERSION
    assert payload["config"]["command"] == "construct"
    assert payload["result"]["construction"] == "bg"


def test_check_fails_with_a_witness(tmp_path):
    code = main.main(
        ["check", "--criterion", "shift-general", "--construction", "bg", "--M", "1", "--horizon", "1000", "--output", str(tmp_path)]
    )
    assert code == 1
    payload = json.loads((tmp_path / "check-bg-shift-general.json").read_text())
    assert payload["result"]["verdict"] == "fail"
    assert payload["result"]["witnesses"][0]["condition"] == "ii"


def test_check_passes_with_default_thresholds(tmp_path):
    code = main.main(["check", "--criterion", "shift-upper", "--construction", "bmpp", "--k", "1", "--p", "1", "--output", str(tmp_path)])
    assert code == 0


def test_unknown_criterion_is_a_precondition_error(tmp_path, capsys):
    assert main.main(["check", "--criterion", "shift-uper", "--output", str(tmp_path)]) == 2
    error = last_error(capsys)
    assert error["error"] == "PreconditionError"
    assert "shift-upper" in error["message"]


def test_invalid_parameters_exit_with_2(tmp_path, capsys):
    assert main.main(["check", "--M", "-1", "--output", str(tmp_path)]) == 2
    assert last_error(capsys)["error"] == "ValidationError"


def test_internal_errors_exit_with_3(tmp_path, capsys, monkeypatch):
    def boom(config):
        raise RuntimeError("boom")

    monkeypatch.setattr(main, "run", boom)
    assert main.main(["orbit", "--vector", "1:1", "--output", str(tmp_path)]) == 3
    assert last_error(capsys) == {"error": "RuntimeError", "message": "boom", "witness": {}}


def test_orbit_visits(tmp_path):
    code = main.main(
        ["orbit", "--vector", "3:1", "--center", "0:1", "--radius", "1/2", "--horizon", "20", "--output", str(tmp_path)]
    )
    assert code == 0
    lines = (tmp_path / "orbit-visits.csv").read_text().splitlines()
    assert lines[1:] == ["n", "3"]


def test_hvector_passes_on_the_block_shift(tmp_path):
    assert main.main(["hvector", "--construction", "bg", "--p-max", "2", "--horizon", "1000", "--output", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "hvector-bg-orbit.json").read_text())
    assert payload["result"]["verdict"] == "pass"
    assert payload["result"]["parameters"]["slack"] == "1/4"


def test_config_file_wins_over_flags(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps({"command": "density", "parameters": {"set_name": "multiples", "step": 5, "horizon": 100, "horizons": [99]}})
    )
    out = tmp_path / "out"
    assert main.main(["density", "--config", str(path), "--step", "3", "--output", str(out)]) == 0
    lines = (out / "density-multiples-upper.csv").read_text().splitlines()
    assert '"step": 5' in lines[0]
    assert lines[2].split(",")[2] == "0.2"


def test_config_file_for_another_command(tmp_path, capsys):
    path = tmp_path / "run.yaml"
    path.write_text("command: orbit\nparameters:\n  vector: {1: 1}\n")
    assert main.main(["density", "--config", str(path), "--output", str(tmp_path)]) == 2
    assert last_error(capsys)["error"] == "PreconditionError"


def test_output_defaults_to_the_output_dir(output_dir, monkeypatch):
    import helpers.exporters as exporters

    monkeypatch.setattr(exporters, "OUTPUT_DIR", output_dir)
    config = ExperimentConfig(command=Command.ORBIT, parameters={"vector": {1: 1}})
    path = output_file(config, "My Set", ".csv")
    assert path == output_dir / "orbit-my-set.csv"
    assert path.parent.is_dir()
    assert header_line(config).startswith(f"hyplab {ARTIFACT_VERSION} config={{")


@pytest.mark.parametrize("name", ["bmpp", "br", "vfhc"])
def test_construct_every_registered_construction(tmp_path, name):
    code = main.main(["construct", name, "--horizon", "1000", "--output", str(tmp_path)])
    assert code in (0, 1)
    payload = json.loads((tmp_path / f"construct-{name}-verification.json").read_text())
    assert payload["result"]["construction"] == name
