import json

import numpy as np
import pytest

from anderson_waveguides.cli import main

RUN = ["run", "--guides", "21", "--injection", "11", "--dz", "0.01", "--z", "0,2", "--realizations", "3",
       "--delta", "0,1", "--states", "ccs1;rbs:0,20"]


def test_run_writes_outputs(tmp_path, capsys):
    assert main(RUN + ["--out", str(tmp_path), "--archive", "injection", "--name", "t"]) == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"t_summary.csv", "t_injection.csv", "t_participation.csv", "t_archive.txt",
            "t_config.json", "t_ensemble_1_2.csv"} <= names
    assert "t_summary.csv" in capsys.readouterr().out


def test_config_file_with_flag_override(tmp_path):
    cfg = {"guide_count": 21, "injection_index": 11, "dz": 0.01, "z_checkpoints": [1.0],
           "realizations": 2, "delta_over_c": [0.5], "states": ["cs"], "name": "fromfile"}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert main(["run", "--config", str(tmp_path / "c.json"), "--out", str(tmp_path),
                 "--realizations", "5"]) == 0
    written = json.loads((tmp_path / "fromfile_config.json").read_text())
    assert written["realizations"] == 5 and written["states"] == ["cs"]


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("ANDERSON_WAVEGUIDES_OUT", str(tmp_path / "env"))
    assert main(RUN + ["--name", "e"]) == 0
    assert (tmp_path / "env" / "e_summary.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    assert main(RUN + ["--out", str(tmp_path), "--realizations", "0"]) == 1
    assert "realizations" in capsys.readouterr().err
    assert main(RUN + ["--out", str(tmp_path), "--states", "bogus:1"]) == 1


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(RUN + ["--out", str(blocker / "sub")]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2


def test_wigner_and_pnd_commands(tmp_path, capsys):
    assert main(RUN + ["--out", str(tmp_path), "--archive", "injection", "--name", "w"]) == 0
    assert main(["wigner", "--archive", str(tmp_path / "w_archive.txt"), "--state", "ccs1",
                 "--delta", "1", "--z", "2", "--step", "0.2", "--out", str(tmp_path), "--name", "ccs1"]) == 0
    grid = tmp_path / "ccs1_wigner.csv"
    assert grid.exists() and (tmp_path / "ccs1_wigner.dat").exists()
    direct = np.loadtxt(tmp_path / "ccs1_pnd.csv", delimiter=",", skiprows=1)
    assert main(["pnd", "--grid", str(grid), "--n-max", "10", "--out", str(tmp_path / "again.csv")]) == 0
    again = np.loadtxt(tmp_path / "again.csv", delimiter=",", skiprows=1)
    assert np.array_equal(direct, again)
    assert abs(direct[:, 2].sum() - 1) < 1e-12


def test_wigner_missing_capture(tmp_path):
    assert main(RUN + ["--out", str(tmp_path), "--archive", "injection", "--name", "w"]) == 0
    code = main(["wigner", "--archive", str(tmp_path / "w_archive.txt"), "--state", "ccs1",
                 "--delta", "7", "--z", "2", "--out", str(tmp_path)])
    assert code == 1


def test_wigner_rejects_mixed_state(tmp_path):
    assert main(RUN + ["--out", str(tmp_path), "--archive", "injection", "--name", "w"]) == 0
    assert main(["wigner", "--archive", str(tmp_path / "w_archive.txt"), "--state", "ts",
                 "--delta", "1", "--z", "2", "--out", str(tmp_path)]) == 1


def test_oracle_check(capsys):
    assert main(["oracle-check"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 9


def test_bad_subcommand():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
