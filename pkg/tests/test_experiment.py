import json

import numpy as np
import pytest

from anderson_waveguides.experiment import (
    OUTPUT_ENV,
    ArchiveError,
    ConfigError,
    ExperimentConfig,
    InvariantViolation,
    RealizationArchive,
    read_wigner_csv,
    run_ensemble,
    run_experiment,
    wigner_pipeline,
    write_pnd_csv,
    write_wigner_csv,
    write_wigner_matrix,
)
from anderson_waveguides.observables import g2
from anderson_waveguides.phase_space import GridSpec, pnd, wigner_grid
from anderson_waveguides.states import fock_vector, moments, preset

SMALL = dict(guide_count=21, injection_index=11, dz=0.01, z_checkpoints=(0.0, 2.0), realizations=4,
             delta_over_c=(0.0, 1.0), states=("ccs1", "cs"))


def small(tmp_path, **kw):
    return ExperimentConfig(**(SMALL | dict(output_dir=str(tmp_path)) | kw))


def test_trivial_run(tmp_path):
    cfg = small(tmp_path, delta_over_c=(0.0,), z_checkpoints=(0.0,), realizations=1, states=("ccs:0,10",))
    res = run_experiment(cfg)
    stats = res.ensembles[0.0]
    profile = stats.mean_abs2[0] * moments(cfg.state_specs()[0]).mean_n
    assert profile[10] == 10.0 and np.count_nonzero(profile) == 1
    assert all(p.exists() for p in res.files)


def test_ordered_ensemble_has_no_fluctuations(tmp_path):
    stats = run_ensemble(small(tmp_path, realizations=50), 0.0)
    assert np.all(stats.m2_abs2 == 0) and np.all(stats.m2_abs4 == 0)
    assert np.array_equal(stats.mean_abs4, stats.mean_abs2**2)


def test_config_round_trip(tmp_path):
    cfg = small(tmp_path, archive="injection", gnuplot=True)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_file(path) == cfg
    assert ExperimentConfig.from_file(path, realizations=9).realizations == 9


@pytest.mark.parametrize("bad", [dict(realizations=0), dict(delta_over_c=(-1.0,)), dict(archive="x"),
                                 dict(states=("nope:1",)), dict(injection_index=30), dict(workers=0),
                                 dict(delta_over_c=(1.0, 1.0))])
def test_invalid_config(tmp_path, bad):
    with pytest.raises(ConfigError):
        small(tmp_path, **bad)


def test_config_file_errors(tmp_path):
    (tmp_path / "a.json").write_text('{"realizations": 5, "colour": 1}')
    with pytest.raises(ConfigError, match="colour"):
        ExperimentConfig.from_file(tmp_path / "a.json")
    (tmp_path / "b.json").write_text('{"format_version": 99}')
    with pytest.raises(ConfigError, match="format_version"):
        ExperimentConfig.from_file(tmp_path / "b.json")
    (tmp_path / "c.json").write_text("realizations = 5")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(tmp_path / "c.json")


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    cfg = ExperimentConfig(**SMALL)
    assert cfg.resolved_output_dir() == tmp_path / "env"


def test_determinism_bytes(tmp_path):
    cfg = small(tmp_path, archive="full", gnuplot=True)
    first = {p.name: p.read_bytes() for p in run_experiment(cfg).files}
    second = {p.name: p.read_bytes() for p in run_experiment(cfg).files}
    assert first == second


def test_workers_do_not_change_results(tmp_path):
    cfg = small(tmp_path, realizations=6)
    serial = run_ensemble(cfg, 1.0)
    parallel = run_ensemble(small(tmp_path, realizations=6, workers=2), 1.0)
    assert np.array_equal(serial.mean_abs2, parallel.mean_abs2)
    assert np.array_equal(serial.mean_abs4, parallel.mean_abs4)


def test_delta_order_does_not_matter(tmp_path):
    a = run_experiment(small(tmp_path, delta_over_c=(0.0, 1.0)), write=False)
    b = run_experiment(small(tmp_path, delta_over_c=(1.0, 0.0)), write=False)
    assert np.array_equal(a.ensembles[1.0].mean_abs2, b.ensembles[1.0].mean_abs2)


def test_state_reuse_matches_single_state_runs(tmp_path):
    shared = run_experiment(small(tmp_path, states=("ccs1", "rbs", "ts")), write=False)
    for name in ("rbs", "ts"):
        alone = run_experiment(small(tmp_path, states=(name,)), write=False)
        m = moments(preset(name))
        assert g2(shared.ensembles[1.0], m, 11, 1) == g2(alone.ensembles[1.0], m, 11, 1)


def test_no_signal_written(tmp_path):
    res = run_experiment(small(tmp_path))
    summary = (tmp_path / "experiment_summary.csv").read_text()
    assert "no-signal" in summary  # off-injection guides at z = 0
    assert res.files[0].name == "experiment_summary.csv"


def test_archive_round_trip(tmp_path):
    res = run_experiment(small(tmp_path, archive="full"))
    loaded = RealizationArchive.load(tmp_path / "experiment_archive.txt")
    assert loaded == res.archive
    assert len(loaded.records) == 2 * 4 * 2
    inj = RealizationArchive.load(res.archive.save(tmp_path / "again.txt"))
    assert inj == res.archive


def test_archive_injection_samples(tmp_path):
    res = run_experiment(small(tmp_path, archive="injection"), write=False)
    samples = res.archive.injection_samples(1.0, 2.0)
    assert samples.shape == (4,)
    assert np.all(np.abs(samples) <= 1)
    with pytest.raises(ArchiveError):
        res.archive.injection_samples(5.0, 2.0)


def test_archive_rejects_garbage(tmp_path):
    (tmp_path / "x.txt").write_text("hello\n")
    with pytest.raises(ArchiveError):
        RealizationArchive.load(tmp_path / "x.txt")


def test_invariant_violation_on_norm_drift(tmp_path, monkeypatch):
    import anderson_waveguides.experiment as exp

    monkeypatch.setattr(exp, "NORM_TOL", -1.0)
    with pytest.raises(InvariantViolation):
        exp.run_ensemble(small(tmp_path), 1.0)


def test_wigner_pipeline_identity(tmp_path):
    res = run_experiment(small(tmp_path, delta_over_c=(0.0,), z_checkpoints=(0.0,), realizations=1,
                               archive="injection"), write=False)
    vec = fock_vector(preset("ccs1"))
    out = wigner_pipeline(res.archive, "ccs1", 0.0, 0.0)
    assert np.allclose(out.grid.values, wigner_grid(vec, [1.0]).values, atol=1e-12)
    assert out.pnd.probabilities[10] > 0.99


def test_wigner_files_round_trip(tmp_path):
    vec = fock_vector(preset("ccs1"))
    grid = wigner_grid(vec, [0.6 + 0.2j, -0.3j], GridSpec.covering(vec.truncation, step=0.2))
    back = read_wigner_csv(write_wigner_csv(tmp_path / "w.csv", grid))
    assert np.array_equal(back.values, grid.values)
    assert back.realization_count == 2 and back.truncation == 10
    assert np.array_equal(pnd(back, 10).raw, pnd(grid, 10).raw)
    matrix = np.loadtxt(write_wigner_matrix(tmp_path / "w.dat", grid))
    assert np.array_equal(matrix[1:, 1:], grid.values)
    lines = write_pnd_csv(tmp_path / "p.csv", pnd(grid, 10)).read_text().splitlines()
    assert lines[0] == "n,P_raw,P_normalized" and len(lines) == 12
