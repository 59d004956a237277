"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed together at the
end of the session (see conftest.py) and also immediately with ``-s``.
"""

import math

import numpy as np
import pytest
from scipy.stats import linregress

from anderson_waveguides.experiment import ExperimentConfig, run_experiment, wigner_pipeline
from anderson_waveguides.lattice import lattice, ordered_lattice_row, propagate_green
from anderson_waveguides.observables import g2, participation_number, profile_distance
from anderson_waveguides.phase_space import GridSpec, pnd, wigner_grid, wigner_oracle, wigner_values
from anderson_waveguides.states import NAMED_TRUNCATED, FockVector, ccs_coefficients, fock_vector, moments, preset

ACCEPTANCE_LOG: list[str] = []

SCAN_DELTAS = (0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 8.0)
G2_DELTAS = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
Z_GRID = tuple(round(0.5 * k, 10) for k in range(41))  # 0, 0.5, ..., 20


def report(number: int, title: str, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}: {detail}"
    ACCEPTANCE_LOG.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def scan():
    """R = 1000 ensembles on the default lattice for every disorder strength used below."""
    cfg = ExperimentConfig(name="acceptance", delta_over_c=SCAN_DELTAS, z_checkpoints=Z_GRID,
                           realizations=1000, states=("cs", "ccs1"))
    return run_experiment(cfg, write=False).ensembles


def test_criterion_01_moment_fidelity():
    rbs = moments(preset("rbs"))
    ccs2 = moments(preset("ccs2"))
    ok_rbs = (rbs.mean_n, rbs.mean_n2fact) == (10, 95)
    ok_ccs = abs(ccs2.mean_n2fact - 94.78) <= 0.01
    report(1, "moment fidelity", ok_rbs and ok_ccs,
           f"RBS(0,20) = ({rbs.mean_n:g}, {rbs.mean_n2fact:g}); "
           f"CCS(1.916,11) <a^dag^2 a^2> = {ccs2.mean_n2fact:.6f} (target 94.78 +- 0.01)")


def test_criterion_02_input_energy():
    means = {name: moments(preset(name)).mean_n for name in NAMED_TRUNCATED}
    worst = max(abs(m - 10) for m in means.values())
    report(2, "input energy", worst <= 0.1,
           ", ".join(f"{k}={v:.4f}" for k, v in means.items()) + f" (max |dev| {worst:.4f})")


def test_criterion_03_ordered_lattice():
    row = propagate_green(lattice(np.zeros(101), [5.0], dz=0.001)).rows[0]
    err = float(np.max(np.abs(row - ordered_lattice_row(101, 51, 1.0, 5.0))))
    report(3, "ordered-lattice oracle", err < 1e-4, f"max |G - Bessel| at z=5 = {err:.3e}")


def test_criterion_04_norm_conservation():
    cfg = ExperimentConfig(delta_over_c=(0.0, 1.0, 5.0), z_checkpoints=(20.0,), realizations=100,
                           states=("cs",))
    ens = run_experiment(cfg, write=False).ensembles
    worst = max(s.max_norm_deviation for s in ens.values())
    report(4, "norm conservation", worst < 1e-8,
           f"max |sum|G|^2 - 1| over 300 realizations at z=20 = {worst:.3e}")


def test_criterion_05_localization_overlap(scan):
    i5, i20 = Z_GRID.index(5.0), Z_GRID.index(20.0)
    dist = {d: profile_distance(scan[d], i5, i20) for d in (0.0, 1.5, 5.0)}
    ok = dist[1.5] < 0.05 and dist[5.0] < 0.05 and dist[0.0] > 0.2
    report(5, "localization overlap", ok,
           f"L1(z=5, z=20): D/C=1.5 -> {dist[1.5]:.4f}, D/C=5 -> {dist[5.0]:.4f} (need < 0.05); "
           f"D/C=0 -> {dist[0.0]:.4f} (need > 0.2)")


def test_criterion_06_participation(scan):
    zs = np.array(Z_GRID)
    window = (zs >= 2.0) & (zs <= 20.0)
    P0 = np.array([participation_number(scan[0.0], k) for k in range(zs.size)])[window]
    r2 = linregress(zs[window], P0).rvalue ** 2
    P3 = np.array([participation_number(scan[3.0], k) for k in range(zs.size)])[window]
    quarters = np.array_split(P3, 4)
    third, last = quarters[2].mean(), quarters[3].mean()
    change = abs(last - third) / third
    report(6, "participation behavior", r2 > 0.99 and change < 0.05,
           f"D/C=0 linear fit R^2 = {r2:.5f}; D/C=3 last vs third quarter = {change:.4f}")


def test_criterion_07_g2_structure(scan):
    i5, i20 = Z_GRID.index(5.0), Z_GRID.index(20.0)
    cs, ccs1 = moments(preset("cs")), moments(preset("ccs1"))
    curve = [g2(scan[d], cs, 51, i5).value for d in G2_DELTAS]
    peak = int(np.argmax(curve))
    interior = 0 < peak < len(G2_DELTAS) - 1
    near_one = abs(peak - G2_DELTAS.index(1.0)) <= 1
    late = g2(scan[8.0], ccs1, 51, i20)
    ok = interior and near_one and late.value < 1
    report(7, "g2 structure", ok,
           "z=5 coherent g2 " + ", ".join(f"{d:g}:{v:.4f}" for d, v in zip(G2_DELTAS, curve))
           + f" (max at D/C={G2_DELTAS[peak]:g}); z=20 CCS1 D/C=8 g2 = {late.value:.4f}"
           + f" +- {late.stderr:.4f}")


def test_criterion_08_wigner_oracle():
    states = [FockVector.number_state(0), FockVector.number_state(1), FockVector.normalized([0.6, 0.8j]),
              FockVector.normalized([1, 0, 1j]), ccs_coefficients(0.0, 3),
              FockVector.normalized([0.5, 0.5j, 0.5, -0.5j, 0.1])]
    xs = np.linspace(-2, 2, 5)
    X, Y = np.meshgrid(xs, xs)
    worst = 0.0
    for vec in states:
        for g in (1.0, 0.6 + 0.3j, 0.0):
            worst = max(worst, float(np.max(np.abs(wigner_values(vec, g, X, Y) - wigner_oracle(vec, g, X, Y)))))
    report(8, "Wigner oracle equivalence", worst < 1e-4,
           f"{len(states)} states with N<=4, 3 gains, 25 points: max diff {worst:.3e}")


@pytest.fixture(scope="module")
def pnd_runs():
    cfg = ExperimentConfig(delta_over_c=(0.0, 1.0, 7.0), z_checkpoints=(20.0,), realizations=100,
                           states=("ccs1",), archive="injection")
    archive = run_experiment(cfg, write=False).archive
    return {d: wigner_pipeline(archive, "ccs1", d, 20.0) for d in cfg.delta_over_c}


def test_criterion_09_wigner_normalization_and_pnd(pnd_runs):
    integrals, bin_errors = [], []
    for name in NAMED_TRUNCATED:
        vec = fock_vector(preset(name))
        grid = wigner_grid(vec, [1.0], GridSpec.covering(vec.truncation))
        integrals.append(grid.integral())
        res = pnd(grid, vec.truncation)
        bin_errors.append(float(np.max(np.abs(res.probabilities - vec.probabilities()))))
        if name == "ccs1":
            p10 = res.probabilities[10]
    integrals += [out.grid.integral() for out in pnd_runs.values()]
    worst_int = max(abs(v - 1) for v in integrals)
    ok = worst_int <= 0.02 and max(bin_errors) <= 0.02 and p10 > 0.99
    report(9, "Wigner normalization and PND", ok,
           f"max |integral - 1| over {len(integrals)} grids = {worst_int:.2e}; "
           f"identity PND max bin error = {max(bin_errors):.2e}; CCS1 P(10) = {p10:.5f}")


def test_criterion_10_disorder_preserves_pnd(pnd_runs):
    target = fock_vector(preset("ccs1")).probabilities()
    dist = {d: float(np.sum(np.abs(out.pnd.probabilities - target))) for d, out in pnd_runs.items()}
    ok = dist[7.0] < dist[1.0] < dist[0.0]
    report(10, "disorder preserves PND", ok,
           f"L1(PND_out, PND_in) at z=20: D/C=0 -> {dist[0.0]:.4f}, 1 -> {dist[1.0]:.4f}, 7 -> {dist[7.0]:.4f}")


def test_criterion_11_determinism(tmp_path):
    cfg = ExperimentConfig(name="determinism", output_dir=str(tmp_path))
    first = {p.name: p.read_bytes() for p in run_experiment(cfg).files if p.suffix == ".csv"}
    second = {p.name: p.read_bytes() for p in run_experiment(cfg).files if p.suffix == ".csv"}
    same = first == second
    report(11, "determinism", same and len(first) > 0,
           f"{len(first)} CSV files from two default-config runs (R=1000) byte-identical: {same}")
