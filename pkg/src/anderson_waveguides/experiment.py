"""Ensemble experiments: configuration, execution, archives and CSV output."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .disorder import DisorderSpec, ensemble_seed, sample_betas
from .lattice import LatticeConfig, propagate_green
from .observables import (
    EnsembleStats,
    accumulate,
    g2,
    intensity_variance,
    participation_number,
)
from .phase_space import GridSpec, PndResult, WignerGrid, pnd, wigner_grid
from .states import StateSpec, moments, parse_state

log = logging.getLogger(__name__)

CONFIG_FORMAT_VERSION = 1
ARCHIVE_FORMAT_VERSION = 1
OUTPUT_ENV = "ANDERSON_WAVEGUIDES_OUT"
NORM_TOL = 1e-8
NO_SIGNAL = "no-signal"


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


class ArchiveError(LookupError):
    pass


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _token(v: float) -> str:
    return format(float(v), "g")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    guide_count: int = 101
    injection_index: int = 51
    coupling: float = 1.0
    dz: float = 0.001
    delta_over_c: tuple[float, ...] = (0.0, 1.0, 5.0)
    z_checkpoints: tuple[float, ...] = (5.0, 20.0)
    realizations: int = 1000
    master_seed: int = 20210101
    states: tuple[str, ...] = ("ccs1", "ccs2", "ps1", "ps2", "rbs", "ts", "cs", "ss")
    output_dir: str | None = None
    capture_cross: bool = False
    archive: str = "none"  # none | injection | full
    write_ensemble: bool = True
    gnuplot: bool = False
    workers: int = 1

    def __post_init__(self):
        for key in ("delta_over_c", "z_checkpoints", "states"):
            value = getattr(self, key)
            if isinstance(value, (str, int, float)):
                value = (value,)
            object.__setattr__(self, key, tuple(value))
        object.__setattr__(self, "delta_over_c", tuple(float(d) for d in self.delta_over_c))
        object.__setattr__(self, "z_checkpoints", tuple(float(z) for z in self.z_checkpoints))
        if self.realizations < 1:
            raise ConfigError("realizations: must be >= 1")
        if not self.delta_over_c or any(not d >= 0 for d in self.delta_over_c):
            raise ConfigError("delta_over_c: values must be nonnegative")
        if len(set(self.delta_over_c)) != len(self.delta_over_c):
            raise ConfigError("delta_over_c: duplicate values")
        if self.archive not in ("none", "injection", "full"):
            raise ConfigError("archive: expected none, injection or full")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed: must fit in 64 unsigned bits")
        try:
            self.lattice(np.zeros(self.guide_count))
        except ValueError as exc:
            raise ConfigError(f"lattice: {exc}") from exc
        for s in self.states:
            try:
                parse_state(s)
            except ValueError as exc:
                raise ConfigError(f"states: {exc}") from exc

    def lattice(self, betas) -> LatticeConfig:
        return LatticeConfig(self.guide_count, self.injection_index, self.coupling, self.dz,
                             self.z_checkpoints, betas)

    def state_specs(self) -> list[StateSpec]:
        return [parse_state(s) for s in self.states]

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir or os.environ.get(OUTPUT_ENV) or "results")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d = {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
        d["format_version"] = CONFIG_FORMAT_VERSION
        return d

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "ExperimentConfig":
        data = dict(data)
        version = data.pop("format_version", CONFIG_FORMAT_VERSION)
        if version != CONFIG_FORMAT_VERSION:
            raise ConfigError(f"format_version: unsupported value {version!r}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown config key")
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object of key-value pairs")
        return cls.from_dict(data, **overrides)


@dataclass
class ArchiveRecord:
    realization_index: int
    delta_over_c: float
    z: float
    values: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, ArchiveRecord):
            return NotImplemented
        return (self.realization_index == other.realization_index
                and self.delta_over_c == other.delta_over_c and self.z == other.z
                and np.array_equal(self.values, other.values))


@dataclass
class RealizationArchive:
    header: dict
    records: list[ArchiveRecord] = field(default_factory=list)

    @property
    def capture(self) -> str:
        return self.header["capture"]

    def injection_samples(self, delta_over_c: float, z: float) -> np.ndarray:
        col = 0 if self.capture == "injection" else self.header["config"]["injection_index"] - 1
        picked = [r.values[col] for r in self.records
                  if r.delta_over_c == float(delta_over_c) and r.z == float(z)]
        if not picked:
            raise ArchiveError(f"archive has no records for delta_over_C={delta_over_c}, z={z}")
        return np.array(picked, dtype=np.complex128)

    def save(self, path) -> Path:
        path = Path(path)
        buf = io.StringIO()
        buf.write("# anderson-waveguides realization archive\n")
        buf.write("# " + json.dumps(self.header, sort_keys=True) + "\n")
        buf.write("realization_index,delta_over_C,z,re/im pairs\n")
        for r in self.records:
            parts = [str(r.realization_index), fmt(r.delta_over_c), fmt(r.z)]
            for v in r.values:
                parts.append(fmt(v.real))
                parts.append(fmt(v.imag))
            buf.write(",".join(parts) + "\n")
        path.write_text(buf.getvalue())
        return path

    @classmethod
    def load(cls, path) -> "RealizationArchive":
        lines = Path(path).read_text().splitlines()
        if len(lines) < 3 or not lines[1].startswith("# "):
            raise ArchiveError(f"{path}: not a realization archive")
        header = json.loads(lines[1][2:])
        if header.get("format_version") != ARCHIVE_FORMAT_VERSION:
            raise ArchiveError(f"{path}: unsupported archive version")
        records = []
        for line in lines[3:]:
            parts = line.split(",")
            nums = np.array([float(p) for p in parts[3:]])
            records.append(ArchiveRecord(int(parts[0]), float(parts[1]), float(parts[2]),
                                         nums[0::2] + 1j * nums[1::2]))
        return cls(header, records)

    def __eq__(self, other):
        if not isinstance(other, RealizationArchive):
            return NotImplemented
        return self.header == other.header and self.records == other.records


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    ensembles: dict[float, EnsembleStats]
    archive: RealizationArchive | None = None
    files: list[Path] = field(default_factory=list)


def _realization(args):
    config, delta, seed, index = args
    betas = sample_betas(DisorderSpec(delta * config.coupling, config.guide_count, seed, index))
    return propagate_green(config.lattice(betas))


def run_ensemble(config: ExperimentConfig, delta_over_c: float,
                 archive: RealizationArchive | None = None) -> EnsembleStats:
    """Propagate every realization at one disorder strength and reduce in index order."""
    seed = ensemble_seed(config.master_seed, delta_over_c)
    stats = EnsembleStats.empty(config.z_checkpoints, config.guide_count,
                                config.injection_index, config.capture_cross)
    jobs = ((config, delta_over_c, seed, r) for r in range(config.realizations))
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            trajectories = pool.map(_realization, jobs, chunksize=16)
            _reduce(stats, trajectories, config, delta_over_c, archive)
    else:
        _reduce(stats, map(_realization, jobs), config, delta_over_c, archive)
    if stats.max_norm_deviation > NORM_TOL:
        raise InvariantViolation(
            f"delta_over_C={delta_over_c}: norm drift {stats.max_norm_deviation:.3g} exceeds {NORM_TOL}")
    return stats


def _reduce(stats, trajectories, config, delta, archive):
    for r, traj in enumerate(trajectories):
        accumulate(stats, traj)
        if archive is None:
            continue
        for z, row in zip(traj.checkpoints, traj.rows):
            values = row[config.injection_index - 1: config.injection_index] \
                if archive.capture == "injection" else row.copy()
            archive.records.append(ArchiveRecord(r, delta, z, values))


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    archive = None
    if config.archive != "none":
        archive = RealizationArchive({"format_version": ARCHIVE_FORMAT_VERSION,
                                      "capture": config.archive, "config": config.to_dict()})
    ensembles = {}
    for delta in config.delta_over_c:
        log.info("delta_over_C=%g: %d realizations", delta, config.realizations)
        ensembles[delta] = run_ensemble(config, delta, archive)
    result = ExperimentResult(config, ensembles, archive)
    if write:
        result.files = write_outputs(result)
    return result


SUMMARY_COLUMNS = ("state", "delta_over_C", "z", "guide_index", "mean_intensity",
                   "g2_medium_factor", "g2", "participation", "intensity_variance")
INJECTION_COLUMNS = ("state", "delta_over_C", "z", "mean_intensity", "g2_medium_factor",
                     "g2_input_factor", "g2", "g2_stderr", "intensity_variance")


def _g2_cells(res):
    if res.no_signal:
        return NO_SIGNAL, NO_SIGNAL
    return fmt(res.medium_factor), fmt(res.value)


def summary_rows(result: ExperimentResult):
    cfg = result.config
    for spec in cfg.state_specs():
        mom = moments(spec)
        for delta, stats in result.ensembles.items():
            for k, z in enumerate(stats.checkpoints):
                part = fmt(participation_number(stats, k))
                for j in range(1, cfg.guide_count + 1):
                    medium, value = _g2_cells(g2(stats, mom, j, k))
                    yield (spec.label, fmt(delta), fmt(z), str(j),
                           fmt(stats.mean_abs2[k, j - 1] * mom.mean_n), medium, value, part,
                           fmt(intensity_variance(stats, mom, k, j)))


def injection_rows(result: ExperimentResult):
    cfg = result.config
    j0 = cfg.injection_index
    for spec in cfg.state_specs():
        mom = moments(spec)
        for delta, stats in result.ensembles.items():
            for k, z in enumerate(stats.checkpoints):
                res = g2(stats, mom, j0, k)
                medium, value = _g2_cells(res)
                stderr = "" if res.stderr is None else fmt(res.stderr)
                yield (spec.label, fmt(delta), fmt(z), fmt(stats.mean_abs2[k, j0 - 1] * mom.mean_n),
                       medium, fmt(res.input_factor), value, stderr,
                       fmt(intensity_variance(stats, mom, k)))


def _write_csv(path: Path, columns, rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
    return path


def write_outputs(result: ExperimentResult) -> list[Path]:
    cfg = result.config
    out = cfg.resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    name = cfg.name
    files = [
        _write_csv(out / f"{name}_summary.csv", SUMMARY_COLUMNS, summary_rows(result)),
        _write_csv(out / f"{name}_injection.csv", INJECTION_COLUMNS, injection_rows(result)),
        _write_csv(out / f"{name}_participation.csv", ("delta_over_C", "z", "participation"),
                   ((fmt(d), fmt(z), fmt(participation_number(s, k)))
                    for d, s in result.ensembles.items() for k, z in enumerate(s.checkpoints))),
    ]
    if cfg.write_ensemble:
        for delta, stats in result.ensembles.items():
            sem2, sem4 = stats.sem_abs2(), stats.sem_abs4()
            for k, z in enumerate(stats.checkpoints):
                rows = ((str(j + 1), fmt(stats.mean_abs2[k, j]), fmt(stats.mean_abs4[k, j]),
                         fmt(sem2[k, j]), fmt(sem4[k, j])) for j in range(cfg.guide_count))
                files.append(_write_csv(out / f"{name}_ensemble_{_token(delta)}_{_token(z)}.csv",
                                        ("guide_index", "mean_abs2", "mean_abs4", "sem_abs2",
                                         "sem_abs4"), rows))
    if result.archive is not None:
        files.append(result.archive.save(out / f"{name}_archive.txt"))
    if cfg.gnuplot:
        files.append(_write_profile_script(out, cfg))
    (out / f"{name}_config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    files.append(out / f"{name}_config.json")
    return files


def _write_profile_script(out: Path, cfg: ExperimentConfig) -> Path:
    lines = ["set xlabel 'guide'", "set ylabel '<|G|^2>'", "set logscale y", "plot \\"]
    entries = [f"  '{cfg.name}_ensemble_{_token(d)}_{_token(z)}.csv' every ::1 using 1:2 "
               f"with lines title 'D/C={_token(d)} z={_token(z)}'"
               for d in cfg.delta_over_c for z in cfg.z_checkpoints]
    lines.append(", \\\n".join(entries))
    path = out / f"{cfg.name}_profiles.gp"
    path.write_text("set datafile separator ','\n" + "\n".join(lines) + "\n")
    return path


@dataclass(frozen=True)
class WignerOutput:
    grid: WignerGrid
    pnd: PndResult


def wigner_pipeline(archive: RealizationArchive, state: StateSpec | str, delta_over_c: float,
                    z: float, grid: GridSpec | None = None, n_max: int | None = None) -> WignerOutput:
    if isinstance(state, str):
        state = parse_state(state)
    samples = archive.injection_samples(delta_over_c, z)
    wg = wigner_grid(state, samples, grid)
    return WignerOutput(wg, pnd(wg, n_max if n_max is not None else wg.truncation))


def write_wigner_csv(path, grid: WignerGrid) -> Path:
    path = Path(path)
    X, Y = np.meshgrid(grid.xs, grid.ys)
    with path.open("w", newline="") as fh:
        fh.write(f"# dx={fmt(grid.spec.dx)} dy={fmt(grid.spec.dy)} "
                 f"realizations={grid.realization_count} truncation={grid.truncation}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "y", "W"))
        for x, y, v in zip(X.ravel(), Y.ravel(), grid.values.ravel()):
            w.writerow((fmt(x), fmt(y), fmt(v)))
    return path


def read_wigner_csv(path) -> WignerGrid:
    text = Path(path).read_text().splitlines()
    meta = {}
    if text and text[0].startswith("#"):
        meta = dict(item.split("=") for item in text[0][1:].split())
        text = text[1:]
    rows = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    xs, ys = np.unique(rows[:, 0]), np.unique(rows[:, 1])
    dx = float(meta["dx"]) if "dx" in meta else float(np.diff(xs).mean())
    dy = float(meta["dy"]) if "dy" in meta else float(np.diff(ys).mean())
    values = rows[:, 2].reshape(ys.size, xs.size)
    trunc = meta.get("truncation")
    spec = GridSpec(float(xs[0]), float(xs[-1]), float(ys[0]), float(ys[-1]), dx, dy)
    return WignerGrid(spec, values, int(meta.get("realizations", 1)),
                      int(trunc) if trunc not in (None, "None") else None)


def write_wigner_matrix(path, grid: WignerGrid) -> Path:
    """gnuplot ``matrix nonuniform`` layout: first row holds x, first column y."""
    path = Path(path)
    lines = [" ".join([str(grid.xs.size)] + [fmt(x) for x in grid.xs])]
    for y, row in zip(grid.ys, grid.values):
        lines.append(" ".join([fmt(y)] + [fmt(v) for v in row]))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_pnd_csv(path, result: PndResult) -> Path:
    return _write_csv(Path(path), ("n", "P_raw", "P_normalized"),
                      ((str(n), fmt(r), fmt(p))
                       for n, (r, p) in enumerate(zip(result.raw, result.probabilities))))
