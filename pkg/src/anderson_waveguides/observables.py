"""Disorder-averaged Green's-function statistics and the observables built on them.

Every observable factorizes into a medium part (moments of |G_{j,j0}|^2 over
disorder) and an input-state part (<a^dag a>, <a^dag^2 a^2>), so one
ensemble serves every input state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import GreenTrajectory
from .states import StateMoments


@dataclass
class EnsembleStats:
    """Running (Welford) means of |G|^2 and |G|^4 per checkpoint and guide.

    ``m2_abs2``/``m2_abs4`` are sums of squared deviations and ``c_24`` the
    co-moment of |G|^2 and |G|^4; they feed the standard errors only.
    """

    checkpoints: tuple[float, ...]
    injection_index: int
    mean_abs2: np.ndarray
    mean_abs4: np.ndarray
    m2_abs2: np.ndarray
    m2_abs4: np.ndarray
    c_24: np.ndarray
    mean_cross: np.ndarray | None = None
    count: int = 0
    max_norm_deviation: float = 0.0

    @classmethod
    def empty(cls, checkpoints, guide_count: int, injection_index: int,
              capture_cross: bool = False) -> "EnsembleStats":
        shape = (len(checkpoints), guide_count)
        z = lambda: np.zeros(shape)  # noqa: E731
        cross = np.zeros(shape + (guide_count,)) if capture_cross else None
        return cls(tuple(float(c) for c in checkpoints), injection_index,
                   z(), z(), z(), z(), z(), cross)

    @property
    def guide_count(self) -> int:
        return self.mean_abs2.shape[1]

    def guide_column(self, j: int) -> int:
        if not 1 <= j <= self.guide_count:
            raise IndexError(f"guide {j} outside [1, {self.guide_count}]")
        return j - 1

    def check_z(self, z_idx: int) -> int:
        if not 0 <= z_idx < len(self.checkpoints):
            raise IndexError(f"checkpoint index {z_idx} outside [0, {len(self.checkpoints)})")
        return z_idx

    def sem_abs2(self) -> np.ndarray:
        return self._sem(self.m2_abs2)

    def sem_abs4(self) -> np.ndarray:
        return self._sem(self.m2_abs4)

    def _sem(self, m2):
        if self.count < 2:
            return np.full_like(m2, np.nan)
        return np.sqrt(m2 / (self.count - 1) / self.count)

    def variance_abs2(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.m2_abs2)
        return self.m2_abs2 / (self.count - 1)


def accumulate(stats: EnsembleStats, trajectory: GreenTrajectory) -> EnsembleStats:
    """Fold one realization into ``stats`` (updated in place and returned)."""
    if tuple(trajectory.checkpoints) != stats.checkpoints:
        raise ValueError("trajectory checkpoints do not match the ensemble")
    if trajectory.guide_count != stats.guide_count:
        raise ValueError("trajectory guide count does not match the ensemble")
    if trajectory.injection_index != stats.injection_index:
        raise ValueError("trajectory injection guide does not match the ensemble")

    a2 = np.abs(trajectory.rows) ** 2
    a4 = a2 * a2
    stats.count += 1
    n = stats.count
    d2 = a2 - stats.mean_abs2
    d4 = a4 - stats.mean_abs4
    stats.mean_abs2 += d2 / n
    stats.mean_abs4 += d4 / n
    stats.m2_abs2 += d2 * (a2 - stats.mean_abs2)
    stats.m2_abs4 += d4 * (a4 - stats.mean_abs4)
    stats.c_24 += d2 * (a4 - stats.mean_abs4)
    if stats.mean_cross is not None:
        outer = a2[:, :, None] * a2[:, None, :]
        stats.mean_cross += (outer - stats.mean_cross) / n
    dev = float(np.max(np.abs(a2.sum(axis=1) - 1.0)))
    stats.max_norm_deviation = max(stats.max_norm_deviation, dev)
    return stats


def mean_intensity(stats: EnsembleStats, moments: StateMoments, j: int, z_idx: int) -> float:
    col = stats.guide_column(j)
    return float(stats.mean_abs2[stats.check_z(z_idx), col] * moments.mean_n)


def intensity_profile(stats: EnsembleStats, moments: StateMoments, z_idx: int) -> np.ndarray:
    return stats.mean_abs2[stats.check_z(z_idx)] * moments.mean_n


def intensity_correlation(stats: EnsembleStats, moments: StateMoments, j: int, l: int,
                          z_idx: int) -> float:
    k = stats.check_z(z_idx)
    cj, cl = stats.guide_column(j), stats.guide_column(l)
    if cj == cl:
        medium = stats.mean_abs4[k, cj]
    elif stats.mean_cross is not None:
        medium = stats.mean_cross[k, cj, cl]
    else:
        raise LookupError("cross-guide correlations were not captured for this ensemble")
    return float(medium * moments.mean_n2fact)


@dataclass(frozen=True)
class G2Result:
    """Second-order correlation at one guide.

    ``medium_factor`` is None when no light reaches the guide on average; in
    that case there is no g2 value at all.
    """

    medium_factor: float | None
    input_factor: float
    medium_stderr: float | None = field(default=None, compare=False)

    @property
    def no_signal(self) -> bool:
        return self.medium_factor is None

    @property
    def value(self) -> float | None:
        return None if self.medium_factor is None else self.medium_factor * self.input_factor

    @property
    def stderr(self) -> float | None:
        if self.medium_stderr is None:
            return None
        return self.medium_stderr * self.input_factor


def g2(stats: EnsembleStats, moments: StateMoments, j: int, z_idx: int) -> G2Result:
    k, col = stats.check_z(z_idx), stats.guide_column(j)
    input_factor = moments.g2
    m2 = stats.mean_abs2[k, col]
    m4 = stats.mean_abs4[k, col]
    if m2 == 0.0:
        return G2Result(None, input_factor)
    medium = float(m4 / (m2 * m2))
    stderr = None
    R = stats.count
    if R >= 2:
        # delta method on f(m2, m4) = m4 / m2^2
        var2 = stats.m2_abs2[k, col] / (R - 1)
        var4 = stats.m2_abs4[k, col] / (R - 1)
        cov = stats.c_24[k, col] / (R - 1)
        d4 = 1.0 / (m2 * m2)
        d2 = -2.0 * m4 / m2**3
        var_f = (d4 * d4 * var4 + d2 * d2 * var2 + 2.0 * d2 * d4 * cov) / R
        stderr = math.sqrt(max(var_f, 0.0))
    return G2Result(medium, input_factor, stderr)


def intensity_variance(stats: EnsembleStats, moments: StateMoments, z_idx: int,
                       j: int | None = None) -> float:
    """(Delta I)^2 at guide ``j`` (default: the injection guide)."""
    k = stats.check_z(z_idx)
    col = stats.guide_column(stats.injection_index if j is None else j)
    m2 = stats.mean_abs2[k, col]
    m4 = stats.mean_abs4[k, col]
    n, n2 = moments.mean_n, moments.mean_n2fact
    return float(m4 * n2 + m2 * n - (m2 * n) ** 2)


def participation_number(stats: EnsembleStats, z_idx: int) -> float:
    p = stats.mean_abs2[stats.check_z(z_idx)]
    return float(p.sum() ** 2 / np.sum(p * p))


def profile_distance(stats: EnsembleStats, z_a: int, z_b: int) -> float:
    """L1 distance between the normalized mean-intensity profiles at two checkpoints."""
    pa = stats.mean_abs2[stats.check_z(z_a)]
    pb = stats.mean_abs2[stats.check_z(z_b)]
    return float(np.sum(np.abs(pa / pa.sum() - pb / pb.sum())))
