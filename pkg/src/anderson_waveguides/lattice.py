"""Green's-function propagation through a 1-D array of coupled waveguides.

The array obeys

    i dG_j/dz = beta_j G_j + C (G_{j+1} + G_{j-1}),   G_0 = G_{M+1} = 0,

for light injected into a single guide ``j0``.  Each step is the implicit
midpoint (Crank-Nicolson) update

    (I + i h/2 H) G(z + h) = (I - i h/2 H) G(z)

solved by Thomas elimination.  H is real symmetric tridiagonal, so the update
is unitary and the total intensity is conserved to round-off.

Guide labels are 1-based (1..M) everywhere in the public API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np
from scipy.special import jv

PIVOT_FLOOR = 1e-300
# checkpoint intervals closer than this to a whole number of steps are treated as aligned
_ALIGN_TOL = 1e-9


class PivotBreakdown(ArithmeticError):
    pass


@dataclass(frozen=True)
class LatticeConfig:
    guide_count: int = 101
    injection_index: int = 51
    coupling: float = 1.0
    dz: float = 0.001
    z_checkpoints: tuple[float, ...] = (5.0, 20.0)
    betas: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        M = int(self.guide_count)
        if M < 3:
            raise ValueError(f"guide_count must be >= 3, got {M}")
        if not 1 <= self.injection_index <= M:
            raise ValueError(f"injection_index {self.injection_index} outside [1, {M}]")
        if not (self.dz > 0 and math.isfinite(self.dz)):
            raise ValueError(f"dz must be positive, got {self.dz}")
        if not math.isfinite(self.coupling):
            raise ValueError("coupling must be finite")
        zs = tuple(float(z) for z in self.z_checkpoints)
        if not zs:
            raise ValueError("at least one z checkpoint is required")
        if zs[0] < 0 or any(b <= a for a, b in zip(zs, zs[1:])):
            raise ValueError("z_checkpoints must be nonnegative and strictly ascending")
        object.__setattr__(self, "z_checkpoints", zs)
        betas = np.zeros(M) if self.betas is None else np.asarray(self.betas, dtype=float)
        if betas.shape != (M,):
            raise ValueError(f"betas must have exactly {M} entries, got shape {betas.shape}")
        if not np.all(np.isfinite(betas)):
            raise ValueError("betas contain non-finite entries")
        betas = betas.copy()
        betas.flags.writeable = False
        object.__setattr__(self, "betas", betas)


@dataclass(frozen=True)
class GreenTrajectory:
    """Rows ``G_{j,j0}(z)`` for j = 1..M, one row per checkpoint."""

    checkpoints: tuple[float, ...]
    rows: np.ndarray  # complex128, shape (K, M)
    injection_index: int

    @property
    def guide_count(self) -> int:
        return self.rows.shape[1]

    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.rows) ** 2, axis=1)

    def injection_amplitudes(self) -> np.ndarray:
        return self.rows[:, self.injection_index - 1].copy()


@numba.njit(cache=True)
def _factorize(beta, coupling, h):
    # Thomas factorization of I + i h/2 H; returns super-diagonal multipliers,
    # inverse pivots and the smallest pivot magnitude seen.
    M = beta.size
    off = 0.5j * h * coupling
    cp = np.empty(M, np.complex128)
    inv = np.empty(M, np.complex128)
    d = 1.0 + 0.5j * h * beta[0]
    smallest = abs(d)
    inv[0] = 1.0 / d
    cp[0] = off * inv[0]
    for j in range(1, M):
        d = 1.0 + 0.5j * h * beta[j] - off * cp[j - 1]
        smallest = min(smallest, abs(d))
        inv[j] = 1.0 / d
        cp[j] = off * inv[j]
    return cp, inv, smallest


@numba.njit(cache=True)
def _advance(G, beta, coupling, h, n_steps, cp, inv):
    M = G.size
    off = 0.5j * h * coupling
    rhs = np.empty(M, np.complex128)
    for _ in range(n_steps):
        for j in range(M):
            v = (1.0 - 0.5j * h * beta[j]) * G[j]
            if j > 0:
                v -= off * G[j - 1]
            if j < M - 1:
                v -= off * G[j + 1]
            rhs[j] = v
        G[0] = rhs[0] * inv[0]
        for j in range(1, M):
            G[j] = (rhs[j] - off * G[j - 1]) * inv[j]
        for j in range(M - 2, -1, -1):
            G[j] -= cp[j] * G[j + 1]


def _step_plan(z_from: float, z_to: float, dz: float) -> tuple[int, float]:
    length = z_to - z_from
    n_full = int(math.floor(length / dz + _ALIGN_TOL))
    residual = length - n_full * dz
    if residual <= 1e-12 * max(1.0, abs(z_to)):
        residual = 0.0
    return n_full, residual


def _factor_checked(beta, coupling, h):
    cp, inv, smallest = _factorize(beta, coupling, h)
    if not smallest >= PIVOT_FLOOR:
        raise PivotBreakdown(f"tridiagonal pivot magnitude {smallest!r} below {PIVOT_FLOOR}")
    return cp, inv


def propagate_green(config: LatticeConfig) -> GreenTrajectory:
    """Integrate the Green's-function row of the injection guide to every checkpoint.

    Checkpoints that are not a whole number of ``dz`` steps past the previous
    one are reached with a single shortened final step.
    """
    beta = np.ascontiguousarray(config.betas, dtype=np.float64)
    C = float(config.coupling)
    G = np.zeros(config.guide_count, dtype=np.complex128)
    G[config.injection_index - 1] = 1.0
    cp, inv = _factor_checked(beta, C, config.dz)

    rows = np.empty((len(config.z_checkpoints), config.guide_count), dtype=np.complex128)
    z = 0.0
    for i, target in enumerate(config.z_checkpoints):
        n_full, residual = _step_plan(z, target, config.dz)
        if n_full:
            _advance(G, beta, C, config.dz, n_full, cp, inv)
        if residual:
            rcp, rinv = _factor_checked(beta, C, residual)
            _advance(G, beta, C, residual, 1, rcp, rinv)
        z = target
        rows[i] = G
    return GreenTrajectory(config.z_checkpoints, rows, config.injection_index)


def ordered_lattice_oracle(j: int, j0: int, C: float, z: float) -> complex:
    """Closed-form G_{j,j0}(z) of the infinite disorder-free lattice.

    Equals (-i)^|d| J_|d|(2 C z) with d = j - j0.  Only valid for a finite
    array while the wavefront is well clear of the edges.
    """
    d = abs(int(j) - int(j0))
    return complex((-1j) ** d * jv(d, 2.0 * C * z))


def ordered_lattice_row(guide_count: int, j0: int, C: float, z: float) -> np.ndarray:
    d = np.abs(np.arange(1, guide_count + 1) - j0)
    return ((-1j) ** d) * jv(d, 2.0 * C * z)


def exact_propagator_row(config: LatticeConfig, z: float) -> np.ndarray:
    """Reference solution exp(-i H z) e_j0 via dense eigendecomposition (tests only)."""
    M = config.guide_count
    H = np.diag(np.asarray(config.betas, dtype=float))
    H += np.diag(np.full(M - 1, config.coupling), 1) + np.diag(np.full(M - 1, config.coupling), -1)
    w, V = np.linalg.eigh(H)
    return V @ (np.exp(-1j * w * z) * V[config.injection_index - 1, :])


def lattice(betas: Sequence[float], z_checkpoints: Sequence[float], *, coupling: float = 1.0,
            dz: float = 0.001, injection_index: int | None = None) -> LatticeConfig:
    betas = np.asarray(betas, dtype=float)
    M = betas.size
    j0 = (M + 1) // 2 if injection_index is None else injection_index
    return LatticeConfig(M, j0, coupling, dz, tuple(z_checkpoints), betas)
