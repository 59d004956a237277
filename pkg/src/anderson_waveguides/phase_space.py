"""Wigner function and photon-number distribution of the injection-guide output.

For a truncated input sum_n c_n |n> and one realization with amplitude
g = G_{j0,j0}(z), the output Wigner function is a finite series

    W(x, y) = (2/pi) exp(-2(x^2 + y^2)) Re sum_{j,k} g^j conj(g)^k B_jk I_jk(x, y)

where B_jk collects sum_n conj(c_n) c_t sqrt(t! n!) / (n-k)! over
t - j = n - k, and I_jk is a finite sum of products of the Hermite-type
polynomials I_r(u) = 2^{-r/2} H_r(sqrt(2) u).  The remaining guides enter in
their vacuum, so g = 0 gives the vacuum Wigner function.

Because W is linear in the monomials g^j conj(g)^k, the disorder average of W
is obtained exactly from the averaged monomials; it is never an average of g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from scipy.integrate import simpson
from scipy.special import eval_laguerre

from .states import FockVector, StateSpec, fock_vector

AMPLITUDE_TOL = 1e-8
PND_NEGATIVE_TOL = 1e-3


def i_poly(r: int, u):
    """I_r(u) as the explicit even-index sum (reference form)."""
    u = np.asarray(u, dtype=float)
    out = (2.0 * u) ** r
    for m in range(2, r + 1, 2):
        h = m // 2
        coef = (-1) ** h * 2.0 ** (-h) * math.factorial(r) / (math.factorial(h) * math.factorial(r - m))
        out = out + coef * (2.0 * u) ** (r - m)
    return out


def i_poly_table(r_max: int, u) -> np.ndarray:
    """Rows I_0..I_rmax at points ``u`` via I_r = 2u I_{r-1} - (r-1) I_{r-2}."""
    u = np.asarray(u, dtype=float)
    out = np.empty((r_max + 1,) + u.shape)
    out[0] = 1.0
    if r_max >= 1:
        out[1] = 2.0 * u
    for r in range(2, r_max + 1):
        out[r] = 2.0 * u * out[r - 1] - (r - 1) * out[r - 2]
    return out


@lru_cache(maxsize=None)
def _log_factorials(n: int) -> np.ndarray:
    return np.array([math.lgamma(k + 1.0) for k in range(n + 1)])


@lru_cache(maxsize=32)
def _ijk_tensor(N: int) -> np.ndarray:
    """T[j, k, q, p]: coefficient of I_q(y) I_p(-x) in I_jk(x, y)."""
    lf = _log_factorials(N)
    T = np.zeros((N + 1, N + 1, 2 * N + 1, 2 * N + 1), dtype=np.complex128)
    for j in range(N + 1):
        for k in range(N + 1):
            for s in range(j + 1):
                for l in range(k + 1):
                    mag = math.exp(-(lf[k - l] + lf[l] + lf[j - s] + lf[s]))
                    phase = (-1) ** (j + s) * 1j ** ((j + k + s + l) % 4)
                    T[j, k, j - s + k - l, s + l] += phase * mag
    T.flags.writeable = False
    return T


def _state_weights(coeffs: np.ndarray) -> np.ndarray:
    """B[j, k] = sum_n conj(c_n) c_t sqrt(t! n!)/(n-k)! with t = n - k + j."""
    N = coeffs.size - 1
    lf = _log_factorials(N)
    B = np.zeros((N + 1, N + 1), dtype=np.complex128)
    for j in range(N + 1):
        for k in range(N + 1):
            acc = 0j
            for n in range(k, N + 1):
                t = n - k + j
                if t > N:
                    break
                acc += np.conj(coeffs[n]) * coeffs[t] * math.exp(0.5 * (lf[t] + lf[n]) - lf[n - k])
            B[j, k] = acc
    return B


def amplitude_moments(samples: Sequence[complex], order: int) -> np.ndarray:
    """mu[j, k] = mean over samples of g^j conj(g)^k, j, k <= order."""
    g = np.asarray(samples, dtype=np.complex128).ravel()
    if g.size == 0:
        raise ValueError("at least one Green-function sample is required")
    if np.any(np.abs(g) > 1.0 + AMPLITUDE_TOL):
        worst = float(np.max(np.abs(g)))
        raise ValueError(f"unphysical amplitude |g| = {worst!r} > 1")
    powers = np.ones((g.size, order + 1), dtype=np.complex128)
    for j in range(1, order + 1):
        powers[:, j] = powers[:, j - 1] * g
    return powers.T @ powers.conj() / g.size


def _as_fock(state) -> FockVector:
    if isinstance(state, FockVector):
        return state
    if isinstance(state, StateSpec):
        return fock_vector(state)
    return FockVector(np.asarray(state, dtype=np.complex128))


def _series_matrix(vec: FockVector, mu: np.ndarray) -> np.ndarray:
    N = vec.truncation
    B = _state_weights(vec.coefficients)
    return np.einsum("jk,jkqp->qp", mu * B, _ijk_tensor(N))


def _evaluate(series: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Complex W on the tensor grid (rows follow ``ys``, columns ``xs``)."""
    r_max = series.shape[0] - 1
    Iy = i_poly_table(r_max, ys) * np.exp(-2.0 * ys * ys)
    Ix = i_poly_table(r_max, -xs) * np.exp(-2.0 * xs * xs)
    return (2.0 / math.pi) * (Iy.T @ series @ Ix)


# The expansion cancels heavily for large truncations (about 1e-12 lost at
# N = 8, 1e-4 at N = 20), so larger states go through mpmath.
DOUBLE_MAX_TRUNCATION = 8


def working_digits(truncation: int) -> int | None:
    return None if truncation <= DOUBLE_MAX_TRUNCATION else 20 + truncation


def _series_matrix_mp(coeffs: np.ndarray, samples: np.ndarray, ctx) -> list:
    N = coeffs.size - 1
    c = [ctx.mpc(complex(v)) for v in coeffs]
    fact = [ctx.factorial(k) for k in range(2 * N + 1)]
    g = [ctx.mpc(complex(v)) for v in samples]
    powers = [[ctx.mpc(1)] * len(g)]
    for _ in range(N):
        powers.append([a * b for a, b in zip(powers[-1], g)])
    inv_r = ctx.mpf(1) / len(g)
    M = [[ctx.mpc(0)] * (2 * N + 1) for _ in range(2 * N + 1)]
    for j in range(N + 1):
        for k in range(N + 1):
            b = ctx.fsum(ctx.conj(c[n]) * c[n - k + j] * ctx.sqrt(fact[n - k + j] * fact[n]) / fact[n - k]
                         for n in range(k, min(N, N - j + k) + 1))
            if b == 0:
                continue
            mu = ctx.fdot(powers[j], [ctx.conj(v) for v in powers[k]]) * inv_r
            w = mu * b
            for s in range(j + 1):
                for l in range(k + 1):
                    phase = (-1) ** (j + s) * 1j ** ((j + k + s + l) % 4)
                    M[j - s + k - l][s + l] += w * phase / (fact[k - l] * fact[l] * fact[j - s] * fact[s])
    return M


def _i_table_mp(r_max: int, points: np.ndarray, ctx) -> list:
    rows = []
    for u in points:
        u = ctx.mpf(float(u))
        gauss = ctx.exp(-2 * u * u)
        col = [ctx.mpf(1), 2 * u]
        for r in range(2, r_max + 1):
            col.append(2 * u * col[r - 1] - (r - 1) * col[r - 2])
        rows.append([v * gauss for v in col[: r_max + 1]])
    return rows  # rows[point][r]


def _evaluate_mp(M: list, xs: np.ndarray, ys: np.ndarray, ctx, pairs=None) -> np.ndarray:
    r_max = len(M) - 1
    Ix = _i_table_mp(r_max, -np.asarray(xs), ctx)
    Iy = _i_table_mp(r_max, np.asarray(ys), ctx)
    pref = 2 / ctx.pi
    # A[ix][q] = sum_p M[q][p] Ix[ix][p]
    A = [[ctx.fdot(M[q], ix) for q in range(r_max + 1)] for ix in Ix]
    if pairs is not None:
        return np.array([complex(pref * ctx.fdot(Iy[iy], A[ix])) for iy, ix in pairs])
    return np.array([[complex(pref * ctx.fdot(iy, a)) for a in A] for iy in Iy])


def _wigner_values(vec: FockVector, samples, xs, ys, pairs=None) -> np.ndarray:
    samples = np.asarray(samples, dtype=np.complex128).ravel()
    mu = amplitude_moments(samples, vec.truncation)  # also validates the samples
    digits = working_digits(vec.truncation)
    if digits is None:
        series = _series_matrix(vec, mu)
        if pairs is None:
            return _evaluate(series, xs, ys)
        r_max = series.shape[0] - 1
        Ix = i_poly_table(r_max, -xs) * np.exp(-2.0 * xs * xs)
        Iy = i_poly_table(r_max, ys) * np.exp(-2.0 * ys * ys)
        iy, ix = np.asarray(pairs).T
        return (2.0 / math.pi) * np.einsum("qn,qp,pn->n", Iy[:, iy], series, Ix[:, ix])
    ctx = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.MPContext()
    ctx.dps = digits
    M = _series_matrix_mp(vec.coefficients, samples, ctx)
    return _evaluate_mp(M, xs, ys, ctx, pairs)


def wigner_values(state, g: complex, x, y) -> np.ndarray:
    """Output Wigner function of one realization at scattered points."""
    vec = _as_fock(state)
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    flat_x, flat_y = xs.ravel(), ys.ravel()
    pairs = [(i, i) for i in range(flat_x.size)]
    w = _wigner_values(vec, [g], flat_x, flat_y, pairs)
    return w.real.reshape(xs.shape)


def wigner_point(state, g: complex, x: float, y: float) -> float:
    return float(wigner_values(state, g, float(x), float(y)))


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    dx: float = 0.1
    dy: float = 0.1

    def __post_init__(self):
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid steps must be positive")
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("grid bounds are reversed")

    @classmethod
    def covering(cls, truncation: int, step: float = 0.1, margin: float = 2.0) -> "GridSpec":
        half = math.ceil((math.sqrt(truncation) + margin) / step - 1e-9) * step
        return cls(-half, half, -half, half, step, step)

    @property
    def xs(self) -> np.ndarray:
        n = int(round((self.x_max - self.x_min) / self.dx))
        return self.x_min + self.dx * np.arange(n + 1)

    @property
    def ys(self) -> np.ndarray:
        n = int(round((self.y_max - self.y_min) / self.dy))
        return self.y_min + self.dy * np.arange(n + 1)


@dataclass(frozen=True)
class WignerGrid:
    spec: GridSpec
    values: np.ndarray  # shape (len(ys), len(xs))
    realization_count: int
    truncation: int | None = None
    imag_residue: float = 0.0

    @property
    def xs(self) -> np.ndarray:
        return self.spec.xs

    @property
    def ys(self) -> np.ndarray:
        return self.spec.ys

    def integral(self) -> float:
        return float(self.values.sum() * self.spec.dx * self.spec.dy)


def wigner_grid(state, samples: Sequence[complex], grid: GridSpec | None = None) -> WignerGrid:
    """Disorder-averaged output Wigner function on a rectangular grid."""
    vec = _as_fock(state)
    samples = list(samples)
    if not samples:
        raise ValueError("empty sample list")
    grid = grid or GridSpec.covering(vec.truncation)
    w = _wigner_values(vec, samples, grid.xs, grid.ys)
    scale = max(float(np.max(np.abs(w.real))), 1e-300)
    return WignerGrid(grid, w.real.copy(), len(samples), vec.truncation,
                      float(np.max(np.abs(w.imag))) / scale)


def wigner_oracle(state, g: complex, x, y, *, radius: float = 8.0, step: float = 0.02,
                  n_angles: int = 512, fock_dim: int | None = None):
    """Brute-force W by quadrature of the characteristic function (tests only).

    chi(xi) = exp(-(1 - |g|^2)|xi|^2 / 2) <psi| D(conj(g) xi) |psi>, with the
    displacement operator exponentiated in a truncated Fock space, then
    W(alpha) = pi^-2 * integral of exp(alpha conj(xi) - conj(alpha) xi) chi(xi)
    in polar coordinates (Simpson in |xi|, trapezoid in angle).
    """
    vec = _as_fock(state)
    N = vec.truncation
    if N > 6:
        raise ValueError("oracle limited to truncation N <= 6")
    dim = fock_dim or N + 160
    if dim < N + 40:
        raise ValueError("oracle Fock space must exceed the truncation by at least 40")
    c = vec.coefficients
    g = complex(g)

    lowering = np.diag(np.sqrt(np.arange(1, dim)), 1)
    lam, V = np.linalg.eigh(1j * (lowering.T - lowering))
    rho = np.arange(0.0, radius + step / 2, step)
    Vs = V[: N + 1, :]
    # <n| exp(r (a^dag - a)) |m> for r = |g| rho
    disp = np.einsum("nk,rk,mk->rnm", Vs, np.exp(-1j * np.outer(abs(g) * rho, lam)), Vs.conj())
    phi = 2.0 * math.pi * np.arange(n_angles) / n_angles
    theta = phi - (np.angle(g) if g != 0 else 0.0)

    chi = np.zeros((rho.size, n_angles), dtype=np.complex128)
    for d in range(-N, N + 1):
        diag = sum(np.conj(c[n]) * c[n - d] * disp[:, n, n - d]
                   for n in range(max(0, d), min(N, N + d) + 1))
        chi += np.asarray(diag)[:, None] * np.exp(1j * d * theta)[None, :]
    chi *= np.exp(-(1.0 - abs(g) ** 2) * rho**2 / 2.0)[:, None]

    xi = rho[:, None] * np.exp(1j * phi)[None, :]
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    out = np.empty(xs.shape)
    for idx in np.ndindex(xs.shape):
        alpha = xs[idx] + 1j * ys[idx]
        kernel = np.exp(alpha * np.conj(xi) - np.conj(alpha) * xi) * chi
        radial = kernel.sum(axis=1) * (2.0 * math.pi / n_angles) * rho
        out[idx] = (simpson(radial, x=rho) / math.pi**2).real
    return out if out.shape else float(out)


def number_state_wigner(n: int, x, y):
    r2 = np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2
    w = (2.0 / math.pi) * (-1) ** n * np.exp(-2.0 * r2) * eval_laguerre(n, 4.0 * r2)
    return float(w) if np.ndim(w) == 0 else w


@dataclass(frozen=True)
class PndResult:
    raw: np.ndarray
    probabilities: np.ndarray
    raw_total: float
    flagged: bool

    def __len__(self):
        return self.probabilities.size


def pnd(grid: WignerGrid, n_max: int) -> PndResult:
    """Photon-number distribution from Wigner overlaps on the grid.

    ``raw[n]`` is pi * sum W W_n dx dy, the trace-overlap normalization; the
    returned probabilities are ``raw`` rescaled to unit sum, and ``raw_total``
    is kept as a quadrature diagnostic.
    """
    if grid.truncation is not None and n_max < grid.truncation:
        raise ValueError(f"n_max={n_max} below the state truncation {grid.truncation}")
    X, Y = np.meshgrid(grid.xs, grid.ys)
    cell = grid.spec.dx * grid.spec.dy
    raw = np.array([math.pi * cell * float(np.sum(grid.values * number_state_wigner(n, X, Y)))
                    for n in range(n_max + 1)])
    total = float(raw.sum())
    probs = raw / total
    return PndResult(raw, probs, total, bool(probs.min() < -PND_NEGATIVE_TOL))
