"""Density-matrix reference for a single mode sent through a_out = g a + vacuum."""

import math

import numpy as np
from scipy.special import eval_genlaguerre


def loss_channel(coeffs, g):
    c = np.asarray(coeffs, dtype=complex)
    N = c.size - 1
    rho = np.outer(c, c.conj())
    eta, phase = abs(g) ** 2, (g / abs(g) if g != 0 else 1.0)
    out = np.zeros_like(rho)
    for m in range(N + 1):
        for n in range(N + 1):
            acc = 0j
            for l in range(N + 1 - max(m, n)):
                acc += (rho[m + l, n + l] * math.sqrt(math.comb(m + l, l) * math.comb(n + l, l))
                        * (1 - eta) ** l)
            out[m, n] = acc * eta ** ((m + n) / 2) * phase ** (m - n)
    return out


def fock_wigner(rho, x, y):
    """W of a density matrix in the number basis, vacuum normalized to (2/pi) e^{-2|a|^2}."""
    a = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    r2 = np.abs(a) ** 2
    w = np.zeros(a.shape, dtype=complex)
    for m in range(rho.shape[0]):
        for n in range(rho.shape[0]):
            if rho[m, n] == 0:
                continue
            if m >= n:
                term = (-1) ** n * math.sqrt(math.factorial(n) / math.factorial(m)) \
                    * (2 * np.conj(a)) ** (m - n) * eval_genlaguerre(n, m - n, 4 * r2)
            else:
                term = (-1) ** m * math.sqrt(math.factorial(m) / math.factorial(n)) \
                    * (2 * a) ** (n - m) * eval_genlaguerre(m, n - m, 4 * r2)
            w += rho[m, n] * term
    return ((2 / math.pi) * np.exp(-2 * r2) * w).real


def output_wigner(coeffs, g, x, y):
    return fock_wigner(loss_channel(coeffs, g), x, y)
