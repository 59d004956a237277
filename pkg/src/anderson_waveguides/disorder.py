"""Reproducible Gaussian on-site disorder.

Uniform deviates come from a 64-bit linear congruential generator with
Knuth's MMIX constants; the top 53 bits of each state give a double in
[0, 1).  Pairs of uniforms become pairs of normals through the
trigonometric Box-Muller transform.  Per-realization seeds are produced by
the SplitMix64 mixer applied to ``master_seed ^ realization_index``.

Nothing here touches global RNG state.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407

SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL2 = 0x94D049BB133111EB

_TWO_M53 = 2.0 ** -53


def splitmix64(x: int) -> int:
    z = (x + SPLITMIX_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * SPLITMIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_MUL2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, realization_index: int) -> int:
    """Seed for one realization; a bijection of the index for fixed master seed."""
    if realization_index < 0:
        raise ValueError("realization_index must be nonnegative")
    return splitmix64((int(master_seed) & MASK64) ^ (int(realization_index) & MASK64))


def ensemble_seed(master_seed: int, delta_over_c: float) -> int:
    """Master seed of the ensemble at one disorder strength.

    Keyed on the IEEE-754 bit pattern of the disorder ratio so that every
    (ratio, realization) pair gets its own stream regardless of list order.
    """
    (bits,) = struct.unpack("<Q", struct.pack("<d", float(delta_over_c)))
    return derive_seed(master_seed, bits)


class Lcg64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) & MASK64
        return self.state

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _TWO_M53

    def uniforms(self, n: int) -> np.ndarray:
        out = np.empty(n)
        s = self.state
        for i in range(n):
            s = (LCG_MULTIPLIER * s + LCG_INCREMENT) & MASK64
            out[i] = (s >> 11) * _TWO_M53
        self.state = s
        return out


def box_muller(u1: np.ndarray, u2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u1 = np.where(u1 == 0.0, _TWO_M53, u1)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * math.pi * u2
    return r * np.cos(theta), r * np.sin(theta)


def standard_normals(seed: int, n: int) -> np.ndarray:
    """``n`` standard normal draws from the LCG stream started at ``seed``."""
    pairs = (n + 1) // 2
    u = Lcg64(seed).uniforms(2 * pairs)
    g1, g2 = box_muller(u[0::2], u[1::2])
    out = np.empty(2 * pairs)
    out[0::2] = g1
    out[1::2] = g2
    return out[:n]


@dataclass(frozen=True)
class DisorderSpec:
    delta: float
    guide_count: int
    master_seed: int
    realization_index: int = 0

    def __post_init__(self):
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be finite and nonnegative, got {self.delta}")
        if self.guide_count < 1:
            raise ValueError("guide_count must be positive")
        if self.realization_index < 0:
            raise ValueError("realization_index must be nonnegative")


def sample_betas(spec: DisorderSpec) -> np.ndarray:
    if spec.delta == 0:
        return np.zeros(spec.guide_count)
    seed = derive_seed(spec.master_seed, spec.realization_index)
    return spec.delta * standard_normals(seed, spec.guide_count)
