"""Input states of the injection guide.

Truncated pure states (complementary coherent, reciprocal binomial,
polynomial) are built as Fock coefficient vectors.  Thermal, coherent and
squeezed-vacuum inputs only carry closed-form moments.

State strings have the form ``family:p1,p2`` or a preset name::

    ccs:0.1414,10      alpha, N     (alpha may be complex, e.g. 0.1+0.2j)
    rbs:0,20           phi, N
    ps:0.374,12        x, N
    thermal:10         mean photon number
    coherent:10        |alpha|^2
    squeezed:10        sinh^2 |zeta|
    ccs1, ccs2, ps1, ps2, rbs, ts, cs, ss   presets with <n> = 10
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

TRUNCATED = ("ccs", "rbs", "ps")
CLOSED_FORM = ("thermal", "coherent", "squeezed")
FAMILIES = TRUNCATED + CLOSED_FORM


class UnsupportedState(ValueError):
    """Raised when a state has no finite Fock-vector representation."""


@dataclass(frozen=True)
class FockVector:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        norm = np.sum(np.abs(c) ** 2)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"coefficients not normalized (sum |c|^2 = {norm!r})")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def normalized(cls, coefficients) -> "FockVector":
        c = np.asarray(coefficients, dtype=np.complex128)
        return cls(c / math.sqrt(float(np.sum(np.abs(c) ** 2))))

    @classmethod
    def number_state(cls, n: int) -> "FockVector":
        c = np.zeros(n + 1, dtype=np.complex128)
        c[n] = 1.0
        return cls(c)

    @property
    def truncation(self) -> int:
        return self.coefficients.size - 1

    def probabilities(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


@dataclass(frozen=True)
class StateMoments:
    """<a^dag a> and <a^dag^2 a^2> of the input mode."""

    mean_n: float
    mean_n2fact: float

    def __post_init__(self):
        for v in (self.mean_n, self.mean_n2fact):
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"moments must be finite and nonnegative, got {v}")

    @property
    def g2(self) -> float:
        return self.mean_n2fact / self.mean_n**2


@dataclass(frozen=True)
class StateSpec:
    family: str
    params: tuple
    label: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown state family {self.family!r}; expected one of {FAMILIES}")
        expected = 2 if self.family in TRUNCATED else 1
        if len(self.params) != expected:
            raise ValueError(f"{self.family} takes {expected} parameter(s), got {len(self.params)}")
        for p in self.params:
            if not cmath.isfinite(complex(p)):
                raise ValueError(f"non-finite parameter in {self.family}: {p}")
        if self.family in TRUNCATED:
            N = self.params[1]
            if int(N) != N or N < 0:
                raise ValueError(f"truncation N must be a nonnegative integer, got {N}")
            if self.family != "ccs" and complex(self.params[0]).imag != 0:
                raise ValueError(f"{self.family} parameter must be real")
        elif complex(self.params[0]).imag != 0 or self.params[0].real < 0:
            raise ValueError(f"{self.family} parameter must be real and nonnegative")
        if not self.label:
            object.__setattr__(self, "label", format_state(self))

    @property
    def is_truncated(self) -> bool:
        return self.family in TRUNCATED


def _fmt_number(v) -> str:
    v = complex(v)
    if v.imag == 0:
        return repr(v.real) if v.real != int(v.real) else str(int(v.real))
    return str(v).strip("()")


def format_state(spec: StateSpec) -> str:
    return f"{spec.family}:" + ",".join(_fmt_number(p) for p in spec.params)


PRESETS = {
    "ccs1": ("ccs", (0.1414, 10)),
    "ccs2": ("ccs", (1.916, 11)),
    "ps1": ("ps", (0.374, 12)),
    "ps2": ("ps", (0.9345, 13)),
    "rbs": ("rbs", (0.0, 20)),
    "ts": ("thermal", (10.0,)),
    "cs": ("coherent", (10.0,)),
    "ss": ("squeezed", (10.0,)),
}
NAMED_TRUNCATED = ("ccs1", "ccs2", "ps1", "ps2", "rbs")
NAMED_REFERENCE = ("ts", "cs", "ss")


def preset(name: str) -> StateSpec:
    family, params = PRESETS[name.lower()]
    return StateSpec(family, params, label=name.upper())


def parse_state(text: str) -> StateSpec:
    text = text.strip()
    if text.lower() in PRESETS:
        return preset(text)
    family, sep, rest = text.partition(":")
    family = family.strip().lower()
    if not sep or family not in FAMILIES:
        raise ValueError(f"cannot parse state {text!r}; use family:params or a preset name")
    try:
        values = [complex(p.strip().replace(" ", "")) for p in rest.split(",")]
    except ValueError as exc:
        raise ValueError(f"bad parameter list in state {text!r}") from exc
    if family in TRUNCATED:
        if len(values) != 2:
            raise ValueError(f"{family} expects two parameters, got {text!r}")
        first = values[0] if family == "ccs" and values[0].imag else values[0].real
        if values[1].imag or values[1].real != int(values[1].real):
            raise ValueError(f"truncation must be an integer in {text!r}")
        params = (first, int(values[1].real))
    else:
        if len(values) != 1:
            raise ValueError(f"{family} expects one parameter, got {text!r}")
        params = (values[0].real,) if not values[0].imag else (values[0],)
    return StateSpec(family, params)


def hermite(n: int, y: float) -> float:
    """Physicists' Hermite polynomial by the three-term recurrence."""
    if n < 0:
        raise ValueError("hermite order must be nonnegative")
    h_prev, h = 1.0, 2.0 * y
    if n == 0:
        return h_prev
    for k in range(1, n):
        h_prev, h = h, 2.0 * y * h - 2.0 * k * h_prev
    return h


def double_factorial(m: int) -> int:
    if m < -1:
        raise ValueError("double factorial defined for m >= -1")
    out = 1
    for k in range(m, 0, -2):
        out *= k
    return out


def ccs_coefficients(alpha: complex, N: int) -> FockVector:
    alpha_c = complex(alpha).conjugate()
    c = [math.sqrt(math.factorial(k)) * alpha_c ** (N - k) * 1j**k for k in range(N + 1)]
    return FockVector.normalized(c)


def rbs_coefficients(phi: float, N: int) -> FockVector:
    amp = 2.0 ** (-N / 2)
    c = [amp * math.sqrt(math.comb(N, k)) * cmath.exp(1j * k * (phi - math.pi / 2))
         for k in range(N + 1)]
    return FockVector.normalized(c)


def ps_coefficients(x: float, N: int) -> FockVector:
    y = x / math.sqrt(2.0)
    c = [hermite(N - k, y) * 1j**k
         / math.sqrt(math.comb(N, k) * double_factorial(2 * N - 2 * k - 1))
         for k in range(N + 1)]
    return FockVector.normalized(c)


def fock_vector(spec: StateSpec) -> FockVector:
    if spec.family == "ccs":
        return ccs_coefficients(spec.params[0], int(spec.params[1]))
    if spec.family == "rbs":
        return rbs_coefficients(complex(spec.params[0]).real, int(spec.params[1]))
    if spec.family == "ps":
        return ps_coefficients(complex(spec.params[0]).real, int(spec.params[1]))
    raise UnsupportedState(
        f"{spec.label}: {spec.family} states are mixed or have infinite Fock support; "
        "only ccs, rbs and ps inputs have a truncated coefficient vector")


def fock_moments(vec: FockVector) -> StateMoments:
    p = vec.probabilities()
    k = np.arange(p.size)
    return StateMoments(float(np.sum(p * k)), float(np.sum(p * k * (k - 1))))


def _weighted_moments(weights) -> StateMoments:
    total = sum(weights)
    mean = sum(w * k for k, w in enumerate(weights)) / total
    fact2 = sum(w * k * (k - 1) for k, w in enumerate(weights)) / total
    return StateMoments(float(mean), float(fact2))


def moments(spec: StateSpec) -> StateMoments:
    """Closed-form photon-number moments of the input state."""
    fam, p = spec.family, spec.params
    if fam == "ccs":
        a2 = abs(complex(p[0])) ** 2
        N = int(p[1])
        return _weighted_moments([math.factorial(k) * a2 ** (N - k) for k in range(N + 1)])
    if fam == "rbs":
        N = int(p[1])
        # binomial weights are exact integers; keep the sums rational
        return _weighted_moments([Fraction(math.comb(N, k)) for k in range(N + 1)])
    if fam == "ps":
        x, N = float(p[0]), int(p[1])
        y = x / math.sqrt(2.0)
        return _weighted_moments([hermite(N - k, y) ** 2
                                  / (math.comb(N, k) * double_factorial(2 * N - 2 * k - 1))
                                  for k in range(N + 1)])
    v = float(p[0])
    if fam == "thermal":
        return StateMoments(v, 2.0 * v * v)
    if fam == "coherent":
        return StateMoments(v, v * v)
    return StateMoments(v, v * (1.0 + 3.0 * v))
