"""Resonant two-level propagators in Cayley-Klein form.

A propagator is stored as the pair ``(a, b)`` of the SU(2) matrix

    [[ a,        b       ],
     [-conj(b),  conj(a) ]]

Pulse areas and phases are stored in units of pi, so that the values printed
in phase tables (and in the JSON files) survive a round trip bit for bit and
can be promoted exactly to extended precision.  Radian views are available as
properties.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import InvalidArgumentError, InvalidPulseError


def mp_precision_for(*values) -> int:
    """Working precision (bits) that loses no digits of the given mpf values."""
    bits = [v._mpf_[3] + 16 for v in values if isinstance(v, mpmath.mpf)]
    return max([mpmath.mp.prec] + bits)


def wrap_pi_units(x):
    """Reduce a phase given in units of pi to ``[0, 2)``.

    Works for floats and ``mpmath.mpf`` alike; mpf input keeps its precision.
    """
    if isinstance(x, mpmath.mpf):
        with mpmath.workprec(mp_precision_for(x)):
            r = x % 2
            return r if r < 2 else mpmath.mpf(0)
    r = float(x) % 2.0
    # tiny negative inputs round up to exactly 2.0
    return 0.0 if r >= 2.0 else r


@dataclass(frozen=True)
class Propagator:
    a: complex
    b: complex

    @property
    def matrix(self) -> np.ndarray:
        a, b = complex(self.a), complex(self.b)
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=complex)

    @property
    def u12(self) -> complex:
        return self.b

    def unitarity_defect(self) -> float:
        return abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0)

    def __matmul__(self, other: "Propagator") -> "Propagator":
        # (self @ other) acts with `other` first
        a2, b2, a1, b1 = self.a, self.b, other.a, other.b
        return Propagator(a2 * a1 - b2 * b1.conjugate(), a2 * b1 + b2 * a1.conjugate())


IDENTITY = Propagator(1.0 + 0j, 0j)


@dataclass(frozen=True)
class PulseSpec:
    """One rectangular resonant pulse.

    ``area_pi`` is the nominal area (at zero error) in units of pi and
    ``phase_pi`` the drive phase in units of pi, normalized to ``[0, 2)``.
    Under a fractional area error ``eps`` the actual area is
    ``nominal_area * (1 + eps)``.

    A zero area is accepted as a degenerate identity pulse; negative areas
    are rejected.
    """

    area_pi: float
    phase_pi: float = 0.0

    def __post_init__(self):
        area = self.area_pi
        if not isinstance(area, mpmath.mpf):
            area = float(area)
        if not (area >= 0) or (isinstance(area, float) and not math.isfinite(area)):
            raise InvalidPulseError(f"pulse area must be non-negative and finite, got {self.area_pi!r}")
        object.__setattr__(self, "area_pi", area)
        object.__setattr__(self, "phase_pi", wrap_pi_units(self.phase_pi))

    @classmethod
    def from_radians(cls, nominal_area: float, phase: float = 0.0) -> "PulseSpec":
        return cls(nominal_area / math.pi, phase / math.pi)

    @property
    def nominal_area(self) -> float:
        return float(self.area_pi) * math.pi

    @property
    def phase(self) -> float:
        return float(self.phase_pi) * math.pi

    def shifted(self, delta_pi) -> "PulseSpec":
        with mpmath.workprec(mp_precision_for(self.phase_pi, delta_pi)):
            return PulseSpec(self.area_pi, self.phase_pi + delta_pi)


def pulse_propagator(pulse: PulseSpec, epsilon: float) -> Propagator:
    """Propagator of a single pulse with fractional area error ``epsilon``."""
    if not isinstance(pulse, PulseSpec):
        raise InvalidPulseError(f"expected a PulseSpec, got {type(pulse).__name__}")
    half = 0.5 * math.pi * float(pulse.area_pi) * (1.0 + epsilon)
    b = -1j * math.sin(half) * complex(math.cos(pulse.phase), math.sin(pulse.phase))
    return Propagator(complex(math.cos(half)), b)


def compose(props: Sequence[Propagator]) -> Propagator:
    """Total propagator of pulses listed in chronological order.

    The first element acts first, i.e. ``U = U_N ... U_2 U_1``.
    """
    props = list(props)
    if not props:
        raise InvalidArgumentError("cannot compose an empty list of propagators")
    total = props[0]
    for u in props[1:]:
        total = u @ total
    return total


def transition_probability(prop: Propagator) -> float:
    return abs(prop.b) ** 2


def propagate(pulses: Iterable[PulseSpec], epsilon: float) -> Propagator:
    return compose([pulse_propagator(p, epsilon) for p in pulses])


def u12_on_grid(pulses: Sequence[PulseSpec], epsilons) -> np.ndarray:
    """Vectorized U12 of a pulse train over an array of errors."""
    eps = np.asarray(epsilons, dtype=float)
    a = np.ones_like(eps, dtype=complex)
    b = np.zeros_like(eps, dtype=complex)
    for p in pulses:
        half = 0.5 * math.pi * float(p.area_pi) * (1.0 + eps)
        ak = np.cos(half).astype(complex)
        bk = -1j * np.sin(half) * np.exp(1j * p.phase)
        a, b = ak * a - bk * np.conj(b), ak * b + bk * np.conj(a)
    return b
