"""Builders for the composite-sequence families.

Pulse lists are chronological: the first pulse is applied first.  ``compose``
takes care of the reverse-order matrix product.

Families
--------
nb           A_0 B_phi2 ... B_phi(N-1) A_phiN, A a nominal pi/2 pulse, B a nominal pi pulse
pb           an NB half-pi sequence followed by its reverse, every phase shifted by a twin phase
wimperis-nb  theta_0 B_phi C_-phi B_phi   (theta applied first)
wimperis-pb  theta_0 C_chi C_-chi C_-chi C_chi
custom       anything else
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import mpmath
import numpy as np

from .errors import DomainError, InvalidArgumentError, SchemaError, UnsupportedLengthError
from .su2 import PulseSpec, Propagator, mp_precision_for, propagate, transition_probability, wrap_pi_units

FAMILIES = ("nb", "pb", "wimperis-nb", "wimperis-pb", "custom")

_PHASE_TOL = 1e-12


def to_pi_units(x):
    """Radians to units of pi, keeping extended precision for mpf input."""
    if isinstance(x, mpmath.mpf):
        with mpmath.workprec(mp_precision_for(x)):
            return x / mpmath.pi
    return float(x) / math.pi


def _circular_gap(x, y) -> float:
    d = float(wrap_pi_units(x - y))
    return min(d, 2.0 - d)


def check_probability(p, name="target_p") -> float:
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {p!r}")
    return p


@dataclass(frozen=True)
class CompositeSequence:
    pulses: tuple
    family: str = "custom"
    meta: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        pulses = tuple(self.pulses)
        if not pulses:
            raise InvalidArgumentError("a composite sequence needs at least one pulse")
        if not all(isinstance(p, PulseSpec) for p in pulses):
            raise InvalidArgumentError("pulses must be PulseSpec instances")
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "pulses", pulses)
        object.__setattr__(self, "meta", dict(self.meta))
        if self.family == "nb":
            _check_nb_structure(pulses)
        elif self.family == "pb":
            _check_pb_structure(pulses)

    def __len__(self):
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    @property
    def phases(self) -> list:
        """Pulse phases in radians (float)."""
        return [p.phase for p in self.pulses]

    @property
    def phases_pi(self) -> list:
        return [p.phase_pi for p in self.pulses]

    @property
    def areas_pi(self) -> list:
        return [p.area_pi for p in self.pulses]

    @property
    def total_half_area(self) -> float:
        """Largest angular frequency (per unit error) present in U12(eps)."""
        return 0.5 * math.pi * sum(float(a) for a in self.areas_pi)

    def propagator(self, epsilon: float = 0.0) -> Propagator:
        return propagate(self.pulses, epsilon)

    def probability(self, epsilon: float = 0.0) -> float:
        return transition_probability(self.propagator(epsilon))

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "phases_pi": [float(x) for x in self.phases_pi],
            "areas_pi": [float(x) for x in self.areas_pi],
            "meta": {k: float(v) for k, v in sorted(self.meta.items())},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CompositeSequence":
        try:
            phases = [float(x) for x in data["phases_pi"]]
            areas = [float(x) for x in data["areas_pi"]]
            family = str(data.get("family", "custom"))
            meta = {str(k): float(v) for k, v in dict(data.get("meta", {})).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed sequence document: {exc}") from exc
        if len(phases) != len(areas):
            raise SchemaError("phases_pi and areas_pi must have equal length")
        try:
            return cls(tuple(PulseSpec(a, f) for a, f in zip(areas, phases)), family, meta)
        except (InvalidArgumentError, ValueError) as exc:
            raise SchemaError(str(exc)) from exc


def _check_nb_structure(pulses):
    n = len(pulses)
    if n % 2 or n < 2:
        raise UnsupportedLengthError(f"NB sequences need an even number of pulses >= 2, got {n}")
    areas = [float(p.area_pi) for p in pulses]
    if areas[0] != 0.5 or areas[-1] != 0.5 or any(a != 1.0 for a in areas[1:-1]):
        raise InvalidArgumentError("NB sequences are A B ... B A with A = pi/2 and B = pi")
    if float(pulses[0].phase_pi) != 0.0:
        raise InvalidArgumentError("the first NB phase is fixed to 0")


def _check_pb_structure(pulses):
    n = len(pulses)
    if n % 2:
        raise UnsupportedLengthError(f"PB sequences have even length, got {n}")
    first, second = pulses[: n // 2], pulses[n // 2:]
    mirrored = first[::-1]
    if any(float(p.area_pi) != float(q.area_pi) for p, q in zip(mirrored, second)):
        raise InvalidArgumentError("PB second half must repeat the first half's areas in reverse")
    shift = wrap_pi_units(second[0].phase_pi - mirrored[0].phase_pi)
    for p, q in zip(mirrored, second):
        if _circular_gap(q.phase_pi - p.phase_pi, shift) > _PHASE_TOL:
            raise InvalidArgumentError("PB second half must be the reversed first half with one constant phase shift")


def nb_sequence(phases: Sequence) -> CompositeSequence:
    """NB sequence from the free phases ``phi_2 ... phi_N`` (radians)."""
    phases = list(phases)
    n = len(phases) + 1
    if n % 2 or n < 2:
        raise UnsupportedLengthError(
            f"phase list of length {len(phases)} implies N={n}; only even N >= 2 is supported")
    pulses = [PulseSpec(0.5, 0.0)]
    pulses += [PulseSpec(1.0, to_pi_units(f)) for f in phases[:-1]]
    pulses.append(PulseSpec(0.5, to_pi_units(phases[-1])))
    return CompositeSequence(tuple(pulses), "nb")


def twin_phase(target_p):
    """Twin phase 2 arccos(sqrt(p)) in radians."""
    check_probability(target_p)
    if isinstance(target_p, mpmath.mpf):
        return 2 * mpmath.acos(mpmath.sqrt(target_p))
    return 2.0 * math.acos(math.sqrt(target_p))


def pb_sequence(nb_half_pi_phases: Sequence, target_p) -> CompositeSequence:
    """Twin an NB half-pi sequence into a PB sequence with central probability ``target_p``.

    The phases are not checked to produce a half-pi NB pulse; see
    ``solver.validate_half_pi``.
    """
    check_probability(target_p)
    phases = list(nb_half_pi_phases)
    extended = any(isinstance(f, mpmath.mpf) for f in phases)
    if extended:
        with mpmath.workprec(mp_precision_for(*phases)):
            shift_pi = to_pi_units(twin_phase(mpmath.mpf(repr(float(target_p)))))
    else:
        shift_pi = to_pi_units(twin_phase(target_p))
    half = nb_sequence(phases).pulses
    tail = tuple(p.shifted(shift_pi) for p in reversed(half))
    return CompositeSequence(half + tail, "pb", {"target_p": float(target_p), "twin_phase_pi": float(shift_pi)})


def _wimperis_angles(target_p, denom):
    check_probability(target_p)
    theta = 2.0 * math.asin(math.sqrt(target_p))
    return theta, math.acos(-theta / (denom * math.pi))


def wimperis_nb(target_p: float) -> CompositeSequence:
    """Wimperis narrowband sequence theta_0 B_phi C_-phi B_phi, theta applied first."""
    theta, phi = _wimperis_angles(target_p, 4.0)
    t, f = theta / math.pi, phi / math.pi
    pulses = (PulseSpec(t, 0.0), PulseSpec(1.0, f), PulseSpec(2.0, -f), PulseSpec(1.0, f))
    return CompositeSequence(pulses, "wimperis-nb", {"target_p": float(target_p), "theta_pi": t, "phi_pi": f})


def wimperis_pb(target_p: float) -> CompositeSequence:
    """Wimperis passband sequence theta_0 C_chi C_-chi C_-chi C_chi, theta applied first."""
    theta, chi = _wimperis_angles(target_p, 8.0)
    t, c = theta / math.pi, chi / math.pi
    pulses = (PulseSpec(t, 0.0), PulseSpec(2.0, c), PulseSpec(2.0, -c), PulseSpec(2.0, -c), PulseSpec(2.0, c))
    return CompositeSequence(pulses, "wimperis-pb", {"target_p": float(target_p), "theta_pi": t, "chi_pi": c})


def random_nb_sequence(n: int, rng: np.random.Generator) -> CompositeSequence:
    return nb_sequence(rng.uniform(0.0, 2.0 * math.pi, n - 1))
