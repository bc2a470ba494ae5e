"""Exact error-dependence of U12, excitation profiles and profile metrics.

Every entry of a resonant pulse propagator is a two-term sum of complex
exponentials in the area error ``eps``, so the U12 entry of a whole sequence
is a finite sum ``sum_k c_k exp(i w_k eps)``.  Carrying that sum exactly gives
derivatives of any order in closed form, which the solver relies on.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .errors import (InvalidArgumentError, MetricUndefinedError, NoCrossingError, NotSuppressedError,
                     UnsupportedLengthError, UnsupportedOrderError)
from .sequences import CompositeSequence, check_probability
from .su2 import u12_on_grid

MAX_DERIVATIVE_ORDER = 40
FREQ_RTOL = 1e-12
COEFF_PRUNE = 1e-15


class ExponentialSum:
    """Finite sum ``sum_k c_k exp(i w_k eps)`` with distinct real frequencies."""

    __slots__ = ("freqs", "coeffs")

    def __init__(self, freqs, coeffs, merge=True):
        f = np.asarray(freqs, dtype=float).ravel()
        c = np.asarray(coeffs, dtype=complex).ravel()
        if f.shape != c.shape:
            raise InvalidArgumentError("frequency and coefficient arrays differ in length")
        if merge:
            f, c = _merge(f, c)
        self.freqs = f
        self.coeffs = c

    @classmethod
    def constant(cls, value) -> "ExponentialSum":
        return cls([0.0], [value])

    @property
    def terms(self) -> list:
        return list(zip(self.coeffs.tolist(), self.freqs.tolist()))

    def __len__(self):
        return self.freqs.size

    def __repr__(self):
        return f"ExponentialSum({len(self)} terms)"

    def __add__(self, other: "ExponentialSum") -> "ExponentialSum":
        return ExponentialSum(np.concatenate([self.freqs, other.freqs]),
                              np.concatenate([self.coeffs, other.coeffs]))

    def __neg__(self) -> "ExponentialSum":
        return ExponentialSum(self.freqs, -self.coeffs, merge=False)

    def __sub__(self, other: "ExponentialSum") -> "ExponentialSum":
        return self + (-other)

    def __mul__(self, other: "ExponentialSum") -> "ExponentialSum":
        f = np.add.outer(self.freqs, other.freqs)
        c = np.multiply.outer(self.coeffs, other.coeffs)
        return ExponentialSum(f, c)

    def conj(self) -> "ExponentialSum":
        """Complex conjugate as a function of real ``eps``."""
        return ExponentialSum(-self.freqs[::-1], np.conj(self.coeffs[::-1]), merge=False)

    def __call__(self, eps):
        eps = np.asarray(eps, dtype=float)
        phases = np.exp(1j * np.multiply.outer(eps, self.freqs))
        return phases @ self.coeffs

    def derivative(self, order: int, at: float) -> complex:
        if order < 0:
            raise UnsupportedOrderError("derivative order must be non-negative")
        if order > MAX_DERIVATIVE_ORDER:
            raise UnsupportedOrderError(
                f"derivative order {order} exceeds the supported limit of {MAX_DERIVATIVE_ORDER}")
        w = self.freqs
        return complex(np.sum(self.coeffs * (1j * w) ** order * np.exp(1j * w * at)))

    @property
    def bandwidth(self) -> float:
        return float(np.max(np.abs(self.freqs))) if len(self) else 0.0


def _merge(f, c):
    if f.size == 0:
        return f, c
    order = np.argsort(f, kind="stable")
    f, c = f[order], c[order]
    gaps = np.diff(f) > FREQ_RTOL * np.maximum(1.0, np.abs(f[1:]))
    starts = np.concatenate([[0], np.nonzero(gaps)[0] + 1])
    f = f[starts]
    c = np.add.reduceat(c, starts)
    keep = np.abs(c) >= COEFF_PRUNE
    return f[keep], c[keep]


def symbolic_propagator(seq: CompositeSequence):
    """Return ``(a, b)`` of the total propagator as exponential sums in eps."""
    a = ExponentialSum.constant(1.0)
    b = ExponentialSum([], [])
    for pulse in seq.pulses:
        w = 0.5 * math.pi * float(pulse.area_pi)
        up, down = np.exp(1j * w), np.exp(-1j * w)
        drive = np.exp(1j * pulse.phase)
        # cos(w(1+eps)) and -i sin(w(1+eps)) e^{i phi}
        ak = ExponentialSum([w, -w], [up / 2, down / 2])
        bk = ExponentialSum([w, -w], [-drive * up / 2, drive * down / 2])
        a, b = ak * a - bk * b.conj(), ak * b + bk * a.conj()
    return a, b


def symbolic_u12(seq: CompositeSequence) -> ExponentialSum:
    return symbolic_propagator(seq)[1]


def u12_derivative(seq: CompositeSequence, order: int, at: float) -> complex:
    """``d^order U12 / d eps^order`` at ``eps = at``."""
    if order > MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(
            f"derivative order {order} exceeds the supported limit of {MAX_DERIVATIVE_ORDER}")
    return symbolic_u12(seq).derivative(order, at)


_CENTRAL_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


def finite_difference(f: Callable, x: float, order: int, h: float, levels: int = 3):
    """Central finite difference of ``f`` at ``x`` with Richardson extrapolation.

    Each level halves ``h``; the stencils are second-order accurate so the
    table eliminates even powers of ``h``.
    """
    if order not in _CENTRAL_STENCILS:
        raise UnsupportedOrderError(f"finite differences implemented for orders 1-4, got {order}")
    stencil = _CENTRAL_STENCILS[order]

    def raw(step):
        return sum(w * f(x + k * step) for k, w in stencil) / step ** order

    table = [raw(h / 2 ** i) for i in range(levels)]
    for j in range(1, levels):
        factor = 4.0 ** j
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
    return table[0]


@dataclass(frozen=True)
class ProfileSample:
    epsilons: np.ndarray
    probabilities: np.ndarray
    sequence: CompositeSequence

    def __post_init__(self):
        if len(self.epsilons) != len(self.probabilities):
            raise InvalidArgumentError("epsilons and probabilities differ in length")

    def asymmetry(self) -> float:
        """max |P(eps) - P(-eps)|, valid for grids symmetric about zero."""
        if not np.allclose(self.epsilons, -self.epsilons[::-1], rtol=0.0, atol=1e-12):
            raise InvalidArgumentError("asymmetry needs a grid symmetric about eps = 0")
        return float(np.max(np.abs(self.probabilities - self.probabilities[::-1])))

    def to_csv(self) -> str:
        return profile_csv(self.epsilons, {"probability": self.probabilities})


def default_grid(points: int = 1001, eps_min: float = -1.0, eps_max: float = 1.0) -> np.ndarray:
    if points < 1:
        raise InvalidArgumentError("a profile grid needs at least one point")
    if points > 1 and not eps_max > eps_min:
        raise InvalidArgumentError("eps_max must exceed eps_min")
    grid = np.linspace(eps_min, eps_max, points)
    if eps_min == -eps_max:
        grid = 0.5 * (grid - grid[::-1])  # exact mirror symmetry
    return grid


def excitation_profile(seq: CompositeSequence, grid) -> ProfileSample:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise InvalidArgumentError("profile grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise InvalidArgumentError("profile grid must be strictly increasing")
    probs = np.clip(np.abs(u12_on_grid(seq.pulses, grid)) ** 2, 0.0, 1.0)
    return ProfileSample(grid, probs, seq)


def _check_even_n(n):
    if n < 2 or n % 2:
        raise UnsupportedLengthError(f"N must be an even integer >= 2, got {n}")


def nb_reference_profile(p: float, n: int, epsilon):
    """Closed-form NB profile p cos^(2(N-1))(pi eps / 2)."""
    check_probability(p, "p")
    _check_even_n(n)
    return p * np.cos(0.5 * np.pi * np.asarray(epsilon, dtype=float)) ** (2 * (n - 1))


def pb_reference(p_s: float, theta_twin: float) -> float:
    """Twinned probability 4 p_s (1 - p_s) cos^2(theta / 2)."""
    check_probability(p_s, "p_s")
    return 4.0 * p_s * (1.0 - p_s) * math.cos(0.5 * theta_twin) ** 2


def hwhm(n: int) -> float:
    _check_even_n(n)
    return math.acos(2.0 ** ((n - 2) / (n - 1)) - 1.0) / math.pi


def hwhm_measured(profile: ProfileSample) -> float:
    """Half-width at half-maximum on the positive-eps side, by linear interpolation."""
    eps, prob = profile.epsilons, profile.probabilities
    peak = int(np.argmax(prob))
    half = 0.5 * prob[peak]
    if half <= 0:
        raise NoCrossingError("profile is identically zero")
    below = np.nonzero(prob[peak:] < half)[0]
    if below.size == 0:
        raise NoCrossingError("profile never drops below half maximum on the positive side")
    j = peak + int(below[0])
    e0, e1, p0, p1 = eps[j - 1], eps[j], prob[j - 1], prob[j]
    crossing = e0 + (half - p0) * (e1 - e0) / (p1 - p0)
    return float(crossing - eps[peak])


# extended precision ---------------------------------------------------------

def _mp_pulse_angles(pulse):
    return mpmath.mpf(pulse.area_pi) * mpmath.pi / 2, mpmath.mpf(pulse.phase_pi) * mpmath.pi


def u12_mp(seq: CompositeSequence, epsilon):
    """U12 at ``epsilon`` in mpmath arithmetic at the current working precision.

    Areas and phases are promoted from their units-of-pi values, so areas
    such as 1/2 or 2 stay exact multiples of pi.
    """
    eps = mpmath.mpf(epsilon)
    a, b = mpmath.mpc(1), mpmath.mpc(0)
    for pulse in seq.pulses:
        w, phi = _mp_pulse_angles(pulse)
        x = w * (1 + eps)
        ak = mpmath.cos(x)
        bk = -1j * mpmath.sin(x) * mpmath.expjpi(mpmath.mpf(pulse.phase_pi))
        a, b = ak * a - bk * mpmath.conj(b), ak * b + bk * mpmath.conj(a)
    return b


def u12_taylor_mp(seq: CompositeSequence, at, order: int) -> list:
    """Derivatives ``[U12, U12', ..., U12^(order)]`` at ``at`` in mpmath.

    Uses truncated Taylor arithmetic on the 2x2 product, independent of the
    exponential-sum engine.
    """
    at = mpmath.mpf(at)
    k = order + 1
    fact = [mpmath.factorial(j) for j in range(k)]

    def mul(x, y):
        return [mpmath.fsum(x[i] * y[j - i] for i in range(j + 1)) for j in range(k)]

    a = [mpmath.mpc(1)] + [mpmath.mpc(0)] * order
    b = [mpmath.mpc(0)] * k
    for pulse in seq.pulses:
        w, _ = _mp_pulse_angles(pulse)
        x0 = w * (1 + at)
        drive = mpmath.expjpi(mpmath.mpf(pulse.phase_pi))
        cos_j = [mpmath.cos(x0 + j * mpmath.pi / 2) * w ** j / fact[j] for j in range(k)]
        sin_j = [mpmath.sin(x0 + j * mpmath.pi / 2) * w ** j / fact[j] for j in range(k)]
        ak = cos_j
        bk = [-1j * s * drive for s in sin_j]
        a_c = [mpmath.conj(t) for t in a]
        b_c = [mpmath.conj(t) for t in b]
        new_a = [u - v for u, v in zip(mul(ak, a), mul(bk, b_c))]
        new_b = [u + v for u, v in zip(mul(ak, b), mul(bk, a_c))]
        a, b = new_a, new_b
    return [b[j] * fact[j] for j in range(k)]


def suppression_order(seq: CompositeSequence, at: int = 1, dps: int = 60,
                      window=(1e-4, 1e-2), points: int = 20) -> float:
    """Exponent of the decay of P near ``eps = at`` (``at`` is +1 or -1).

    Fits the slope of log P against log|eps - at| on log-spaced points.  The
    probabilities are evaluated in extended precision; for long sequences the
    phases themselves must carry more than double precision (see
    ``solver.refine``), otherwise round-off in the phases caps the order.
    """
    if at not in (1, -1):
        raise InvalidArgumentError("suppression order is defined at eps = +1 or -1")
    with mpmath.workdps(dps):
        p_end = abs(u12_mp(seq, at)) ** 2
        if p_end > mpmath.mpf(10) ** (-dps // 2):
            raise NotSuppressedError(f"probability at eps={at} is {mpmath.nstr(p_end, 5)}, not zero")
        deltas = np.logspace(math.log10(window[0]), math.log10(window[1]), points)
        logs = []
        for d in deltas:
            eps = mpmath.mpf(at) - at * mpmath.mpf(d)
            logs.append(float(mpmath.log(abs(u12_mp(seq, eps)) ** 2)))
    slope, _ = np.polyfit(np.log(deltas), np.array(logs), 1)
    return float(slope)


def central_flatness_order(seq: CompositeSequence, quadratic_coefficient: float = 0.0,
                           window=(1e-3, 1e-2), points: int = 20) -> float:
    """Order of the leading deviation of P(eps) from P(0) (1 - q eps^2) near 0.

    With ``q = (N-1) (pi/2)^2`` an NB profile gives 4; a PB flat top gives 4
    with ``q = 0``.
    """
    sym = symbolic_u12(seq)
    eps = np.logspace(math.log10(window[0]), math.log10(window[1]), points)
    p0 = abs(sym(0.0)) ** 2
    dev = np.abs(np.abs(sym(eps)) ** 2 - p0 * (1.0 - quadratic_coefficient * eps ** 2))
    if np.any(dev <= 0):
        raise MetricUndefinedError("deviation vanishes on the fit window")
    slope, _ = np.polyfit(np.log(eps), np.log(dev), 1)
    return float(slope)


def profile_derivatives_at_zero(seq: CompositeSequence, orders=(1, 2, 3), h: float = 0.02) -> dict:
    """Finite-difference derivatives of P(eps) at eps = 0."""
    sym = symbolic_u12(seq)

    def prob(e):
        return abs(sym(e)) ** 2

    return {k: float(finite_difference(prob, 0.0, k, h)) for k in orders}


# CSV -----------------------------------------------------------------------

def profile_csv(epsilons, columns: dict) -> str:
    """CSV text: an ``epsilon`` column followed by the given columns, 12 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(["epsilon", *names])
    for i, e in enumerate(epsilons):
        writer.writerow([f"{float(e):.12g}", *(f"{float(columns[n][i]):.12g}" for n in names)])
    return buf.getvalue()


def read_profile_csv(text: str) -> dict:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "epsilon":
        raise InvalidArgumentError("profile CSV must start with an 'epsilon' header")
    header = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}
