import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cp_synth.errors import InvalidArgumentError, InvalidPulseError
from cp_synth.su2 import (IDENTITY, Propagator, PulseSpec, compose, propagate, pulse_propagator,
                          transition_probability, u12_on_grid, wrap_pi_units)

areas = st.floats(0.0, 4.0, allow_nan=False)
phases = st.floats(-4.0, 4.0, allow_nan=False)
errors = st.floats(-1.0, 1.0, allow_nan=False)


def test_pi_pulse_at_zero_phase():
    u = pulse_propagator(PulseSpec(1.0, 0.0), 0.0)
    assert abs(u.a) < 1e-15
    assert abs(u.b - (-1j)) < 1e-15


def test_half_pi_pulse_probability():
    assert transition_probability(pulse_propagator(PulseSpec(0.5), 0.0)) == pytest.approx(0.5, abs=1e-15)


def test_ordering_half_pi_then_shifted_half_pi_undoes():
    # a pi/2 pulse followed by a pi/2 pulse of opposite phase returns to the pole
    u = propagate([PulseSpec(0.5, 0.0), PulseSpec(0.5, 1.0)], 0.0)
    assert abs(u.b) < 1e-15
    assert abs(abs(u.a) - 1.0) < 1e-15


def test_compose_is_chronological():
    u1 = pulse_propagator(PulseSpec(0.5, 0.0), 0.1)
    u2 = pulse_propagator(PulseSpec(1.0, 0.3), 0.1)
    expected = u2.matrix @ u1.matrix
    assert np.allclose(compose([u1, u2]).matrix, expected, atol=1e-15)
    assert not np.allclose(compose([u2, u1]).matrix, expected, atol=1e-6)


def test_compose_empty_raises():
    with pytest.raises(InvalidArgumentError):
        compose([])


@pytest.mark.parametrize("area", [-0.1, float("nan"), float("inf")])
def test_bad_areas_rejected(area):
    with pytest.raises(InvalidPulseError):
        PulseSpec(area)


def test_zero_area_is_identity():
    u = pulse_propagator(PulseSpec(0.0, 0.7), 0.3)
    assert u == IDENTITY or (abs(u.a - 1) < 1e-15 and abs(u.b) < 1e-15)


def test_phase_wrapping():
    assert PulseSpec(1.0, -0.5).phase_pi == pytest.approx(1.5)
    assert wrap_pi_units(-1e-18) == 0.0
    x = wrap_pi_units(mpmath.mpf("-0.25"))
    assert isinstance(x, mpmath.mpf) and x == mpmath.mpf("1.75")


def test_random_products_stay_unitary(rng):
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 12))
        pulses = [PulseSpec(rng.uniform(0, 3), rng.uniform(0, 2)) for _ in range(n)]
        u = propagate(pulses, rng.uniform(-1, 1))
        m = u.matrix
        worst = max(worst, u.unitarity_defect(), float(np.max(np.abs(m @ m.conj().T - np.eye(2)))))
        assert abs(np.linalg.det(m) - 1.0) < 1e-12
    assert worst < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(areas, phases), min_size=1, max_size=8), phases, errors)
def test_global_phase_shift_leaves_probability(pulses, shift, eps):
    base = [PulseSpec(a, f) for a, f in pulses]
    moved = [p.shifted(shift) for p in base]
    assert transition_probability(propagate(moved, eps)) == pytest.approx(
        transition_probability(propagate(base, eps)), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(areas, phases, errors)
def test_error_scales_area(area, phase, eps):
    u = pulse_propagator(PulseSpec(area, phase), eps)
    v = pulse_propagator(PulseSpec(area * (1 + eps), phase), 0.0)
    assert abs(u.a - v.a) < 1e-12 and abs(u.b - v.b) < 1e-12


def test_matrix_form():
    u = pulse_propagator(PulseSpec(0.7, 0.4), 0.0)
    half = 0.35 * math.pi
    expected = np.array([[math.cos(half), -1j * math.sin(half) * cmath.exp(0.4j * math.pi)],
                         [-1j * math.sin(half) * cmath.exp(-0.4j * math.pi), math.cos(half)]])
    assert np.allclose(u.matrix, expected, atol=1e-15)


def test_grid_matches_scalar(rng):
    pulses = [PulseSpec(rng.uniform(0, 2), rng.uniform(0, 2)) for _ in range(6)]
    eps = np.linspace(-1, 1, 41)
    grid = u12_on_grid(pulses, eps)
    assert np.allclose(grid, [propagate(pulses, e).b for e in eps], atol=1e-14)


def test_propagator_product_identity():
    u = Propagator(0.6 + 0j, 0.8j)
    assert (u @ IDENTITY) == u
