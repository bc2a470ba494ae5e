import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cp_synth.analysis import (ExponentialSum, central_flatness_order, default_grid, excitation_profile,
                               finite_difference, hwhm, hwhm_measured, nb_reference_profile, pb_reference,
                               profile_csv, read_profile_csv, suppression_order, symbolic_u12, u12_derivative,
                               u12_mp, u12_taylor_mp)
from cp_synth.errors import InvalidArgumentError, NoCrossingError, NotSuppressedError, UnsupportedOrderError
from cp_synth.sequences import CompositeSequence, nb_sequence, random_nb_sequence, wimperis_nb
from cp_synth.solver import NbProblem, refine, solve_analytic
from cp_synth.su2 import PulseSpec


def _random_custom(rng, n):
    return CompositeSequence(tuple(PulseSpec(rng.uniform(0.1, 2), rng.uniform(0, 2)) for _ in range(n)))


def test_exponential_sum_algebra():
    x = ExponentialSum([1.0, -1.0], [0.5, 0.5])  # cos
    y = ExponentialSum([1.0, -1.0], [-0.5j, 0.5j])  # sin
    one = x * x + y * y
    assert len(one) == 1
    assert one(0.3) == pytest.approx(1.0)
    assert (x - x)(0.7) == 0
    assert (-x)(0.0) == pytest.approx(-1.0)
    assert y.derivative(1, 0.0) == pytest.approx(1.0)
    assert x.conj()(0.4) == pytest.approx(math.cos(0.4))
    assert x.bandwidth == 1.0


def test_symbolic_matches_direct(rng):
    for _ in range(100):
        seq = _random_custom(rng, int(rng.integers(1, 9)))
        u = symbolic_u12(seq)
        for e in (-0.8, 0.0, 0.4, 1.0):
            assert abs(u(e) - seq.propagator(e).b) < 1e-12


def test_derivative_against_richardson(rng):
    seq = _random_custom(rng, 5)
    f = lambda e: seq.propagator(e).b
    for order in (1, 2, 3):
        d = u12_derivative(seq, order, 0.3)
        fd = finite_difference(f, 0.3, order, 0.02)
        assert abs(d - fd) <= 1e-6 * max(1.0, abs(d))


def test_finite_difference_bad_order():
    with pytest.raises(UnsupportedOrderError):
        finite_difference(math.sin, 0.0, 7, 0.1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([4, 6, 8]), st.integers(0, 2 ** 32 - 1))
def test_even_derivatives_vanish_at_wing(n, seed):
    seq = random_nb_sequence(n, np.random.default_rng(seed))
    for k in (2, 4):
        assert abs(u12_derivative(seq, k, 1.0)) < 1e-8


def test_reference_profile_and_hwhm():
    assert nb_reference_profile(0.5, 2, 0.0) == 0.5
    for n in (2, 4, 6, 8):
        assert nb_reference_profile(1.0, n, hwhm(n)) == pytest.approx(0.5)
    assert hwhm(2) == pytest.approx(0.5)


def test_pb_reference():
    assert pb_reference(0.5, math.acos(math.sqrt(0.3)) * 2) == pytest.approx(0.3)


@pytest.mark.parametrize("p", [0.3, 1.0])
def test_analytic_n4_follows_cosine_law(p):
    seq = solve_analytic(NbProblem(4, p)).sequence()
    grid = default_grid(1001)
    prof = excitation_profile(seq, grid)
    assert np.max(np.abs(prof.probabilities - nb_reference_profile(p, 4, grid))) < 1e-12
    assert hwhm_measured(prof) == pytest.approx(hwhm(4), abs=1e-5)


def test_grid_checks():
    g = default_grid(11)
    assert np.array_equal(g, -g[::-1])
    with pytest.raises(InvalidArgumentError):
        excitation_profile(nb_sequence([1.0]), [0.0, 0.0])


def test_no_crossing():
    seq = nb_sequence([2 * math.acos(math.sqrt(0.5))])
    flat = excitation_profile(seq, np.linspace(-0.1, 0.1, 11))
    with pytest.raises(NoCrossingError):
        hwhm_measured(flat)


def test_mp_engines_agree(rng):
    seq = random_nb_sequence(6, rng)
    assert abs(complex(u12_mp(seq, 0.25)) - seq.propagator(0.25).b) < 1e-13
    jet = u12_taylor_mp(seq, 1, 3)
    for k in (1, 2, 3):
        assert abs(complex(jet[k]) - u12_derivative(seq, k, 1.0)) < 1e-9 * max(1, abs(jet[k]))


@pytest.mark.parametrize("n", [2, 4])
def test_suppression_order_short(n):
    seq = solve_analytic(NbProblem(n, 0.5)).sequence()
    assert suppression_order(seq, 1) == pytest.approx(2 * (n - 1), abs=0.05)


def test_suppression_order_extended_n4():
    sol = solve_analytic(NbProblem(4, 0.7))
    seq = nb_sequence(refine(sol, dps=40))
    assert suppression_order(seq, -1, dps=40) == pytest.approx(6, abs=0.05)


def test_not_suppressed():
    with pytest.raises(NotSuppressedError):
        suppression_order(wimperis_nb(0.5), 1)


def test_nb_flatness_is_quartic():
    seq = solve_analytic(NbProblem(4, 1.0)).sequence()
    quad = 3 * (math.pi / 2) ** 2
    assert central_flatness_order(seq, quad) == pytest.approx(4, abs=0.1)


def test_csv_round_trip():
    eps = np.linspace(-1, 1, 5)
    text = profile_csv(eps, {"a": eps ** 2, "b": np.cos(eps)})
    assert text.splitlines()[0] == "epsilon,a,b"
    back = read_profile_csv(text)
    assert np.allclose(back["epsilon"], eps) and np.allclose(back["b"], np.cos(eps), atol=1e-11)
