import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cp_synth.analysis import default_grid, excitation_profile
from cp_synth.errors import DomainError, InvalidArgumentError, SchemaError, UnsupportedLengthError
from cp_synth.sequences import (CompositeSequence, nb_sequence, pb_sequence, random_nb_sequence, twin_phase,
                                wimperis_nb, wimperis_pb)
from cp_synth.solver import NbProblem, solve_analytic
from cp_synth.su2 import PulseSpec


def test_nb_layout():
    seq = nb_sequence([0.1, 0.2, 0.3])
    assert seq.areas_pi == [0.5, 1.0, 1.0, 0.5]
    assert seq.phases_pi[0] == 0.0
    assert seq.phases == pytest.approx([0.0, 0.1, 0.2, 0.3])
    assert seq.total_half_area == pytest.approx(1.5 * math.pi)


@pytest.mark.parametrize("count", [0, 2, 4])
def test_nb_odd_length_rejected(count):
    with pytest.raises(UnsupportedLengthError):
        nb_sequence([0.1] * count)


def test_nb_structure_checked():
    with pytest.raises(InvalidArgumentError):
        CompositeSequence((PulseSpec(0.5, 0.2), PulseSpec(0.5, 0.0)), "nb")
    with pytest.raises(InvalidArgumentError):
        CompositeSequence((PulseSpec(0.5), PulseSpec(1.0)), "nb")


def test_unknown_family():
    with pytest.raises(InvalidArgumentError):
        CompositeSequence((PulseSpec(1.0),), "broadband")


def test_twin_phase_values():
    assert twin_phase(1.0) == 0.0
    assert twin_phase(0.0) == pytest.approx(math.pi)
    with pytest.raises(DomainError):
        twin_phase(1.5)


def test_pb_mirror_structure():
    half = solve_analytic(NbProblem(4, 0.5)).phases
    seq = pb_sequence(half, 0.3)
    assert len(seq) == 8
    first, second = seq.pulses[:4], seq.pulses[4:]
    shift = twin_phase(0.3) / math.pi
    for p, q in zip(reversed(first), second):
        assert q.area_pi == p.area_pi
        assert (q.phase_pi - p.phase_pi - shift) % 2 == pytest.approx(0.0, abs=1e-12) or \
            (q.phase_pi - p.phase_pi - shift) % 2 == pytest.approx(2.0, abs=1e-12)
    assert seq.meta["target_p"] == 0.3


def test_pb_bad_mirror_rejected():
    pulses = (PulseSpec(0.5, 0.0), PulseSpec(1.0, 0.3), PulseSpec(1.0, 0.9), PulseSpec(0.5, 0.1))
    with pytest.raises(InvalidArgumentError):
        CompositeSequence(pulses, "pb")


@pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.9, 1.0])
def test_wimperis_center_probability(p):
    for seq in (wimperis_nb(p), wimperis_pb(p)):
        assert seq.probability(0.0) == pytest.approx(p, abs=1e-12)


def test_wimperis_layout():
    seq = wimperis_nb(0.5)
    assert seq.areas_pi == pytest.approx([0.5, 1.0, 2.0, 1.0])
    f = seq.meta["phi_pi"]
    assert seq.phases_pi[1] == pytest.approx(f) and seq.phases_pi[2] == pytest.approx(2 - f)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).map(lambda k: 2 * k), st.integers(0, 2 ** 32 - 1))
def test_nb_profile_symmetric_and_wings_vanish(n, seed):
    seq = random_nb_sequence(n, np.random.default_rng(seed))
    prof = excitation_profile(seq, default_grid(201))
    assert prof.asymmetry() < 1e-12
    assert seq.probability(-1.0) < 1e-28 and seq.probability(1.0) < 1e-28


def test_json_round_trip():
    seq = pb_sequence(solve_analytic(NbProblem(4, 0.5)).phases, 0.7)
    back = CompositeSequence.from_dict(json.loads(json.dumps(seq.to_dict())))
    assert back == seq


@pytest.mark.parametrize("doc", [{}, {"phases_pi": [0.0], "areas_pi": []},
                                 {"phases_pi": ["x"], "areas_pi": [1.0]},
                                 {"phases_pi": [0.0], "areas_pi": [-1.0]},
                                 {"family": "nb", "phases_pi": [0.0, 0.1, 0.2], "areas_pi": [0.5, 1, 0.5]}])
def test_bad_documents(doc):
    with pytest.raises(SchemaError):
        CompositeSequence.from_dict(doc)
