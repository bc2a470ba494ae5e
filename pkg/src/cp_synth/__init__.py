"""Narrowband and passband composite pulses with arbitrary target transition probability."""
from .su2 import Propagator, PulseSpec, compose, pulse_propagator, transition_probability
from .sequences import CompositeSequence, nb_sequence, pb_sequence, wimperis_nb, wimperis_pb
from .analysis import (ExponentialSum, ProfileSample, excitation_profile, hwhm, hwhm_measured,
                       nb_reference_profile, pb_reference, suppression_order, symbolic_u12, u12_derivative)
from .solver import (NbProblem, NbSolution, SolverOptions, residuals, solve_analytic, solve_nb,
                     verify_reference_table)

__version__ = "0.1.0"
