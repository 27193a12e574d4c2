"""Dynamical memory effects in classically correlated random-telegraph dephasing channels."""
from .channels import (
    CorrelatedMapSpec,
    DephasingParams,
    PauliProbabilities,
    apply_single_qubit,
    apply_two_qubit,
    certify_cptp,
    choi_matrix,
    dephasing_spec,
    evolution_matrix,
    evolve_closed_form,
    gamma,
    joint_probs,
    pauli_probs,
    phi,
)
from .measures import (
    Candidate,
    MeasureResult,
    TimeGrid,
    TimeSeries,
    blp_measure,
    concurrence,
    entanglement_measure,
    measure_sweep,
    positive_increment_sum,
    revival_intervals,
    trace_distance,
)
from .states import RngStream, bell_state, haar_unitary, plus_minus_state, sample_state, validate

__version__ = "0.1.0"
