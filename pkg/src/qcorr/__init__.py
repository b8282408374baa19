"""Entropic measures of nonclassical correlations for bipartite quantum states."""

from .entanglement import concurrence, entanglement_of_formation
from .measures import (
    MeasureReport,
    demon_discord,
    discord,
    m2b,
    m3b,
    measure_report,
    mid,
    quantum_mutual_information,
    wpm,
)
from .qmat import DensityMatrix, StateError, validate_density_matrix
from .states import bell_state, random_density, state_from_json, state_to_json

__version__ = "0.1.0"
