"""Discrete-time IQC/SDP verification baseline for NN feedback loops under
delays and elementwise interval uncertainty."""

from .assemble import ExtendedRealization, assemble_extended
from .discretize import DiscreteSystem, discretize
from .filters import (
    build_composite_filter,
    build_delay_filter,
    delay_multiplier,
    interval_multiplier,
)
from .lft import DiscretePlantLft, build_plant_lft, interval_basis
from .loading import IntervalSystem, Network, load_network, load_system
from .nn_qc import build_nn_qc, local_slopes, propagate_boxes, selection_maps
from .pipeline import build_setup, verify_system
from .sim import simulate_closed_loop
from .verify import VerificationResult, verify_lmi

__version__ = "0.1.0"
