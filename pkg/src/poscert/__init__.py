"""Positivity-based stability certification of neural-network feedback loops
under state/input delays and elementwise interval uncertainty."""

from .certificates import Certificate, certify, certify_c1, certify_c2, certify_c3
from .ffnn import (
    FFNN,
    Activation,
    InputBox,
    SectorBound,
    activation_sector,
    forward,
    load_ffnn,
    network_sector,
    propagate_boxes,
    propagate_sectors,
)
from .lp import LpProblem, LpSolution, PerronWitness, perron_witness, solve
from .lure import (
    DelayedLureSystem,
    DelayTerm,
    check_assumption1,
    check_lure_positivity,
    load_system,
)
from .matrices import (
    IntervalMatrix,
    interval_contains,
    is_metzler,
    is_nonnegative,
    metzler_spectral_abscissa,
)
from .simulate import ConvergenceReport, SimConfig, Trajectory, monte_carlo, simulate

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "Certificate",
    "ConvergenceReport",
    "DelayTerm",
    "DelayedLureSystem",
    "FFNN",
    "InputBox",
    "IntervalMatrix",
    "LpProblem",
    "LpSolution",
    "PerronWitness",
    "SectorBound",
    "SimConfig",
    "Trajectory",
    "activation_sector",
    "certify",
    "certify_c1",
    "certify_c2",
    "certify_c3",
    "check_assumption1",
    "check_lure_positivity",
    "forward",
    "interval_contains",
    "is_metzler",
    "is_nonnegative",
    "load_ffnn",
    "load_system",
    "metzler_spectral_abscissa",
    "monte_carlo",
    "network_sector",
    "perron_witness",
    "propagate_boxes",
    "propagate_sectors",
    "simulate",
    "solve",
]
