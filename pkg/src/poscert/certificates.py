"""Positivity-based stability certificates for the three risk configurations.

C1: interval uncertainty, no delay.   Lower closed loop Metzler + upper
    closed loop Hurwitz.
C2: exact plant, delays.              Per-channel positivity at the lower
    sector + delay-free upper "DC" matrix Hurwitz; verdict holds for every
    delay, the delay only scales the reported decay rate.
C3: intervals and delays combined.    Lower-endpoint positivity + upper-
    endpoint DC Hurwitz; subsumes the other two.

Each certificate carries quantitative witnesses: the positive vector v and
margin eps with H^T v <= -eps v, the shift gain beta, and the decay rate
eps / (1 + beta tau).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ShapeError
from .ffnn import SectorBound
from .lp import perron_witness
from .lure import DelayedLureSystem
from .matrices import DEFAULT_TOL, is_metzler, is_nonnegative

CERTIFIED = "certified"
NOT_CERTIFIED = "not_certified"

# Condition (I) of the delayed certificates applies the lower sector bound to
# every channel; the report records that reading explicitly.
GAMMA_READING_NOTE = "positivity condition uses gamma1 (lower sector) on every channel"


@dataclass(frozen=True)
class Certificate:
    verdict: str
    configuration: str
    metzler_matrix: np.ndarray
    hurwitz_matrix: np.ndarray
    perron_vector: np.ndarray | None
    margin: float | None            # eps with H^T v <= -eps v
    beta: float | None              # delayed-shift gain max_j (M^T v)_j / v_j
    decay_rate: float | None        # eps / (1 + beta * max tau); eps if no delay
    decay_rates: dict = field(default_factory=dict)  # per supplied tau
    failure_reasons: tuple = ()
    wall_time: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "configuration": self.configuration,
            "metzler_matrix": self.metzler_matrix.tolist(),
            "hurwitz_matrix": self.hurwitz_matrix.tolist(),
            "perron_vector": None if self.perron_vector is None
                             else self.perron_vector.tolist(),
            "epsilon": self.margin,
            "beta": self.beta,
            "decay_rate": self.decay_rate,
            "decay_rates": {str(tau): rate for tau, rate in self.decay_rates.items()},
            "failure_reasons": list(self.failure_reasons),
            "wall_time_seconds": self.wall_time,
            "notes": dict(self.notes),
        }


def beta_constant(m: np.ndarray, v: np.ndarray) -> float:
    "max_j (M^T v)_j / v_j: bounds w^T x by beta v^T x on the positive cone."
    return float(np.max((m.T @ v) / v))


def _check_sector_shape(sys: DelayedLureSystem, sector: SectorBound):
    if not sys.terms:
        return  # no input channels: the sector never enters the closed loop
    if sector.gamma1.shape != (sys.m, sys.p) or sector.gamma2.shape != (sys.m, sys.p):
        raise ShapeError(f"sector shape {sector.gamma1.shape} != ({sys.m}, {sys.p})")


def certify_c1(sys: DelayedLureSystem, sector: SectorBound,
               tol: float = DEFAULT_TOL) -> Certificate:
    """Delay-free interval certificate: sum the endpoint matrices, close the
    loop at each sector edge, and test Metzler (lower) / Hurwitz (upper)."""
    if not sys.is_delay_free:
        raise ConfigurationError(
            "system has nonzero delays; use certify_c3 for the combined case")
    _check_sector_shape(sys, sector)
    start = time.perf_counter()
    if sys.terms:
        b = sys.b_total
        lower = sys.lower_sum() + b @ sector.gamma1 @ sys.c
        upper = sys.upper_sum() + b @ sector.gamma2 @ sys.c
    else:
        lower = sys.lower_sum()
        upper = sys.upper_sum()
    reasons = []
    if not is_metzler(lower, tol):
        reasons.append("metzler")
    witness = perron_witness(upper) if is_metzler(upper, tol) else None
    if witness is None:
        reasons.append("hurwitz")
    elapsed = time.perf_counter() - start
    if reasons:
        return Certificate(NOT_CERTIFIED, "C1", lower, upper, None, None, None,
                           None, {}, tuple(reasons), elapsed)
    return Certificate(CERTIFIED, "C1", lower, upper, witness.vector,
                       witness.epsilon, 0.0, witness.epsilon,
                       {0.0: witness.epsilon}, (), elapsed)


def _certify_delayed(sys: DelayedLureSystem, sector: SectorBound, tol: float,
                     configuration: str, use_upper_endpoint: bool) -> Certificate:
    "Shared body of the delayed certificates (exact plant or interval endpoints)."
    _check_sector_shape(sys, sector)
    start = time.perf_counter()
    b = sys.b_total
    g1 = sector.gamma1
    g2 = sector.gamma2
    reasons = []
    if not is_metzler(sys.a0.lower, tol):
        reasons.append("metzler")
    for k, term in enumerate(sys.terms):
        if not is_nonnegative(term.b, tol):
            reasons.append(f"input_nonneg[{k}]")
    if not is_nonnegative(sys.c, tol):
        reasons.append("output_nonneg")
    shift = np.zeros((sys.n, sys.n))  # sum of A_i + B_i gamma2 C over delayed channels
    lower_closed = sys.a0.lower.copy()
    for k, term in enumerate(sys.terms):
        a_lo = term.a.lower
        a_hi = term.a.upper if use_upper_endpoint else term.a.lower
        closed_lo = a_lo + term.b @ g1 @ sys.c
        if not is_nonnegative(closed_lo, tol):
            reasons.append(f"positivity[{k}]")
        closed_hi = a_hi + term.b @ g2 @ sys.c
        if not is_nonnegative(closed_hi, tol):
            # the decay argument needs the upper-sector shift nonnegative too;
            # automatic when m = p = 1, checked explicitly for matrix sectors
            reasons.append(f"upper_shift_nonneg[{k}]")
        shift += closed_hi
        lower_closed += closed_lo
    a0_hi = sys.a0.upper if use_upper_endpoint else sys.a0.lower
    h = a0_hi + shift
    witness = perron_witness(h) if is_metzler(h, tol) else None
    if witness is None:
        reasons.append("hurwitz")
    elapsed = time.perf_counter() - start
    notes = {"gamma_reading": GAMMA_READING_NOTE}
    if reasons:
        return Certificate(NOT_CERTIFIED, configuration, lower_closed, h, None,
                           None, None, None, {}, tuple(reasons), elapsed, notes)
    v, eps = witness.vector, witness.epsilon
    beta = max(beta_constant(shift, v), 0.0) if sys.terms else 0.0
    rates = {tau: eps / (1.0 + beta * tau) for tau in sys.taus}
    decay = eps / (1.0 + beta * sys.max_tau)
    return Certificate(CERTIFIED, configuration, lower_closed, h, v, eps, beta,
                       decay, rates, (), elapsed, notes)


def certify_c2(sys: DelayedLureSystem, sector: SectorBound,
               tol: float = DEFAULT_TOL) -> Certificate:
    """Delay-only certificate for an exact (degenerate-interval) plant.

    Certifies for every delay; the supplied tau values only enter the
    reported decay rates eps / (1 + beta tau)."""
    if not sys.is_degenerate:
        raise ConfigurationError(
            "system has non-degenerate intervals; use certify_c3 for the combined case")
    return _certify_delayed(sys, sector, tol, "C2", use_upper_endpoint=False)


def certify_c3(sys: DelayedLureSystem, sector: SectorBound,
               tol: float = DEFAULT_TOL) -> Certificate:
    """Combined delay + interval certificate (general case)."""
    return _certify_delayed(sys, sector, tol, "C3", use_upper_endpoint=True)


def certify(sys: DelayedLureSystem, sector: SectorBound, configuration: str = "auto",
            tol: float = DEFAULT_TOL) -> Certificate:
    "Dispatch on requested configuration; 'auto' picks from delays/intervals."
    configuration = configuration.lower()
    if configuration == "auto":
        if sys.is_delay_free:
            configuration = "c1"
        elif sys.is_degenerate:
            configuration = "c2"
        else:
            configuration = "c3"
    if configuration == "c1":
        return certify_c1(sys, sector, tol)
    if configuration == "c2":
        return certify_c2(sys, sector, tol)
    if configuration == "c3":
        return certify_c3(sys, sector, tol)
    raise ConfigurationError(f"unknown configuration {configuration!r}")
