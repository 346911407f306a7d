"""Forward-Euler discretization at the interval centers.

The continuous interval system

    dx/dt = [A0] x(t) + sum_i [Ai] x(t - tau_i) + B_i u(t - tau_i)

becomes  x_{k+1} = (I + h A0c) x_k + sum_i h Aic x_{k-d_i} + h B_i u_{k-d_i},
with d_i = tau_i / h required integer.  Interval half-widths scale by h and
feed the elementwise uncertainty channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .loading import InputError, IntervalSystem


@dataclass(frozen=True)
class UncertainEntry:
    "One scalar uncertainty channel: entry (row, col) of delay block `term`."
    term: int     # 0 for the instantaneous matrix, 1.. for delayed blocks
    row: int
    col: int
    rho: float    # radius after Euler scaling (h * half-width)


@dataclass(frozen=True)
class DiscreteSystem:
    h: float
    a0: np.ndarray                 # I + h A0c
    delayed: tuple                 # of (h Aic, h Bi, d_i)
    c: np.ndarray
    channels: tuple                # of UncertainEntry
    n: int
    m: int

    @property
    def delays(self) -> tuple:
        return tuple(d for _, _, d in self.delayed)

    @property
    def s_tot(self) -> int:
        return len(self.channels)


def _delay_count(tau: float, h: float) -> int:
    ratio = tau / h
    d = round(ratio)
    if abs(ratio - d) > 1e-9 * max(1.0, abs(ratio)):
        raise InputError(f"delay {tau} is not an integer multiple of step {h}")
    return int(d)


def discretize(sys: IntervalSystem, h: float) -> DiscreteSystem:
    if h <= 0:
        raise InputError(f"step must be positive, got {h}")
    n = sys.n
    a0c = 0.5 * (sys.a0_lower + sys.a0_upper)
    channels = []
    for i, j in np.argwhere(sys.a0_upper > sys.a0_lower):
        rho = 0.5 * h * (sys.a0_upper[i, j] - sys.a0_lower[i, j])
        channels.append(UncertainEntry(0, int(i), int(j), float(rho)))
    delayed = []
    for k, (a_lo, a_hi, b, tau) in enumerate(sys.terms):
        d = _delay_count(tau, h)
        if d < 1:
            raise InputError(f"terms[{k}]: the delay port needs d >= 1 "
                             f"(tau={tau}, h={h})")
        delayed.append((h * 0.5 * (a_lo + a_hi), h * b, d))
        for i, j in np.argwhere(a_hi > a_lo):
            rho = 0.5 * h * (a_hi[i, j] - a_lo[i, j])
            channels.append(UncertainEntry(k + 1, int(i), int(j), float(rho)))
    return DiscreteSystem(h, np.eye(n) + h * a0c, tuple(delayed), sys.c,
                          tuple(channels), n, sys.m)
