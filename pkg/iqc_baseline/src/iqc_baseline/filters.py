"""IQC filters: delay lines per channel and the memoryless interval filter.

Each d-step delay channel carries the filter

    psi_{k+1} = (J_d kron I) psi_k + (e_1 kron I) p(k)
    r(k)      = (e_d^T kron -I) psi_k + q(k)

whose output vanishes identically when q is the true d-step delay of p; its
multiplier is the identity.  The interval filter has no state and simply
exposes r = [p_theta; q_theta] for the per-channel symmetric-box multiplier
diag(rho^2 I, -I).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lft import DiscretePlantLft


@dataclass(frozen=True)
class IqcFilter:
    "State-space filter blocks mapping (p, q) to the constrained signal r."
    a_psi: np.ndarray
    b_psi1: np.ndarray   # acts on p
    b_psi2: np.ndarray   # acts on q
    c_psi: np.ndarray
    d_psi1: np.ndarray
    d_psi2: np.ndarray

    @property
    def n_states(self) -> int:
        return self.a_psi.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.c_psi.shape[0]

    def step(self, psi, p, q):
        "One filter update; returns (psi_next, r)."
        r = self.c_psi @ psi + self.d_psi1 @ p + self.d_psi2 @ q
        return self.a_psi @ psi + self.b_psi1 @ p + self.b_psi2 @ q, r


def downshift(d: int) -> np.ndarray:
    j = np.zeros((d, d))
    for a in range(1, d):
        j[a, a - 1] = 1.0
    return j


def build_delay_filter(d: int, n_tau: int) -> IqcFilter:
    "Delay-line filter for one channel of width n_tau with integer delay d."
    if d < 1:
        raise ValueError(f"delay steps must be >= 1, got {d}")
    eye = np.eye(n_tau)
    a = np.kron(downshift(d), eye)
    b1 = np.kron(np.eye(d)[:, [0]], eye)          # e_1 kron I
    b2 = np.zeros((d * n_tau, n_tau))
    c = np.kron(-np.eye(d)[[d - 1], :], eye)      # e_d^T kron -I
    d1 = np.zeros((n_tau, n_tau))
    d2 = eye.copy()
    return IqcFilter(a, b1, b2, c, d1, d2)


def delay_multiplier(n_tau: int) -> np.ndarray:
    return np.eye(n_tau)


def interval_multiplier(rho: np.ndarray, mu: np.ndarray, n: int) -> np.ndarray:
    "blkdiag over channels of mu_j [rho_j^2 I, 0; 0, -I], in [p; q] order."
    top = np.kron(np.diag(mu * rho ** 2), np.eye(n))
    bottom = -np.kron(np.diag(mu), np.eye(n))
    s = rho.shape[0] * n
    out = np.zeros((2 * s, 2 * s))
    out[:s, :s] = top
    out[s:, s:] = bottom
    return out


@dataclass(frozen=True)
class CompositeFilter:
    "Stacked delay filters plus the memoryless interval pass-through."
    filt: IqcFilter
    r_tau_dim: int      # leading rows of r covered by the delay channels
    r_theta_dim: int    # trailing rows: [p_theta; q_theta]

    @property
    def n_states(self) -> int:
        return self.filt.n_states


def build_composite_filter(lft: DiscretePlantLft, delays) -> CompositeFilter:
    """Block-assemble the per-channel delay filters with the interval
    pass-through; input ports follow the plant's [p_tau | p_theta] and
    [q_tau | q_theta] layout."""
    n_tau = lft.n + lft.m
    np_tau = lft.dim_p_tau
    np_theta = lft.dim_p_theta
    n_p = np_tau + np_theta
    n_q = lft.dim_q
    parts = [build_delay_filter(d, n_tau) for d in delays]
    n_states = sum(f.n_states for f in parts)
    r_tau = len(parts) * n_tau
    r_theta = 2 * np_theta
    n_r = r_tau + r_theta

    a = np.zeros((n_states, n_states))
    b1 = np.zeros((n_states, n_p))
    b2 = np.zeros((n_states, n_q))
    c = np.zeros((n_r, n_states))
    d1 = np.zeros((n_r, n_p))
    d2 = np.zeros((n_r, n_q))
    srow = 0
    for i, f in enumerate(parts):
        ns = f.n_states
        pcol = i * n_tau
        rrow = i * n_tau
        a[srow:srow + ns, srow:srow + ns] = f.a_psi
        b1[srow:srow + ns, pcol:pcol + n_tau] = f.b_psi1
        c[rrow:rrow + n_tau, srow:srow + ns] = f.c_psi
        d2[rrow:rrow + n_tau, pcol:pcol + n_tau] = f.d_psi2
        srow += ns
    # interval rows: r_theta = [p_theta; q_theta]
    d1[r_tau:r_tau + np_theta, np_tau:] = np.eye(np_theta)
    d2[r_tau + np_theta:, np_tau:] = np.eye(np_theta)
    return CompositeFilter(IqcFilter(a, b1, b2, c, d1, d2), r_tau, r_theta)
