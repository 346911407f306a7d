"""Plant LFT assembly: delay ports and elementwise interval ports.

Port layout (fixed everywhere in this package):

    p = [p_tau | p_theta],  q = [q_tau | q_theta]

p_tau stacks [x_k; u_k] once per delay channel; the delay block returns
q_tau = p_tau delayed.  p_theta repeats the state sample seen by each scalar
uncertainty channel (x_k for instantaneous entries, x_{k-d_i} for delayed
ones, the latter read out of q_tau); q_theta = theta * p_theta feeds back
through the basis matrices stacked in E.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretize import DiscreteSystem


@dataclass(frozen=True)
class DiscretePlantLft:
    """Assembled plant blocks.

    The interval ports are normalized: B_G1's q_theta columns carry the
    physical radii (rho_j times the unit basis), so the uncertainty scalars
    seen at the ports satisfy |theta_j| <= 1.  This keeps the SDP data well
    scaled; `rho` still records the physical radii for reporting and for the
    unnormalized multiplier definition.
    """
    a_g: np.ndarray
    b_g1: np.ndarray
    b_g2: np.ndarray
    c_g: np.ndarray
    d_g1: np.ndarray
    d_g2: np.ndarray
    n: int
    m: int
    ell: int          # delay channels
    s_tot: int        # scalar interval channels
    rho: np.ndarray   # physical per-channel radii (before normalization)

    @property
    def dim_p_tau(self) -> int:
        return self.ell * (self.n + self.m)

    @property
    def dim_p_theta(self) -> int:
        return self.n * self.s_tot

    @property
    def dim_q(self) -> int:
        return self.dim_p_tau + self.dim_p_theta


def interval_basis(disc: DiscreteSystem) -> tuple[np.ndarray, np.ndarray]:
    "E stacks the unit basis matrix of every uncertain entry; rho the radii."
    n = disc.n
    s = disc.s_tot
    e = np.zeros((n, n * s))
    rho = np.zeros(s)
    for j, ch in enumerate(disc.channels):
        e[ch.row, j * n + ch.col] = 1.0
        rho[j] = ch.rho
    return e, rho


def build_plant_lft(disc: DiscreteSystem) -> DiscretePlantLft:
    n, m = disc.n, disc.m
    ell = len(disc.delayed)
    s = disc.s_tot
    np_tau = ell * (n + m)
    np_theta = n * s
    nq = np_tau + np_theta

    e_mat, rho = interval_basis(disc)
    e_scaled = e_mat.copy()
    for j in range(s):
        e_scaled[:, j * n:(j + 1) * n] *= rho[j]   # unit-radius channels
    # state update: nominal delayed blocks act on q_tau, scaled E on q_theta
    b_g1 = np.zeros((n, nq))
    for i, (a_d, b_d, _) in enumerate(disc.delayed):
        col = i * (n + m)
        b_g1[:, col:col + n] = a_d
        b_g1[:, col + n:col + n + m] = b_d
    b_g1[:, np_tau:] = e_scaled
    b_g2 = np.zeros((n, m))

    # p_tau = ones(ell) kron [x; u]
    c_tau = np.kron(np.ones((ell, 1)), np.vstack([np.eye(n), np.zeros((m, n))]))
    d_g2_tau = np.kron(np.ones((ell, 1)), np.vstack([np.zeros((n, m)), np.eye(m)]))

    # p_theta: instantaneous channels replicate x_k, delayed channels read
    # x_{k-d_i} out of the matching q_tau block
    c_theta = np.zeros((np_theta, n))
    d_theta_from_q = np.zeros((np_theta, nq))
    for j, ch in enumerate(disc.channels):
        row = j * n
        if ch.term == 0:
            c_theta[row:row + n, :] = np.eye(n)
        else:
            col = (ch.term - 1) * (n + m)
            d_theta_from_q[row:row + n, col:col + n] = np.eye(n)

    c_g = np.vstack([c_tau, c_theta]) if np_theta or np_tau else np.zeros((0, n))
    d_g1 = np.vstack([np.zeros((np_tau, nq)), d_theta_from_q])
    d_g2 = np.vstack([d_g2_tau, np.zeros((np_theta, m))])
    return DiscretePlantLft(disc.a0, b_g1, b_g2, c_g, d_g1, d_g2,
                            n, m, ell, s, rho)
