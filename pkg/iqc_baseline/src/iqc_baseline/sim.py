"""Discrete closed-loop simulation used to cross-check feasible certificates.

Simulates the sampled-uncertainty loop with true delays and zero pre-history,
reconstructs the filter state, the port signals, and the stacked activations,
and evaluates the Lyapunov function V = zeta^T P zeta along the trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretize import DiscreteSystem
from .filters import CompositeFilter
from .lft import DiscretePlantLft
from .loading import Network


@dataclass(frozen=True)
class LoopTrace:
    states: np.ndarray      # (steps+1, n)
    v_values: np.ndarray    # (steps+1,) Lyapunov values (when P given)
    r_tau: np.ndarray       # (steps, r_tau_dim) delay-channel residuals


def simulate_closed_loop(disc: DiscreteSystem, lft: DiscretePlantLft,
                         composite: CompositeFilter, net: Network | None,
                         theta: np.ndarray, x0: np.ndarray, steps: int,
                         p_matrix: np.ndarray | None = None) -> LoopTrace:
    """theta: per-channel scalars with |theta_j| <= rho_j (post-Euler scale).

    The pre-history is zero, matching the filter's zero initial state, so the
    delay residuals vanish identically on the exact loop.
    """
    n, m = disc.n, disc.m
    s_tot = disc.s_tot
    if theta.shape != (s_tot,):
        raise ValueError(f"theta must have {s_tot} entries")
    d_max = max(disc.delays, default=0)
    xs = np.zeros((steps + d_max + 1, n))
    us = np.zeros((steps + d_max + 1, m))
    xs[d_max] = x0
    if net is not None:
        us[d_max] = net.forward(disc.c @ x0)

    f = composite.filt
    psi = np.zeros(f.n_states)
    v_values = np.zeros(steps + 1)
    r_tau_hist = np.zeros((steps, composite.r_tau_dim))

    def ports(k):
        "Current p and q, with q_tau the true delayed stacks."
        p_tau = []
        q_tau = []
        for _, _, d in disc.delayed:
            p_tau.append(np.concatenate([xs[k], us[k]]))
            q_tau.append(np.concatenate([xs[k - d], us[k - d]]))
        p_tau = np.concatenate(p_tau) if p_tau else np.zeros(0)
        q_tau = np.concatenate(q_tau) if q_tau else np.zeros(0)
        p_theta = []
        for ch in disc.channels:
            if ch.term == 0:
                p_theta.append(xs[k])
            else:
                d = disc.delayed[ch.term - 1][2]
                p_theta.append(xs[k - d])
        p_theta = np.concatenate(p_theta) if p_theta else np.zeros(0)
        q_theta = np.concatenate([theta[j] * p_theta[j * n:(j + 1) * n]
                                  for j in range(s_tot)]) if s_tot else np.zeros(0)
        return (np.concatenate([p_tau, p_theta]),
                np.concatenate([q_tau, q_theta]))

    for step in range(steps):
        k = d_max + step
        p_vec, q_vec = ports(k)
        if p_matrix is not None:
            zeta = np.concatenate([xs[k], psi])
            v_values[step] = float(zeta @ p_matrix @ zeta)
        psi, r_vec = f.step(psi, p_vec, q_vec)
        r_tau_hist[step] = r_vec[:composite.r_tau_dim]
        # plant update through the LFT blocks
        u_k = us[k]
        xs[k + 1] = lft.a_g @ xs[k] + lft.b_g1 @ q_vec + lft.b_g2 @ u_k
        if net is not None:
            us[k + 1] = net.forward(disc.c @ xs[k + 1])
    if p_matrix is not None:
        zeta = np.concatenate([xs[d_max + steps], psi])
        v_values[steps] = float(zeta @ p_matrix @ zeta)
    return LoopTrace(xs[d_max:], v_values, r_tau_hist)
