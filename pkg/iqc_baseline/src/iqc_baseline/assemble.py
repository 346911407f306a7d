"""Extended realization: plant and composite filter share one state vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import CompositeFilter
from .lft import DiscretePlantLft


@dataclass(frozen=True)
class ExtendedRealization:
    """zeta_{k+1} = A zeta + B [q; u],  r = C zeta + D [q; u]
    with zeta = [x; psi] and input columns ordered [q_tau | q_theta | u]."""
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    n_plant: int
    n_states: int
    n_q: int
    n_u: int
    r_tau_dim: int
    r_theta_dim: int


def assemble_extended(lft: DiscretePlantLft,
                      composite: CompositeFilter) -> ExtendedRealization:
    f = composite.filt
    n_x = lft.a_g.shape[0]
    n_psi = f.n_states
    n_q = lft.dim_q
    n_u = lft.b_g2.shape[1]

    a = np.block([
        [lft.a_g, np.zeros((n_x, n_psi))],
        [f.b_psi1 @ lft.c_g, f.a_psi],
    ]) if n_psi else lft.a_g.copy()
    b_top = np.hstack([lft.b_g1, lft.b_g2])
    if n_psi:
        b_bottom = np.hstack([f.b_psi1 @ lft.d_g1 + f.b_psi2,
                              f.b_psi1 @ lft.d_g2])
        b = np.vstack([b_top, b_bottom])
        c = np.hstack([f.d_psi1 @ lft.c_g, f.c_psi])
    else:
        b = b_top
        c = f.d_psi1 @ lft.c_g
    d = np.hstack([f.d_psi1 @ lft.d_g1 + f.d_psi2, f.d_psi1 @ lft.d_g2])
    return ExtendedRealization(a, b, c, d, n_x, n_x + n_psi, n_q, n_u,
                               composite.r_tau_dim, composite.r_theta_dim)
