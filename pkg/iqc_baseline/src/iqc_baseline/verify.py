"""Semidefinite feasibility test for the extended interconnection.

Over the decision vector z = [zeta; q; w_phi] (plant + filter state, block
outputs, stacked post-activations) the program looks for a certificate
(P, kappa, D, lambda) making

    step(z)' P step(z) - zeta' P zeta
      - kappa |r_tau(z)|^2
      + sum_j ( p_j(z)' D_j p_j(z) - q_j(z)' D_j q_j(z) )
      + sum_k lambda_k qc_k(z)                <=  -eps |z|^2,

where step and r are the affine maps of the extended realization with
u = W_out w_phi substituted.  Each term vanishes or is nonnegative along true
loop signals:

  * the delay residual r_tau is identically zero when q_tau is the true
    delayed stack, so the kappa-weighted penalty only constrains inconsistent
    directions (a Finsler-style equality encoding);
  * each interval channel satisfies q_j = theta_j p_j with |theta_j| <= 1
    after radius normalization, so p'Dp - q'Dq = (1 - theta^2) p'Dp >= 0 for
    any diagonal D_j >= 0 (per-component scalings of the repeated scalar);
  * the network constraint is nonnegative on sector-consistent pairs.

Feasibility therefore certifies local asymptotic stability of the discretized
loop at these delays and interval bounds.

The solve itself minimizes the worst eigenvalue t of the left-hand side under
the scale normalization trace(P) <= TRACE_CAP; the verdict is "feasible" when
a clean optimum reaches t <= -eps.  Inaccurate or failed solver outcomes are
surfaced verbatim: they produce no certificate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from .assemble import ExtendedRealization
from .lft import DiscretePlantLft
from .loading import Network
from .nn_qc import NetworkQc, control_map, selection_maps

LMI_EPS = 1e-6
P_MARGIN = 1e-8
TRACE_CAP = 1e6


@dataclass(frozen=True)
class VerificationResult:
    status: str                      # "feasible", "infeasible", or solver status
    wall_time_seconds: float
    dims: dict
    margin: float | None = None      # optimal worst eigenvalue t*
    p: np.ndarray | None = None
    kappa: np.ndarray | None = None
    d_scalings: np.ndarray | None = None   # (s_tot, n) diagonal entries
    lam: np.ndarray | None = None
    solver: str = ""
    notes: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def to_dict(self) -> dict:
        return {"status": self.status,
                "wall_time_seconds": self.wall_time_seconds,
                "dims": dict(self.dims)}


def verify_lmi(ext: ExtendedRealization, lft: DiscretePlantLft, net: Network,
               qc: NetworkQc, c_out: np.ndarray, eps: float = LMI_EPS,
               solver: str | None = None) -> VerificationResult:
    """Solve the margin SDP; wall time covers compilation plus the solve."""
    n_zeta, n_q, n_phi = ext.n_states, ext.n_q, qc.n_phi
    nz = n_zeta + n_q + n_phi

    u_map = control_map(net, n_zeta, n_q, qc)
    t_sub = np.zeros((n_zeta + n_q + ext.n_u, nz))
    t_sub[:n_zeta, :n_zeta] = np.eye(n_zeta)
    t_sub[n_zeta:n_zeta + n_q, n_zeta:n_zeta + n_q] = np.eye(n_q)
    t_sub[n_zeta + n_q:, :] = u_map
    step = np.hstack([ext.a, ext.b]) @ t_sub
    r_map = np.hstack([ext.c, ext.d]) @ t_sub
    keep = np.zeros((n_zeta, nz))
    keep[:, :n_zeta] = np.eye(n_zeta)

    n = lft.n
    s_tot = lft.s_tot
    p_var = cp.Variable((n_zeta, n_zeta), symmetric=True)
    t_var = cp.Variable()
    lhs = step.T @ p_var @ step - keep.T @ p_var @ keep
    constraints = [p_var >> P_MARGIN * np.eye(n_zeta),
                   cp.trace(p_var) <= TRACE_CAP]

    kappa_var = None
    if ext.r_tau_dim:
        r_tau = r_map[:ext.r_tau_dim]
        kappa_var = cp.Variable(nonneg=True)
        lhs = lhs - kappa_var * (r_tau.T @ r_tau)

    d_vars = []
    for j in range(s_tot):
        p_rows = r_map[ext.r_tau_dim + j * n: ext.r_tau_dim + (j + 1) * n]
        q_rows = r_map[ext.r_tau_dim + (s_tot + j) * n:
                       ext.r_tau_dim + (s_tot + j + 1) * n]
        d_j = cp.Variable(n, nonneg=True)
        d_vars.append(d_j)
        d_mat = cp.diag(d_j)
        lhs = lhs + p_rows.T @ d_mat @ p_rows - q_rows.T @ d_mat @ q_rows

    lam_var = None
    if n_phi:
        n_sel, omega = selection_maps(net, c_out, n_zeta, n_q, qc)
        lam_var = cp.Variable(n_phi, nonneg=True)
        for j in range(n_phi):
            upper = qc.beta[j] * n_sel[j] - omega[j]
            lower = -qc.alpha[j] * n_sel[j] + omega[j]
            lhs = lhs + lam_var[j] * (np.outer(upper, lower)
                                      + np.outer(lower, upper))

    constraints.append(lhs << t_var * np.eye(nz))
    problem = cp.Problem(cp.Minimize(t_var), constraints)
    dims = {"states": n_zeta, "ports": n_q,
            "sdp_vars": n_zeta * (n_zeta + 1) // 2 + s_tot * n + n_phi
                        + (1 if kappa_var is not None else 0)}

    start = time.perf_counter()
    try:
        problem.solve(solver=solver or "CLARABEL")
    except cp.error.SolverError as exc:
        elapsed = time.perf_counter() - start
        return VerificationResult(f"solver_error: {exc}", elapsed, dims,
                                  solver=solver or "CLARABEL")
    elapsed = time.perf_counter() - start
    used = solver or "CLARABEL"

    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) \
            or p_var.value is None:
        return VerificationResult(str(problem.status), elapsed, dims,
                                  margin=None if t_var.value is None
                                  else float(t_var.value), solver=used)

    # Never trust the solver status alone: rebuild the left-hand side from the
    # returned iterate with multipliers clipped to their cones and check the
    # eigenvalue bounds exactly.  Only a numerically verified certificate
    # counts as feasible.
    p_val = 0.5 * (np.asarray(p_var.value) + np.asarray(p_var.value).T)
    kappa_val = (np.maximum(np.atleast_1d(kappa_var.value), 0.0)
                 if kappa_var is not None else None)
    d_vals = [np.maximum(np.asarray(d.value), 0.0) for d in d_vars]
    lam_val = (np.maximum(np.asarray(lam_var.value), 0.0)
               if lam_var is not None else None)
    check = step.T @ p_val @ step - keep.T @ p_val @ keep
    if kappa_val is not None:
        check = check - float(kappa_val[0]) * (r_map[:ext.r_tau_dim].T
                                               @ r_map[:ext.r_tau_dim])
    for j in range(s_tot):
        p_rows = r_map[ext.r_tau_dim + j * n: ext.r_tau_dim + (j + 1) * n]
        q_rows = r_map[ext.r_tau_dim + (s_tot + j) * n:
                       ext.r_tau_dim + (s_tot + j + 1) * n]
        check = check + p_rows.T @ np.diag(d_vals[j]) @ p_rows \
                      - q_rows.T @ np.diag(d_vals[j]) @ q_rows
    if n_phi and lam_val is not None:
        for j in range(n_phi):
            upper = qc.beta[j] * n_sel[j] - omega[j]
            lower = -qc.alpha[j] * n_sel[j] + omega[j]
            check = check + lam_val[j] * (np.outer(upper, lower)
                                          + np.outer(lower, upper))
    p_min = float(np.min(np.linalg.eigvalsh(p_val)))
    lhs_max = float(np.max(np.linalg.eigvalsh(check)))
    certificate_valid = p_min > 0.0 and lhs_max <= -eps

    if certificate_valid:
        return VerificationResult(
            "feasible", elapsed, dims, margin=lhs_max, p=p_val,
            kappa=kappa_val,
            d_scalings=np.vstack(d_vals) if d_vals else None,
            lam=lam_val, solver=used)
    if problem.status == cp.OPTIMAL:
        # clean solve whose best margin cannot reach -eps
        return VerificationResult("infeasible", elapsed, dims,
                                  margin=float(t_var.value), solver=used)
    return VerificationResult(str(problem.status), elapsed, dims,
                              margin=float(t_var.value), solver=used)
