"""Small dense linear-program solver and the Perron witness extraction.

The solver is a two-phase tableau simplex with Bland's rule, which keeps the
pivot sequence deterministic and cycle-free.  Problems here are tiny (a
handful of variables per certified system), so clarity wins over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .matrices import as_square, is_metzler

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
V_MAX = 1e6
WITNESS_MARGIN = 1e-9  # strictness threshold on the LP optimum t*


@dataclass(frozen=True)
class LpProblem:
    """maximize objective . z  subject to  constraint_matrix z <= constraint_rhs,
    variable_lower_bounds <= z <= variable_upper_bounds (upper may be +inf)."""

    objective: np.ndarray
    constraint_matrix: np.ndarray
    constraint_rhs: np.ndarray
    variable_lower_bounds: np.ndarray
    variable_upper_bounds: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        a = np.asarray(self.constraint_matrix, dtype=float)
        b = np.asarray(self.constraint_rhs, dtype=float)
        lb = np.asarray(self.variable_lower_bounds, dtype=float)
        ub = np.asarray(self.variable_upper_bounds, dtype=float)
        if a.ndim != 2:
            raise ShapeError(f"constraint matrix must be 2-D, got shape {a.shape}")
        nv = a.shape[1]
        if c.shape != (nv,) or lb.shape != (nv,) or ub.shape != (nv,):
            raise ShapeError("objective/bounds length must match constraint columns")
        if b.shape != (a.shape[0],):
            raise ShapeError("rhs length must match constraint rows")
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise ValueError("objective/constraints must be finite")
        if not np.all(np.isfinite(lb)):
            raise ValueError("lower bounds must be finite")
        if np.any(np.isnan(ub)):
            raise ValueError("upper bounds must not be NaN")
        if not np.all(lb <= ub):
            raise ValueError("lower bounds exceed upper bounds")
        for name, arr in (("objective", c), ("constraint_matrix", a),
                          ("constraint_rhs", b), ("variable_lower_bounds", lb),
                          ("variable_upper_bounds", ub)):
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    variables: np.ndarray | None
    objective_value: float | None


def _bland_simplex(tableau, basis, n_real, pivot_tol=PIVOT_TOL):
    """Run simplex to optimality on a max-form tableau whose last row holds
    the reduced costs and last column the rhs.  Only the first n_real columns
    are eligible to enter.  Returns "optimal" or "unbounded"."""
    m = tableau.shape[0] - 1
    while True:
        costs = tableau[-1, :n_real]
        eligible = np.nonzero(costs > pivot_tol)[0]
        if eligible.size == 0:
            return "optimal"
        col = int(eligible[0])  # Bland: smallest improving index
        ratios = np.full(m, np.inf)
        pivots = tableau[:m, col]
        rhs = tableau[:m, -1]
        rows = pivots > pivot_tol
        ratios[rows] = np.maximum(rhs[rows], 0.0) / pivots[rows]
        if not np.any(np.isfinite(ratios)):
            return "unbounded"
        best = np.min(ratios)
        tied = np.nonzero(ratios <= best + pivot_tol * max(1.0, best))[0]
        row = int(min(tied, key=lambda i: basis[i]))  # Bland: smallest basic index leaves
        _pivot(tableau, row, col)
        basis[row] = col


def _pivot(tableau, row, col):
    tableau[row, :] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i, :] -= tableau[i, col] * tableau[row, :]


def _solve_standard_form(c, a, b):
    """maximize c.x  s.t.  a x <= b, x >= 0 (b may be negative)."""
    m, n = a.shape
    neg = b < 0
    n_art = int(np.count_nonzero(neg))
    # columns: x (n) | slacks (m) | artificials (n_art)
    ncols = n + m + n_art
    t = np.zeros((m + 1, ncols + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    basis = [n + i for i in range(m)]
    art_index = {}
    k = 0
    for i in np.nonzero(neg)[0]:
        t[i, :] *= -1.0
        col = n + m + k
        t[i, col] = 1.0
        basis[i] = col
        art_index[i] = col
        k += 1

    if n_art:
        # phase 1: maximize -sum(artificials); zero out basic artificial columns
        t[-1, :] = 0.0
        t[-1, n + m:n + m + n_art] = -1.0
        for i, col in art_index.items():
            t[-1, :] += t[i, :]
        status = _bland_simplex(t, basis, n + m)  # artificials never re-enter
        # objective-row rhs holds the negated objective value, so a positive
        # residual means some artificial is still nonzero
        if status != "optimal" or t[-1, -1] > FEAS_TOL:
            return "infeasible", None
        # drive any artificial still basic (at level 0) out of the basis
        for i in range(m):
            if basis[i] >= n + m:
                row_vals = np.abs(t[i, :n + m])
                j = int(np.argmax(row_vals))
                if row_vals[j] > PIVOT_TOL:
                    _pivot(t, i, j)
                    basis[i] = j

    # phase 2
    t[-1, :] = 0.0
    t[-1, :n] = c
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0.0:
            t[-1, :] -= c[basis[i]] * t[i, :]
    status = _bland_simplex(t, basis, n + m)
    if status == "unbounded":
        return "unbounded", None
    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = t[i, -1]
    return "optimal", x


def solve(p: LpProblem) -> LpSolution:
    """Solve the bounded LP by shifting to nonnegative variables and running
    the two-phase simplex.  Finite upper bounds become constraint rows."""
    nv = p.objective.shape[0]
    lb, ub = p.variable_lower_bounds, p.variable_upper_bounds
    rows = [p.constraint_matrix]
    rhs = [p.constraint_rhs - p.constraint_matrix @ lb]
    for j in range(nv):
        if np.isfinite(ub[j]):
            e = np.zeros(nv)
            e[j] = 1.0
            rows.append(e[None, :])
            rhs.append(np.array([ub[j] - lb[j]]))
    a = np.vstack(rows)
    b = np.concatenate(rhs)
    status, x = _solve_standard_form(p.objective.copy(), a, b)
    if status != "optimal":
        return LpSolution(status, None, None)
    z = lb + x
    return LpSolution("optimal", z, float(p.objective @ z))


@dataclass(frozen=True)
class PerronWitness:
    vector: np.ndarray  # v > 0, normalized so min entry = 1
    epsilon: float      # margin: m^T v <= -epsilon v elementwise


def perron_witness(m, v_max: float = V_MAX) -> PerronWitness | None:
    """Positive vector v and margin eps with m^T v <= -eps v, or None.

    The bilinear search over (v, eps) is replaced by the LP
        maximize t  s.t.  m^T v + t 1 <= 0,  1 <= v <= v_max,
    after which eps = t / max(v) satisfies m^T v <= -t 1 <= -eps v.  A
    strictly positive optimum t certifies the Metzler matrix Hurwitz; the
    margin threshold keeps boundary cases (spectral abscissa ~ 0) out.
    """
    arr = as_square(m)
    if not is_metzler(arr):
        raise DomainError("perron_witness requires a Metzler matrix")
    n = arr.shape[0]
    # columns: v_1..v_n, t;  row j encodes (m^T v)_j + t <= 0
    a = np.hstack([arr.T, np.ones((n, 1))])
    b = np.zeros(n)
    c = np.zeros(n + 1)
    c[n] = 1.0
    t_floor = -(1.0 + n * float(np.max(np.abs(arr))))  # below the value at v = 1
    lb = np.concatenate([np.ones(n), [t_floor]])
    ub = np.concatenate([np.full(n, v_max), [np.inf]])
    sol = solve(LpProblem(c, a, b, lb, ub))
    if sol.status != "optimal":  # cannot happen: v = 1 is always feasible
        return None
    t_star = float(sol.variables[n])
    if t_star <= WITNESS_MARGIN:
        return None
    v = sol.variables[:n]
    eps = t_star / float(np.max(v))
    v = v / float(np.min(v))
    slack = arr.T @ v + eps * v
    if np.max(slack) > 1e-9:
        raise RuntimeError(f"witness validity check failed (slack {np.max(slack):.3e})")
    return PerronWitness(v, eps)
