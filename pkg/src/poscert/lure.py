"""Closed-loop plant model: interval LTI dynamics with delayed NN feedback.

    dx/dt = [A0_lo, A0_hi] x(t) + sum_i [Ai_lo, Ai_hi] x(t - tau_i)
                                + B_i u(t - tau_i),
    y = C x,  u = Phi(y).

Interval matrices carry the parametric uncertainty; B_i and C are certain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ShapeError, ValidationError
from .ffnn import SectorBound
from .matrices import DEFAULT_TOL, IntervalMatrix, as_matrix, is_nonnegative


@dataclass(frozen=True)
class DelayTerm:
    "One delayed channel: interval state matrix, certain input matrix, delay."
    a: IntervalMatrix
    b: np.ndarray
    tau: float

    def __post_init__(self):
        b = as_matrix(self.b, "B")
        if self.tau < 0:
            raise ValueError(f"delay must be nonnegative, got {self.tau}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "tau", float(self.tau))


@dataclass(frozen=True)
class DelayedLureSystem:
    a0: IntervalMatrix
    terms: tuple  # of DelayTerm
    c: np.ndarray

    def __post_init__(self):
        n = self.a0.shape[0]
        if self.a0.shape != (n, n):
            raise ShapeError("A0 must be square")
        c = as_matrix(self.c, "C")
        if c.shape[1] != n:
            raise ShapeError(f"C has {c.shape[1]} columns, expected {n}")
        m = None
        for i, term in enumerate(self.terms):
            if term.a.shape != (n, n):
                raise ShapeError(f"terms[{i}].A shape {term.a.shape} != ({n}, {n})")
            if term.b.shape[0] != n:
                raise ShapeError(f"terms[{i}].B has {term.b.shape[0]} rows, expected {n}")
            if m is None:
                m = term.b.shape[1]
            elif term.b.shape[1] != m:
                raise ShapeError(f"terms[{i}].B has {term.b.shape[1]} columns, expected {m}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def n(self) -> int:
        return self.a0.shape[0]

    @property
    def p(self) -> int:
        return self.c.shape[0]

    @property
    def m(self) -> int:
        return self.terms[0].b.shape[1] if self.terms else 0

    @property
    def taus(self) -> tuple:
        return tuple(t.tau for t in self.terms)

    @property
    def max_tau(self) -> float:
        return max(self.taus, default=0.0)

    @property
    def b_total(self) -> np.ndarray:
        "Sum of the input matrices (all channels feed the same u)."
        if not self.terms:
            return np.zeros((self.n, 0))
        return np.sum([t.b for t in self.terms], axis=0)

    @property
    def is_degenerate(self) -> bool:
        return self.a0.is_degenerate and all(t.a.is_degenerate for t in self.terms)

    @property
    def is_delay_free(self) -> bool:
        return all(t.tau == 0.0 for t in self.terms)

    def lower_sum(self) -> np.ndarray:
        "Sum of all lower-endpoint state matrices (A0 and delayed)."
        return self.a0.lower + sum((t.a.lower for t in self.terms),
                                   np.zeros((self.n, self.n)))

    def upper_sum(self) -> np.ndarray:
        return self.a0.upper + sum((t.a.upper for t in self.terms),
                                   np.zeros((self.n, self.n)))


@dataclass(frozen=True)
class AssumptionReport:
    ok: bool
    violations: tuple  # human-readable entry descriptions

    def __bool__(self) -> bool:
        return self.ok


def check_assumption1(sys: DelayedLureSystem, tol: float = DEFAULT_TOL) -> AssumptionReport:
    """Structural positivity assumption: A0 lower endpoint Metzler, B_i, C >= 0.

    Lists every violated entry so sweeps can see all failures at once.
    """
    violations = []
    a0 = sys.a0.lower
    for i in range(sys.n):
        for j in range(sys.n):
            if i != j and a0[i, j] < -tol:
                violations.append(f"A0.lower[{i},{j}] = {a0[i, j]:.6g} < 0 (not Metzler)")
    for k, term in enumerate(sys.terms):
        rows, cols = np.nonzero(term.b < -tol)
        for i, j in zip(rows, cols):
            violations.append(f"terms[{k}].B[{i},{j}] = {term.b[i, j]:.6g} < 0")
    rows, cols = np.nonzero(sys.c < -tol)
    for i, j in zip(rows, cols):
        violations.append(f"C[{i},{j}] = {sys.c[i, j]:.6g} < 0")
    return AssumptionReport(not violations, tuple(violations))


def check_lure_positivity(sys: DelayedLureSystem, sector: SectorBound,
                          tol: float = DEFAULT_TOL) -> bool:
    """Internal positivity of the closed loop at the lower sector.

    Requires the structural assumption plus, per delayed channel,
    A_i.lower + B_i gamma1 C >= 0 elementwise.
    """
    if sys.terms and sector.gamma1.shape != (sys.m, sys.p):
        raise ShapeError(f"sector shape {sector.gamma1.shape} != ({sys.m}, {sys.p})")
    if not check_assumption1(sys, tol):
        return False
    for term in sys.terms:
        closed = term.a.lower + term.b @ sector.gamma1 @ sys.c
        if not is_nonnegative(closed, tol):
            return False
    return True


def load_system(document) -> DelayedLureSystem:
    """Build a validated system from a parsed JSON document (or file path).

    Schema: {"A0": {"lower": [[...]], "upper": [[...]]},
             "terms": [{"A": {"lower": ..., "upper": ...},
                        "B": [[...]], "tau": number}],
             "C": [[...]]}
    An exact matrix may be given directly in place of a lower/upper object.
    """
    if isinstance(document, (str, Path)):
        with open(document) as fh:
            document = json.load(fh)
    if not isinstance(document, dict):
        raise ValidationError("document", "expected a JSON object")
    for key in ("A0", "C"):
        if key not in document:
            raise ValidationError(key, "missing required field")

    def interval(obj, field):
        try:
            if isinstance(obj, dict):
                if "lower" not in obj or "upper" not in obj:
                    raise ValidationError(field, "interval needs lower and upper")
                return IntervalMatrix(as_matrix(obj["lower"], field + ".lower"),
                                      as_matrix(obj["upper"], field + ".upper"))
            return IntervalMatrix.exact(as_matrix(obj, field))
        except ValidationError:
            raise
        except (ShapeError, ValueError) as exc:
            raise ValidationError(field, str(exc)) from exc

    a0 = interval(document["A0"], "A0")
    terms = []
    for i, entry in enumerate(document.get("terms", [])):
        prefix = f"terms[{i}]"
        if not isinstance(entry, dict) or "A" not in entry or "B" not in entry:
            raise ValidationError(prefix, "expected an object with A and B fields")
        tau = entry.get("tau", 0.0)
        if not isinstance(tau, (int, float)) or tau < 0:
            raise ValidationError(prefix + ".tau", f"bad delay {tau!r}")
        try:
            b = as_matrix(entry["B"], prefix + ".B")
        except (ShapeError, ValueError) as exc:
            raise ValidationError(prefix + ".B", str(exc)) from exc
        terms.append(DelayTerm(interval(entry["A"], prefix + ".A"), b, float(tau)))
    try:
        c = as_matrix(document["C"], "C")
    except (ShapeError, ValueError) as exc:
        raise ValidationError("C", str(exc)) from exc
    try:
        return DelayedLureSystem(a0, tuple(terms), c)
    except (ShapeError, ValueError) as exc:
        raise ValidationError("system", str(exc)) from exc


def dump_system(sys: DelayedLureSystem) -> dict:
    return {
        "A0": {"lower": sys.a0.lower.tolist(), "upper": sys.a0.upper.tolist()},
        "terms": [{"A": {"lower": t.a.lower.tolist(), "upper": t.a.upper.tolist()},
                   "B": t.b.tolist(), "tau": t.tau} for t in sys.terms],
        "C": sys.c.tolist(),
    }
