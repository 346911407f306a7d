"""Input parsing for the system and network JSON documents.

The file formats are shared with the certification toolkit; this package
keeps its own reader so it can run as a standalone subprocess.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class InputError(ValueError):
    "Raised on malformed input documents."


@dataclass(frozen=True)
class IntervalSystem:
    a0_lower: np.ndarray
    a0_upper: np.ndarray
    terms: tuple  # of (a_lower, a_upper, b, tau)
    c: np.ndarray

    @property
    def n(self) -> int:
        return self.a0_lower.shape[0]

    @property
    def m(self) -> int:
        return self.terms[0][2].shape[1] if self.terms else 0

    @property
    def p(self) -> int:
        return self.c.shape[0]


@dataclass(frozen=True)
class Network:
    weights: tuple       # (W1, ..., Wq+1), zero-bias layers
    activation: str
    leaky_slope: float | None = None

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[0]

    def act(self, v):
        v = np.asarray(v, dtype=float)
        if self.activation == "tanh":
            return np.tanh(v)
        if self.activation == "relu":
            return np.maximum(v, 0.0)
        return np.where(v >= 0.0, v, self.leaky_slope * v)

    def ratio(self, v: float) -> float:
        "Chord slope act(v)/v with the derivative limit at zero."
        if v == 0.0:
            return 1.0
        return float(self.act(v)) / v

    def forward(self, y):
        x = np.asarray(y, dtype=float)
        for w in self.weights[:-1]:
            x = self.act(w @ x)
        return self.weights[-1] @ x

    def hidden_activations(self, y):
        "All post-activation vectors stacked into one array."
        x = np.asarray(y, dtype=float)
        parts = []
        for w in self.weights[:-1]:
            x = self.act(w @ x)
            parts.append(x)
        if not parts:
            return np.zeros(0)
        return np.concatenate(parts)


def _matrix(obj, field):
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 2 or not np.all(np.isfinite(arr)):
        raise InputError(f"{field}: expected a finite 2-D matrix")
    return arr


def _interval(obj, field):
    if isinstance(obj, dict):
        lo = _matrix(obj.get("lower"), field + ".lower")
        hi = _matrix(obj.get("upper"), field + ".upper")
    else:
        lo = _matrix(obj, field)
        hi = lo.copy()
    if lo.shape != hi.shape or np.any(lo > hi):
        raise InputError(f"{field}: invalid interval bounds")
    return lo, hi


def load_system(document) -> IntervalSystem:
    if isinstance(document, (str, Path)):
        with open(document) as fh:
            document = json.load(fh)
    if "A0" not in document or "C" not in document:
        raise InputError("system document needs A0 and C")
    a0_lo, a0_hi = _interval(document["A0"], "A0")
    terms = []
    for i, entry in enumerate(document.get("terms", [])):
        a_lo, a_hi = _interval(entry["A"], f"terms[{i}].A")
        b = _matrix(entry["B"], f"terms[{i}].B")
        tau = float(entry.get("tau", 0.0))
        if tau < 0:
            raise InputError(f"terms[{i}].tau must be nonnegative")
        terms.append((a_lo, a_hi, b, tau))
    c = _matrix(document["C"], "C")
    return IntervalSystem(a0_lo, a0_hi, tuple(terms), c)


def load_network(document) -> Network:
    if isinstance(document, (str, Path)):
        with open(document) as fh:
            document = json.load(fh)
    kind = document.get("activation")
    if kind not in ("tanh", "relu", "leaky_relu"):
        raise InputError(f"unsupported activation {kind!r}")
    slope = document.get("leaky_slope")
    if kind == "leaky_relu" and not (slope and 0.0 < slope < 1.0):
        raise InputError("leaky_relu needs a slope in (0, 1)")
    weights = []
    for i, layer in enumerate(document.get("layers", [])):
        w = _matrix(layer["W"], f"layers[{i}].W")
        b = np.asarray(layer.get("b", np.zeros(w.shape[0])), dtype=float)
        if np.any(b != 0.0):
            # the quadratic constraints are set up around the origin
            raise InputError(f"layers[{i}].b: nonzero biases are not supported")
        if any(not math.isfinite(x) for x in np.ravel(w)):
            raise InputError(f"layers[{i}].W: non-finite entries")
        weights.append(w)
    if not weights:
        raise InputError("network has no layers")
    for i in range(1, len(weights)):
        if weights[i].shape[1] != weights[i - 1].shape[0]:
            raise InputError(f"layers[{i}].W: dimension chain broken")
    return Network(tuple(weights), kind, slope)
