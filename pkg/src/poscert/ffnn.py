"""Feedforward networks, box propagation, and network-level sector bounds.

The sector machinery turns a feedforward network with monotone activations
into a pair of gain matrices (gamma1, gamma2) such that

    gamma1 y <= Phi(y) <= gamma2 y     for all y in the input box,

which is the interface the positivity certificates consume.  The bound is
built layer by layer: an interval pass gives each neuron's pre-activation
range, the activation is relaxed to a pair of slopes on that range, and the
slopes are folded into running lower/upper shape matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PreconditionError, ShapeError, ValidationError
from .matrices import as_matrix, as_vector

SUPPORTED_ACTIVATIONS = ("tanh", "relu", "leaky_relu")


@dataclass(frozen=True)
class Activation:
    """Elementwise monotone activation with phi(0) = 0."""

    kind: str
    leaky_slope: float | None = None

    def __post_init__(self):
        if self.kind not in SUPPORTED_ACTIVATIONS:
            raise ValidationError("activation", f"unsupported activation {self.kind!r} "
                                  "(must vanish at 0 and be monotone)")
        if self.kind == "leaky_relu":
            s = self.leaky_slope
            if s is None or not (0.0 < s < 1.0):
                raise ValidationError("leaky_slope", "leaky_relu needs a slope in (0, 1)")
        elif self.leaky_slope is not None:
            raise ValidationError("leaky_slope", f"{self.kind} takes no slope parameter")

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind == "tanh":
            return np.tanh(v)
        if self.kind == "relu":
            return np.maximum(v, 0.0)
        return np.where(v >= 0.0, v, self.leaky_slope * v)

    def ratio(self, v: float) -> float:
        "Chord slope phi(v)/v, with the derivative limit at v = 0."
        if v == 0.0:
            return 1.0  # tanh'(0) = 1; relu/leaky right-derivative at 0
        return float(self(v)) / v

    @property
    def max_gain(self) -> float:
        "sup over v != 0 of |phi(v)| / |v|."
        return 1.0


@dataclass(frozen=True)
class FFNN:
    """Layered affine maps with a shared hidden activation; the last layer is
    affine (no activation).  Weights are (n_i x n_{i-1}) arrays, biases 1-D."""

    layers: tuple
    activation: Activation

    def __post_init__(self):
        if not self.layers:
            raise ValidationError("layers", "network needs at least one layer")
        checked = []
        prev = None
        for i, (w, b) in enumerate(self.layers):
            w = as_matrix(w, f"layers[{i}].W")
            b = as_vector(b, f"layers[{i}].b")
            if b.shape[0] != w.shape[0]:
                raise ValidationError(f"layers[{i}].b",
                                      f"bias length {b.shape[0]} != rows {w.shape[0]}")
            if prev is not None and w.shape[1] != prev:
                raise ValidationError(f"layers[{i}].W",
                                      f"expects {w.shape[1]} inputs but previous layer "
                                      f"outputs {prev}")
            prev = w.shape[0]
            checked.append((w, b))
        object.__setattr__(self, "layers", tuple(checked))

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0].shape[0]

    @property
    def hidden_count(self) -> int:
        return len(self.layers) - 1

    @property
    def has_bias(self) -> bool:
        return any(np.any(b != 0.0) for _, b in self.layers)


def forward(net: FFNN, y) -> np.ndarray:
    "Exact forward pass; y may be a vector (p,) or a batch of columns (p, k)."
    x = np.asarray(y, dtype=float)
    if x.shape[0] != net.input_dim:
        raise ShapeError(f"input has {x.shape[0]} entries, network expects {net.input_dim}")
    for w, b in net.layers[:-1]:
        x = net.activation(w @ x + (b if x.ndim == 1 else b[:, None]))
    w, b = net.layers[-1]
    return w @ x + (b if x.ndim == 1 else b[:, None])


@dataclass(frozen=True)
class InputBox:
    """Componentwise box 0 <= lower <= y <= upper for the network input."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lower, "box lower")
        hi = as_vector(self.upper, "box upper")
        if lo.shape != hi.shape:
            raise ShapeError("box bounds differ in length")
        if np.any(lo < 0.0):
            raise ValueError("input box must lie in the nonnegative orthant")
        if np.any(lo > hi):
            raise ValueError("box lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        "Uniform samples as columns of a (dim, count) array."
        return rng.uniform(self.lower[:, None], self.upper[:, None],
                           size=(self.dim, count))


@dataclass(frozen=True)
class LayerBoxes:
    "Per hidden layer: pre- and post-activation interval bounds."
    preact_lower: tuple
    preact_upper: tuple
    postact_lower: tuple
    postact_upper: tuple


@dataclass(frozen=True)
class LayerSectors:
    "Per hidden layer: shape matrices, slope diagonals, and replaced rows."
    L: tuple
    U: tuple
    D_lower: tuple  # beta slopes (lower bound)
    D_upper: tuple  # alpha slopes (upper bound)
    L_hat: tuple
    U_hat: tuple


@dataclass(frozen=True)
class SectorBound:
    "gamma1 y <= Phi(y) <= gamma2 y for all y in box."
    gamma1: np.ndarray
    gamma2: np.ndarray
    box: InputBox


def _affine_interval(w, b, lo, hi):
    "Interval image of w @ x + b over the box [lo, hi] (center/radius form)."
    c = 0.5 * (hi + lo)
    r = 0.5 * (hi - lo)
    mid = w @ c + b
    spread = np.abs(w) @ r
    return mid - spread, mid + spread


def propagate_boxes(net: FFNN, box: InputBox) -> LayerBoxes:
    """Interval bounds on every hidden layer's pre- and post-activations.

    The first layer maps the input box directly; later layers map the previous
    post-activation box through the closed-form center/radius bound.  Monotone
    activations send interval endpoints to interval endpoints.
    """
    if box.dim != net.input_dim:
        raise ShapeError(f"box dimension {box.dim} != network input {net.input_dim}")
    pre_lo, pre_hi, post_lo, post_hi = [], [], [], []
    lo, hi = box.lower, box.upper
    for w, b in net.layers[:-1]:
        nlo, nhi = _affine_interval(w, b, lo, hi)
        pre_lo.append(nlo)
        pre_hi.append(nhi)
        lo, hi = net.activation(nlo), net.activation(nhi)
        post_lo.append(lo)
        post_hi.append(hi)
    return LayerBoxes(tuple(pre_lo), tuple(pre_hi), tuple(post_lo), tuple(post_hi))


def activation_sector(activation: Activation, lo: float, hi: float) -> tuple[float, float]:
    """Slopes (alpha, beta) relaxing the activation on [lo, hi].

    On sign-definite intervals the chord slopes at the endpoints satisfy
    beta v <= phi(v) <= alpha v.  When the interval straddles zero both slopes
    collapse to the peak gain and the caller must pair them with the
    absolute-value row replacement.
    """
    if lo > hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if lo >= 0.0:        # (i) nonnegative interval
        return activation.ratio(lo), activation.ratio(hi)
    if hi <= 0.0:        # (ii) nonpositive interval
        return activation.ratio(lo), activation.ratio(hi)
    gain = activation.max_gain   # (iii) sign-crossing interval
    return gain, gain


def _bias_rows(b, box: InputBox):
    """Rowwise linear shares with share_lower y <= b <= share_upper y on the box.

    Each share places the scalar b_j / a on the single coordinate whose bound
    attains a (a1 = min lower, a2 = max upper), which keeps both inequalities
    tight at the relevant box face.  Zero biases contribute zero rows.
    """
    p = box.dim
    lower = np.zeros((b.shape[0], p))
    upper = np.zeros((b.shape[0], p))
    if not np.any(b != 0.0):
        return lower, upper
    a1 = float(np.min(box.lower))
    a2 = float(np.max(box.upper))
    if a1 <= 0.0:
        raise PreconditionError("nonzero biases require min(box lower) > 0")
    k1 = int(np.argmin(box.lower))
    k2 = int(np.argmax(box.upper))
    for j, bj in enumerate(b):
        if bj == 0.0:
            continue
        if bj >= 0.0:
            lower[j, k2] = bj / a2
            upper[j, k1] = bj / a1
        else:
            lower[j, k1] = bj / a1
            upper[j, k2] = bj / a2
    return lower, upper


def _weight_step(w, b, lo_shape, hi_shape, box: InputBox):
    "One affine layer applied to running shape matrices: returns (L, U)."
    w_pos = np.maximum(w, 0.0)
    w_neg = np.minimum(w, 0.0)
    sig_lo = w_pos @ lo_shape + w_neg @ hi_shape
    sig_hi = w_pos @ hi_shape + w_neg @ lo_shape
    d_lo, d_hi = _bias_rows(b, box)
    return sig_lo + d_lo, sig_hi + d_hi


def propagate_sectors(net: FFNN, box: InputBox, boxes: LayerBoxes) -> LayerSectors:
    """Per-layer sector data from the weight/bias shares and slope relaxation.

    Maintains running matrices (l, u) with l y <= omega <= u y; each layer
    first applies the weight split and bias shares to get L y <= nu <= U y,
    then relaxes the activation per neuron.  Rows of neurons whose box crosses
    zero are replaced by -|L row| / |U row|, which stays sound because the
    input box lives in the nonnegative orthant.
    """
    p = net.input_dim
    lo_shape = np.eye(p)
    hi_shape = np.eye(p)
    L_list, U_list, dlo_list, dhi_list, lhat_list, uhat_list = [], [], [], [], [], []
    for i, (w, b) in enumerate(net.layers[:-1]):
        L, U = _weight_step(w, b, lo_shape, hi_shape, box)
        n_i = w.shape[0]
        beta = np.zeros(n_i)
        alpha = np.zeros(n_i)
        l_hat = L.copy()
        u_hat = U.copy()
        for j in range(n_i):
            nlo = float(boxes.preact_lower[i][j])
            nhi = float(boxes.preact_upper[i][j])
            a, bta = activation_sector(net.activation, nlo, nhi)
            alpha[j] = a
            beta[j] = bta
            if nlo < 0.0 < nhi:  # sign-crossing: absolute-value rows
                l_hat[j, :] = -np.abs(L[j, :])
                u_hat[j, :] = np.abs(U[j, :])
        L_list.append(L)
        U_list.append(U)
        dlo_list.append(beta)
        dhi_list.append(alpha)
        lhat_list.append(l_hat)
        uhat_list.append(u_hat)
        lo_shape = beta[:, None] * l_hat
        hi_shape = alpha[:, None] * u_hat
    return LayerSectors(tuple(L_list), tuple(U_list), tuple(dlo_list),
                        tuple(dhi_list), tuple(lhat_list), tuple(uhat_list))


def network_sector(net: FFNN, box: InputBox) -> SectorBound:
    """Network-level sector bound gamma1 y <= Phi(y) <= gamma2 y on the box."""
    boxes = propagate_boxes(net, box)
    sectors = propagate_sectors(net, box, boxes)
    if net.hidden_count == 0:
        lo_shape = np.eye(net.input_dim)
        hi_shape = np.eye(net.input_dim)
    else:
        lo_shape = sectors.D_lower[-1][:, None] * sectors.L_hat[-1]
        hi_shape = sectors.D_upper[-1][:, None] * sectors.U_hat[-1]
    w, b = net.layers[-1]
    gamma1, gamma2 = _weight_step(w, b, lo_shape, hi_shape, box)
    return SectorBound(gamma1, gamma2, box)


def load_ffnn(document) -> FFNN:
    """Build a validated FFNN from a parsed JSON document (or a file path).

    Schema: {"activation": "tanh"|"relu"|"leaky_relu", "leaky_slope": number?,
             "layers": [{"W": [[...]], "b": [...]}, ...]}
    """
    if isinstance(document, (str, Path)):
        with open(document) as fh:
            document = json.load(fh)
    if not isinstance(document, dict):
        raise ValidationError("document", "expected a JSON object")
    if "activation" not in document:
        raise ValidationError("activation", "missing required field")
    if "layers" not in document or not isinstance(document["layers"], list) \
            or not document["layers"]:
        raise ValidationError("layers", "missing or empty layer list")
    activation = Activation(document["activation"], document.get("leaky_slope"))
    layers = []
    for i, entry in enumerate(document["layers"]):
        if not isinstance(entry, dict) or "W" not in entry:
            raise ValidationError(f"layers[{i}]", "expected an object with a W field")
        try:
            w = as_matrix(entry["W"], f"layers[{i}].W")
        except (ShapeError, ValueError) as exc:
            raise ValidationError(f"layers[{i}].W", str(exc)) from exc
        b = entry.get("b", [0.0] * w.shape[0])
        try:
            b = as_vector(b, f"layers[{i}].b")
        except (ShapeError, ValueError) as exc:
            raise ValidationError(f"layers[{i}].b", str(exc)) from exc
        if any(not math.isfinite(x) for x in np.ravel(w)) or \
                any(not math.isfinite(x) for x in b):
            raise ValidationError(f"layers[{i}]", "non-finite entries")
        layers.append((w, b))
    return FFNN(tuple(layers), activation)


def dump_ffnn(net: FFNN) -> dict:
    "Inverse of load_ffnn for report emission."
    doc = {"activation": net.activation.kind,
           "layers": [{"W": w.tolist(), "b": b.tolist()} for w, b in net.layers]}
    if net.activation.leaky_slope is not None:
        doc["leaky_slope"] = net.activation.leaky_slope
    return doc
