"""Per-neuron quadratic constraints for the network in the loop.

Interval propagation over the operating box gives each neuron's
pre-activation range; the activation is then bracketed by chord slopes
alpha <= act(v)/v <= beta on that range.  The stacked constraint

    [nu; omega]^T Psi^T M(lambda) Psi [nu; omega] >= 0,
    Psi = [diag(beta) -I; -diag(alpha) I],  M = [0 diag(lambda); diag(lambda) 0]

holds for every lambda >= 0 whenever omega = act(nu) and nu stays in its box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .loading import Network


@dataclass(frozen=True)
class NeuronBoxes:
    "Pre-activation interval per hidden neuron, stacked per layer."
    lower: tuple
    upper: tuple


def propagate_boxes(net: Network, y_lower, y_upper) -> NeuronBoxes:
    lo = np.asarray(y_lower, dtype=float)
    hi = np.asarray(y_upper, dtype=float)
    lowers, uppers = [], []
    for w in net.weights[:-1]:
        c = 0.5 * (hi + lo)
        r = 0.5 * (hi - lo)
        mid = w @ c
        spread = np.abs(w) @ r
        nlo, nhi = mid - spread, mid + spread
        lowers.append(nlo)
        uppers.append(nhi)
        lo, hi = net.act(nlo), net.act(nhi)
    return NeuronBoxes(tuple(lowers), tuple(uppers))


def local_slopes(net: Network, lo: float, hi: float) -> tuple[float, float]:
    """Chord-slope bracket (alpha, beta) with alpha v^2 <= v act(v) <= beta v^2
    on [lo, hi].  Boxes straddling zero keep the unit upper slope; the lower
    slope is the smaller endpoint ratio, so the constraint stays valid (the
    chord slope of these activations peaks at the origin)."""
    r_lo = net.ratio(lo)
    r_hi = net.ratio(hi)
    alpha = min(r_lo, r_hi)
    beta = max(r_lo, r_hi)
    if lo < 0.0 < hi:
        beta = max(beta, 1.0)
    return alpha, beta


@dataclass(frozen=True)
class NetworkQc:
    alpha: np.ndarray       # stacked lower slopes, one per hidden neuron
    beta: np.ndarray        # stacked upper slopes
    psi: np.ndarray         # [diag(beta) -I; -diag(alpha) I]
    layer_sizes: tuple      # hidden widths, in order

    @property
    def n_phi(self) -> int:
        return self.alpha.shape[0]


def build_nn_qc(net: Network, boxes: NeuronBoxes) -> NetworkQc:
    alphas, betas, sizes = [], [], []
    for lo_vec, hi_vec in zip(boxes.lower, boxes.upper):
        sizes.append(lo_vec.shape[0])
        for lo, hi in zip(lo_vec, hi_vec):
            a, b = local_slopes(net, float(lo), float(hi))
            alphas.append(a)
            betas.append(b)
    alpha = np.array(alphas)
    beta = np.array(betas)
    n_phi = alpha.shape[0]
    if n_phi == 0:
        return NetworkQc(alpha, beta, np.zeros((0, 0)), tuple(sizes))
    psi = np.block([[np.diag(beta), -np.eye(n_phi)],
                    [-np.diag(alpha), np.eye(n_phi)]])
    return NetworkQc(alpha, beta, psi, tuple(sizes))


def selection_maps(net: Network, c_out: np.ndarray, n_zeta: int,
                   n_q: int, qc: NetworkQc):
    """Linear maps N, Omega with nu = N z and omega = Omega z over the
    decision vector z = [zeta; q; w_phi] (x occupies the first plant rows of
    zeta and w_phi stacks the post-activations).

    The first hidden layer reads W1 C x; each later layer reads its weight
    times the previous post-activation block.
    """
    n_phi = qc.n_phi
    nz = n_zeta + n_q + n_phi
    n_sel = np.zeros((n_phi, nz))
    omega = np.zeros((n_phi, nz))
    omega[:, n_zeta + n_q:] = np.eye(n_phi)
    row = 0
    col = n_zeta + n_q  # start of w_phi
    for i, w in enumerate(net.weights[:-1]):
        rows = w.shape[0]
        if i == 0:
            n_sel[row:row + rows, :c_out.shape[1]] = w @ c_out
        else:
            prev = qc.layer_sizes[i - 1]
            n_sel[row:row + rows, col:col + prev] = w
            col += prev
        row += rows
    return n_sel, omega


def control_map(net: Network, n_zeta: int, n_q: int, qc: NetworkQc) -> np.ndarray:
    "u = W_out (last post-activation block) as a map on z = [zeta; q; w_phi]."
    m = net.output_dim
    nz = n_zeta + n_q + qc.n_phi
    u_map = np.zeros((m, nz))
    if qc.n_phi:
        last = qc.layer_sizes[-1]
        u_map[:, nz - last:] = net.weights[-1]
    return u_map
