"""Fixed-step integration of the delayed closed loop and the Monte-Carlo
robustness harness.

The integrator is classical fourth-order Runge-Kutta with delays realized as
integer step counts; delayed states at the half-step stage times come from
linear interpolation between stored grid states.  A batch of trajectories
(columns) shares one time grid, which is what makes the Monte-Carlo sweeps
cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError, ShapeError
from .ffnn import FFNN, forward
from .lure import DelayedLureSystem
from .matrices import as_matrix, as_vector, interval_contains

DEFAULT_STEP = 1e-3
CONVERGENCE_RTOL = 1e-3  # ||x(T)|| < rtol * max(1, ||x0||) counts as converged


@dataclass(frozen=True)
class SimConfig:
    step: float
    horizon: float
    history: np.ndarray           # constant pre-history on [-max tau, 0]
    plant_sample: dict | None = None  # {"A0": matrix, "terms": [matrix, ...]}
    seed: int = 0

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be nonnegative, got {self.horizon}")
        object.__setattr__(self, "history", as_vector(self.history, "history"))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray    # (steps+1, n)
    outputs: np.ndarray   # (steps+1, p)
    controls: np.ndarray  # (steps+1, m)


def _delay_steps(tau: float, h: float) -> int:
    ratio = tau / h
    d = round(ratio)
    if abs(ratio - d) > 1e-9 * max(1.0, abs(ratio)):
        raise PreconditionError(
            f"delay {tau} is not an integer multiple of step {h}")
    return int(d)


def _resolve_plant(sys: DelayedLureSystem, plant_sample):
    "Pick concrete matrices inside the intervals; default to the centers."
    if plant_sample is None:
        return sys.a0.center, [t.a.center for t in sys.terms]
    a0 = as_matrix(plant_sample["A0"], "plant_sample.A0")
    if not interval_contains(sys.a0, a0):
        raise DomainError("plant sample A0 lies outside the system interval")
    term_samples = plant_sample.get("terms", [])
    if len(term_samples) != len(sys.terms):
        raise ShapeError(f"plant sample has {len(term_samples)} delayed matrices, "
                         f"system has {len(sys.terms)}")
    a_terms = []
    for k, (sample, term) in enumerate(zip(term_samples, sys.terms)):
        a = as_matrix(sample, f"plant_sample.terms[{k}]")
        if not interval_contains(term.a, a):
            raise DomainError(f"plant sample terms[{k}] lies outside the interval")
        a_terms.append(a)
    return a0, a_terms


def _integrate(sys: DelayedLureSystem, net: FFNN | None, a0, a_terms,
               histories: np.ndarray, h: float, steps: int) -> np.ndarray:
    """RK4 over a batch of constant pre-histories (columns).

    Returns the full storage array of shape (steps + d_max + 1, n, k) where
    index d_max corresponds to t = 0.
    """
    n, k = histories.shape
    delays = [_delay_steps(t.tau, h) for t in sys.terms]
    d_max = max(delays, default=0)
    store = np.empty((steps + d_max + 1, n, k))
    store[:d_max + 1] = histories[None, :, :]

    c = sys.c
    controls = (lambda x: forward(net, c @ x)) if net is not None else None
    instant = [i for i, d in enumerate(delays) if d == 0]
    lagged = [i for i, d in enumerate(delays) if d > 0]

    def rhs(x, delayed):
        dx = a0 @ x
        for i in instant:
            dx = dx + a_terms[i] @ x
            if controls is not None:
                dx = dx + sys.terms[i].b @ controls(x)
        for idx, i in enumerate(lagged):
            xd = delayed[idx]
            dx = dx + a_terms[i] @ xd
            if controls is not None:
                dx = dx + sys.terms[i].b @ controls(xd)
        return dx

    for j in range(d_max, steps + d_max):
        x = store[j]
        at0 = [store[j - delays[i]] for i in lagged]
        at1 = [store[j + 1 - delays[i]] for i in lagged]
        mid = [0.5 * (a + b) for a, b in zip(at0, at1)]
        k1 = rhs(x, at0)
        k2 = rhs(x + 0.5 * h * k1, mid)
        k3 = rhs(x + 0.5 * h * k2, mid)
        k4 = rhs(x + h * k3, at1)
        store[j + 1] = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return store[d_max:]


def simulate(sys: DelayedLureSystem, net: FFNN | None, cfg: SimConfig) -> Trajectory:
    """Integrate the closed loop from a constant pre-history.

    net = None runs the open loop (feedback identically zero).
    """
    if cfg.history.shape[0] != sys.n:
        raise ShapeError(f"history has {cfg.history.shape[0]} entries, expected {sys.n}")
    a0, a_terms = _resolve_plant(sys, cfg.plant_sample)
    steps = int(round(cfg.horizon / cfg.step))
    states = _integrate(sys, net, a0, a_terms, cfg.history[:, None],
                        cfg.step, steps)[:, :, 0]
    times = np.arange(steps + 1) * cfg.step
    outputs = states @ sys.c.T
    if net is not None:
        controls = forward(net, sys.c @ states.T).T
    else:
        controls = np.zeros((steps + 1, sys.m))
    return Trajectory(times, states, outputs, controls)


@dataclass(frozen=True)
class Tile:
    "One Monte-Carlo cell: a sampled plant at one delay, many histories."
    plant_index: int
    tau: float
    n_histories: int
    proportion_converged: float
    median_terminal_norm: float
    negative_history_count: int   # components below 0 are outside the positivity guarantee
    times: np.ndarray
    median_norms: np.ndarray
    norms: np.ndarray             # (steps+1, n_histories)
    outputs: np.ndarray | None    # (steps+1, n_histories) when p == 1
    plant_sample: dict            # concrete matrices used for this tile
    representative_history: np.ndarray  # history with the median terminal norm


@dataclass(frozen=True)
class ConvergenceReport:
    seed: int
    step: float
    horizon: float
    threshold_rtol: float
    tiles: tuple = ()

    def to_dict(self, norm_stride: int = 10) -> dict:
        def finite_or_none(x):
            return None if np.isnan(x) else x
        return {
            "seed": self.seed,
            "step": self.step,
            "horizon": self.horizon,
            "threshold_rtol": self.threshold_rtol,
            "tiles": [{
                "plant_index": t.plant_index,
                "tau": t.tau,
                "n_histories": t.n_histories,
                "proportion_converged": finite_or_none(t.proportion_converged),
                "median_terminal_norm": finite_or_none(t.median_terminal_norm),
                "outside_positivity_guarantee": t.negative_history_count > 0,
                "times": t.times[::norm_stride].tolist(),
                "median_norms": t.median_norms[::norm_stride].tolist(),
            } for t in self.tiles],
        }


def _retarget_delays(sys: DelayedLureSystem, tau: float) -> DelayedLureSystem:
    "Same system with every delayed channel set to the given delay."
    from .lure import DelayTerm
    terms = tuple(DelayTerm(t.a, t.b, tau) for t in sys.terms)
    return DelayedLureSystem(sys.a0, terms, sys.c)


def monte_carlo(sys: DelayedLureSystem, net: FFNN | None, n_plants: int,
                n_histories: int, taus, seed: int,
                history_lower, history_upper,
                step: float = DEFAULT_STEP, horizon: float = 60.0,
                threshold_rtol: float = CONVERGENCE_RTOL) -> ConvergenceReport:
    """Sample plants inside the intervals and histories inside a box; report
    per-(plant, delay) convergence proportions and median trajectory norms.

    Sampling is driven entirely by the seed, and histories are integrated as
    one batch per tile in index order, so reports are reproducible bit for
    bit.  History components below zero are permitted (they reproduce the
    published delay-only experiment) but the tile is flagged as outside the
    positivity guarantee.
    """
    rng = np.random.default_rng(seed)
    hist_lo = np.broadcast_to(np.asarray(history_lower, dtype=float), (sys.n,))
    hist_hi = np.broadcast_to(np.asarray(history_upper, dtype=float), (sys.n,))
    steps = int(round(horizon / step))
    tiles = []
    for plant_index in range(n_plants):
        a0 = sys.a0.sample(rng)
        a_terms = [t.a.sample(rng) for t in sys.terms]
        histories = rng.uniform(hist_lo[:, None], hist_hi[:, None],
                                size=(sys.n, n_histories))
        for tau in taus:
            retargeted = _retarget_delays(sys, float(tau))
            states = _integrate(retargeted, net, a0, a_terms, histories,
                                step, steps)
            norms = np.linalg.norm(states, axis=1)          # (steps+1, k)
            start_norms = np.maximum(norms[0], 1.0)
            converged = norms[-1] < threshold_rtol * start_norms
            defined = n_histories > 0 and steps > 0
            rep = int(np.argsort(norms[-1], kind="stable")[n_histories // 2]) \
                if n_histories else 0
            tiles.append(Tile(
                plant_index=plant_index,
                tau=float(tau),
                n_histories=n_histories,
                proportion_converged=float(np.mean(converged)) if defined else float("nan"),
                median_terminal_norm=float(np.median(norms[-1])) if n_histories else float("nan"),
                negative_history_count=int(np.count_nonzero(histories < 0.0)),
                times=np.arange(steps + 1) * step,
                median_norms=np.median(norms, axis=1),
                norms=norms,
                outputs=np.einsum("ij,tjk->tik", sys.c, states)[:, 0, :]
                        if sys.p == 1 else None,
                plant_sample={"A0": a0, "terms": list(a_terms)},
                representative_history=(histories[:, rep].copy()
                                        if n_histories else np.zeros(sys.n)),
            ))
    return ConvergenceReport(seed, step, horizon, threshold_rtol, tuple(tiles))
