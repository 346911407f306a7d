"""Acceptance suite for the primary component.

Each test implements one release criterion at its stated tolerance and prints
one PASS line (pytest reports the FAIL side).  Run with `pytest -s
tests/test_acceptance.py` to see the lines as they complete.
"""

import time

import numpy as np
import pytest

import poscert as pc
from poscert.certificates import certify_c1, certify_c2, certify_c3
from poscert.lp import perron_witness
from poscert.matrices import metzler_spectral_abscissa
from poscert.simulate import SimConfig, monte_carlo, simulate

from conftest import (
    A0_LOWER,
    B_COL,
    C_ROW,
    HURWITZ_UPPER,
    exact_system,
    interval_system,
    random_metzler,
)


def _report(name, detail):
    print(f"ACCEPTANCE PASS {name}: {detail}")


@pytest.fixture(scope="module")
def surrogate():
    net = pc.load_ffnn("scenarios/controller_nn.json")
    box = pc.InputBox(np.array([0.0]), np.array([4.5]))
    return net, pc.network_sector(net, box)


def test_criterion_c1_reproduction(published_sector):
    """Certificate on the published interval example: exact matrices and a
    sub-10ms check."""
    sys = interval_system(tau=0.0)
    certify_c1(sys, published_sector)          # warm-up, excluded from timing
    cert = certify_c1(sys, published_sector)
    assert cert.certified
    assert np.array_equal(cert.metzler_matrix, A0_LOWER)          # 0 tolerance
    assert np.max(np.abs(cert.hurwitz_matrix - HURWITZ_UPPER)) <= 1e-12
    assert cert.wall_time < 0.010
    _report("C1-reproduction",
            f"certified, exact matrices, check took {cert.wall_time*1e3:.2f} ms")


def test_criterion_c2_delay_independence(surrogate):
    """Same verdict for delays spanning four orders of magnitude; sampled
    histories converge at every delay."""
    start = time.perf_counter()
    net, sector = surrogate
    taus = [0.2, 2.0, 8.0, 16.0, 1e3]
    verdicts = {pc.certify_c2(exact_system(tau), sector).verdict for tau in taus}
    assert verdicts == {"certified"}

    proportions = {}
    rep = monte_carlo(exact_system(2.0), net, 1, 100, [0.2, 2.0, 8.0, 16.0],
                      seed=21, history_lower=-1.5, history_upper=1.5,
                      step=0.01, horizon=60.0)
    for tile in rep.tiles:
        proportions[tile.tau] = tile.proportion_converged
    # the slow-decay delay needs a horizon of a few delay windows
    rep = monte_carlo(exact_system(1e3), net, 1, 100, [1e3], seed=21,
                      history_lower=-1.5, history_upper=1.5,
                      step=0.1, horizon=5000.0)
    proportions[1e3] = rep.tiles[0].proportion_converged
    assert set(proportions) == set(taus)
    assert all(p >= 0.99 for p in proportions.values()), proportions
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    _report("C2-delay-independence",
            f"verdict invariant over taus {taus}, proportions "
            f"{sorted(proportions.values())}, {elapsed:.1f}s total")


def test_criterion_c3_combined(surrogate):
    """Sampled plants and delays from the combined setup all certify, and all
    50 output trajectories are inside |y| < 1e-2 by T = 40 s."""
    net, sector = surrogate
    rng = np.random.default_rng(123)
    box_sys = interval_system(tau=1.0)
    step = 0.01
    taus = np.round(rng.uniform(0.2, 3.0, size=5) / step) * step
    worst_terminal = 0.0
    count = 0
    for k in range(5):
        a0 = box_sys.a0.sample(rng)
        a1 = box_sys.terms[0].a.sample(rng)
        sampled = pc.DelayedLureSystem(
            pc.IntervalMatrix.exact(a0),
            (pc.DelayTerm(pc.IntervalMatrix.exact(a1), B_COL, float(taus[k])),),
            C_ROW)
        cert = certify_c3(sampled, sector)
        assert cert.certified, (k, cert.failure_reasons)
        histories = rng.uniform(0.0, 1.5, size=(10, 3))
        for hist in histories:
            traj = simulate(sampled, net,
                            SimConfig(step=step, horizon=40.0, history=hist))
            terminal = float(np.max(np.abs(traj.outputs[-1])))
            worst_terminal = max(worst_terminal, terminal)
            count += 1
    cert_box = certify_c3(box_sys, sector)
    assert cert_box.certified
    assert count == 50
    assert worst_terminal < 1e-2
    _report("C3-combined",
            f"5 plants x 5 delays certified, 50 outputs, worst |y(40)| = "
            f"{worst_terminal:.2e}")


def test_criterion_sector_soundness():
    """200 random zero-bias networks x 500 inputs: no sector violation beyond
    1e-9."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        p = int(rng.integers(1, 5))
        m = int(rng.integers(1, 4))
        depth = int(rng.integers(1, 5))
        widths = [p] + [int(rng.integers(1, 17)) for _ in range(depth)] + [m]
        layers = []
        for i in range(len(widths) - 1):
            scale = rng.uniform(0.3, 1.5)
            layers.append((rng.normal(size=(widths[i + 1], widths[i])) * scale,
                           np.zeros(widths[i + 1])))
        kind = str(rng.choice(["tanh", "relu"]))
        net = pc.FFNN(tuple(layers), pc.Activation(kind))
        lo = rng.uniform(0.0, 2.0, size=p)
        box = pc.InputBox(lo, lo + rng.uniform(0.0, 3.0, size=p))
        sector = pc.network_sector(net, box)
        ys = box.sample(rng, 500)
        outs = pc.forward(net, ys)
        worst = max(worst,
                    float(np.max(sector.gamma1 @ ys - outs)),
                    float(np.max(outs - sector.gamma2 @ ys)))
    assert worst <= 1e-9
    _report("sector-soundness",
            f"200 nets x 500 samples, worst violation {worst:.2e}")


def test_criterion_witness_oracle_equivalence():
    """Perron-witness feasibility matches the sign of the spectral abscissa on
    1000 random Metzler matrices bounded away from the boundary."""
    rng = np.random.default_rng(77)
    checked = 0
    disagreements = 0
    while checked < 1000:
        n = int(rng.integers(1, 7))
        m = random_metzler(rng, n)
        absc = metzler_spectral_abscissa(m)
        if abs(absc) < 1e-6:
            continue
        feasible = perron_witness(m) is not None
        if feasible != (absc < 0):
            disagreements += 1
        checked += 1
    assert disagreements == 0
    _report("witness-oracle-equivalence",
            "1000/1000 matrices: feasibility matches abscissa sign")


def _certified_instance(rng):
    "Random small interval system + sector that the delay-free test certifies."
    n = int(rng.integers(2, 4))
    base = rng.uniform(0.3, 1.2, size=(n, n))
    np.fill_diagonal(base, -rng.uniform(2.0 * n, 4.0 * n, size=n))
    width = np.zeros((n, n))
    for i, j in rng.integers(0, n, size=(3, 2)):
        width[i, j] = rng.uniform(0.0, 0.3)
    a0 = pc.IntervalMatrix(base, base + width)
    b = rng.uniform(0.0, 1.0, size=(n, 1))
    c = rng.uniform(0.0, 1.0, size=(1, n))
    g1 = float(rng.uniform(-0.5, 0.0))
    g2 = float(rng.uniform(g1, 0.3))
    sector = pc.SectorBound(np.array([[g1]]), np.array([[g2]]),
                            pc.InputBox(np.zeros(1), np.ones(1)))
    sys = pc.DelayedLureSystem(a0, (pc.DelayTerm(
        pc.IntervalMatrix.exact(np.zeros((n, n))), b, 0.0),), c)
    return sys, sector


def test_criterion_vertex_bruteforce_soundness():
    """On 200 random certified delay-free instances, every interval vertex
    combined with every sector-grid gain yields a Hurwitz closed loop."""
    rng = np.random.default_rng(31)
    certified = 0
    while certified < 200:
        sys, sector = _certified_instance(rng)
        cert = certify_c1(sys, sector)
        if not cert.certified:
            continue
        certified += 1
        iv = sys.a0
        free = np.argwhere(iv.upper > iv.lower)
        gains = np.linspace(sector.gamma1[0, 0], sector.gamma2[0, 0], 5)
        b, c = sys.b_total, sys.c
        for mask in range(2 ** len(free)):
            a = iv.lower.copy()
            for bit, (i, j) in enumerate(free):
                if mask >> bit & 1:
                    a[i, j] = iv.upper[i, j]
            for g in gains:
                closed = a + b @ np.array([[g]]) @ c
                assert metzler_spectral_abscissa(closed) < 0, (a, g)
    _report("vertex-bruteforce-soundness",
            "200 certified instances, all vertex/grid closed loops Hurwitz")


def test_criterion_krasovskii_envelope(surrogate):
    """Simulated linear Lyapunov weight stays below the certified decay
    envelope; any discretization excess shrinks when the step is halved."""
    net, sector = surrogate
    rng = np.random.default_rng(55)
    for tau in (2.0, 8.0):
        sys = exact_system(tau)
        cert = certify_c2(sys, sector)
        assert cert.certified
        v, eps, beta = cert.perron_vector, cert.margin, cert.beta
        m_shift = sys.terms[0].a.lower + sys.terms[0].b @ sector.gamma2 @ sys.c
        w = m_shift.T @ v
        rate = eps / (1.0 + beta * tau)
        for _ in range(3):
            x0 = rng.uniform(0.0, 1.4, size=3)
            stats = []
            for h in (0.01, 0.005):
                traj = simulate(sys, net, SimConfig(step=h, horizon=30.0,
                                                    history=x0))
                value = traj.states @ v
                w0 = float(v @ x0 + tau * (w @ x0))
                envelope = (1.0 + beta * tau) * w0 * np.exp(-rate * traj.times)
                excess = (value - envelope) / np.maximum(envelope, 1e-300)
                frac = float(np.mean(excess > 1e-9))
                stats.append((frac, float(np.max(excess))))
            assert stats[0][0] <= 0.05, stats
            assert stats[1][0] <= max(stats[0][0], 1e-12)
            assert stats[1][1] <= stats[0][1] + 1e-12
    _report("krasovskii-envelope",
            "decay envelope holds (violations <= 5%), excess shrinks at h/2")
