import sys
from pathlib import Path

import numpy as np
import pytest

import poscert as pc

REPO = Path(__file__).resolve().parents[1]
SCENARIOS = REPO / "scenarios"

A0_LOWER = np.array([[-8.0, 2.0, 1.0],
                     [3.0, -10.0, 2.0],
                     [1.0, 2.0, -8.0]])
HURWITZ_UPPER = np.array([[-6.44, 3.56, 2.56],
                          [4.56, -8.44, 3.56],
                          [2.56, 3.56, -6.44]])
B_COL = np.ones((3, 1))
C_ROW = np.ones((1, 3))


@pytest.fixture(scope="session")
def scenarios_dir():
    return SCENARIOS


@pytest.fixture(scope="session")
def controller_net():
    return pc.load_ffnn(SCENARIOS / "controller_nn.json")


@pytest.fixture(scope="session")
def gamma_box():
    return pc.InputBox(np.array([0.0]), np.array([4.5]))


@pytest.fixture(scope="session")
def controller_sector(controller_net, gamma_box):
    return pc.network_sector(controller_net, gamma_box)


@pytest.fixture(scope="session")
def published_sector(gamma_box):
    "The example sector used throughout the certificate reproductions."
    return pc.SectorBound(np.array([[-3.0]]), np.array([[-2.44]]), gamma_box)


def interval_system(tau=0.0):
    "Interval plant of the running example (uncertain A0 and A1)."
    a0 = pc.IntervalMatrix(A0_LOWER, A0_LOWER + 0.5)
    a1 = pc.IntervalMatrix(3.0 * np.ones((3, 3)), 3.5 * np.ones((3, 3)))
    return pc.DelayedLureSystem(a0, (pc.DelayTerm(a1, B_COL, tau),), C_ROW)


def exact_system(tau=2.0):
    "Degenerate-interval plant of the delay-only example."
    a0 = pc.IntervalMatrix.exact(A0_LOWER)
    a1 = pc.IntervalMatrix.exact(3.0 * np.ones((3, 3)))
    return pc.DelayedLureSystem(a0, (pc.DelayTerm(a1, B_COL, tau),), C_ROW)


@pytest.fixture
def c1_system():
    return interval_system(tau=0.0)


@pytest.fixture
def c2_system():
    return exact_system(tau=2.0)


@pytest.fixture
def c3_system():
    return interval_system(tau=1.0)


def random_metzler(rng, n, shift=None):
    "Random Metzler matrix: nonnegative off-diagonals, arbitrary diagonal."
    m = rng.uniform(0.0, 2.0, size=(n, n))
    diag = rng.uniform(-2.0 * n, 1.0, size=n)
    np.fill_diagonal(m, diag)
    if shift is not None:
        m = m - shift * np.eye(n)
    return m
