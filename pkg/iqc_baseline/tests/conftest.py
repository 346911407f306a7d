import json
from pathlib import Path

import numpy as np
import pytest

import iqc_baseline as iqc

REPO = Path(__file__).resolve().parents[2]
SCENARIOS = REPO / "scenarios"


@pytest.fixture(scope="session")
def scenarios_dir():
    return SCENARIOS


@pytest.fixture(scope="session")
def surrogate_net():
    return iqc.load_network(SCENARIOS / "controller_nn.json")


@pytest.fixture(scope="session")
def interval_system_doc():
    with open(SCENARIOS / "interval_plant.json") as fh:
        return json.load(fh)


def system_at_delay(doc, tau):
    sys0 = iqc.load_system(doc)
    return iqc.IntervalSystem(sys0.a0_lower, sys0.a0_upper,
                              tuple((a, b, c, tau) for a, b, c, _ in sys0.terms),
                              sys0.c)


@pytest.fixture(scope="session")
def box():
    return np.array([0.0]), np.array([4.5])
