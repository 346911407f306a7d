import json
import subprocess
import sys

import numpy as np
import pytest

import iqc_baseline as iqc
from iqc_baseline.filters import build_composite_filter
from iqc_baseline.lft import build_plant_lft

from conftest import SCENARIOS, system_at_delay


class TestAssemble:
    def test_scalar_plant_one_delay_state_count(self):
        doc = {"A0": [[-0.5]],
               "terms": [{"A": [[0.2]], "B": [[1.0]], "tau": 1.0}],
               "C": [[1.0]]}
        disc = iqc.discretize(iqc.load_system(doc), 1.0)
        lft = build_plant_lft(disc)
        comp = build_composite_filter(lft, disc.delays)
        ext = iqc.assemble_extended(lft, comp)
        assert ext.n_states == 1 + 1 * (1 + 1)  # n + d (n + m)

    def test_benchmark_dimensions(self, interval_system_doc):
        disc = iqc.discretize(system_at_delay(interval_system_doc, 0.7), 0.1)
        lft = build_plant_lft(disc)
        comp = build_composite_filter(lft, disc.delays)
        ext = iqc.assemble_extended(lft, comp)
        assert ext.n_states == 3 + 7 * 4
        assert ext.n_q == 4 + 54
        assert ext.b.shape == (31, 58 + 1)

    def test_no_filters_passthrough(self):
        doc = {"A0": [[-0.5]], "terms": [], "C": [[1.0]]}
        disc = iqc.discretize(iqc.load_system(doc), 1.0)
        lft = build_plant_lft(disc)
        comp = build_composite_filter(lft, disc.delays)
        ext = iqc.assemble_extended(lft, comp)
        assert ext.n_states == 1
        assert ext.a == pytest.approx(lft.a_g)
        assert ext.c.shape[0] == 0

    def test_block_structure(self, interval_system_doc):
        disc = iqc.discretize(system_at_delay(interval_system_doc, 0.07), 0.01)
        lft = build_plant_lft(disc)
        comp = build_composite_filter(lft, disc.delays)
        ext = iqc.assemble_extended(lft, comp)
        f = comp.filt
        assert ext.a[:3, :3] == pytest.approx(lft.a_g)
        assert ext.a[:3, 3:] == pytest.approx(np.zeros((3, 28)))
        assert ext.a[3:, 3:] == pytest.approx(f.a_psi)
        assert ext.a[3:, :3] == pytest.approx(f.b_psi1 @ lft.c_g)


class TestVerify:
    def test_stable_scalar_plant_feasible(self):
        # no uncertainty ports, zero feedback: a plain Lyapunov problem
        doc = {"A0": [[-0.5]], "terms": [], "C": [[1.0]]}
        net = iqc.load_network({"activation": "tanh",
                                "layers": [{"W": [[1.0]], "b": [0.0]},
                                           {"W": [[0.0]], "b": [0.0]}]})
        res = iqc.verify_system(iqc.load_system(doc), net, 1.0,
                                np.zeros(1), np.ones(1))
        assert res.status == "feasible"
        assert res.margin < -1e-6

    def test_unstable_scalar_plant_infeasible(self):
        doc = {"A0": [[0.5]], "terms": [], "C": [[1.0]]}  # A_d = 1.5
        net = iqc.load_network({"activation": "tanh",
                                "layers": [{"W": [[1.0]], "b": [0.0]},
                                           {"W": [[0.0]], "b": [0.0]}]})
        res = iqc.verify_system(iqc.load_system(doc), net, 1.0,
                                np.zeros(1), np.ones(1))
        assert res.status == "infeasible"

    def test_result_document_schema(self):
        doc = {"A0": [[-0.5]], "terms": [], "C": [[1.0]]}
        net = iqc.load_network({"activation": "tanh",
                                "layers": [{"W": [[1.0]], "b": [0.0]},
                                           {"W": [[0.0]], "b": [0.0]}]})
        res = iqc.verify_system(iqc.load_system(doc), net, 1.0,
                                np.zeros(1), np.ones(1))
        out = res.to_dict()
        assert set(out) == {"status", "wall_time_seconds", "dims"}
        assert set(out["dims"]) == {"states", "ports", "sdp_vars"}


class TestCli:
    def test_subprocess_interface(self, tmp_path):
        result_path = tmp_path / "result.json"
        cmd = [sys.executable, "-m", "iqc_baseline.cli",
               "--system", str(SCENARIOS / "delay_plant.json"),
               "--nn", str(SCENARIOS / "controller_nn.json"),
               "--box", "0,4.5", "--step", "0.01", "--tau", "0.07",
               "--out", str(result_path)]
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=600)
        assert proc.returncode == 0, proc.stderr
        doc = json.loads(result_path.read_text())
        assert doc["status"] == "feasible"
        assert doc["dims"]["states"] == 31
        schema_path = SCENARIOS.parent / "docs" / "schemas" / "iqc_result.schema.json"
        try:
            import jsonschema
        except ImportError:
            return
        jsonschema.validate(doc, json.loads(schema_path.read_text()))

    def test_missing_file_exit_two(self, tmp_path):
        cmd = [sys.executable, "-m", "iqc_baseline.cli",
               "--system", str(tmp_path / "nope.json"),
               "--nn", str(SCENARIOS / "controller_nn.json"),
               "--box", "0,4.5", "--step", "0.1",
               "--out", str(tmp_path / "r.json")]
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=120)
        assert proc.returncode == 2
