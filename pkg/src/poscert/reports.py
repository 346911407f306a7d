"""Machine-readable report emission: JSON documents and CSV traces.

All reports are written with stable key order and plain float reprs so a
scenario re-run with the same seed produces byte-identical files (wall-clock
fields are the documented exception).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .certificates import Certificate
from .ffnn import FFNN, LayerBoxes, SectorBound, forward
from .simulate import ConvergenceReport, Trajectory


def write_json(document: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(document, fh, indent=2)
        fh.write("\n")
    return path


def write_certificate_report(cert: Certificate, path) -> Path:
    return write_json(cert.to_dict(), path)


def sector_document(sector: SectorBound, boxes: LayerBoxes) -> dict:
    return {
        "gamma1": sector.gamma1.tolist(),
        "gamma2": sector.gamma2.tolist(),
        "box": {"lower": sector.box.lower.tolist(),
                "upper": sector.box.upper.tolist()},
        "per_layer_boxes": [{
            "preact_lower": boxes.preact_lower[i].tolist(),
            "preact_upper": boxes.preact_upper[i].tolist(),
            "postact_lower": boxes.postact_lower[i].tolist(),
            "postact_upper": boxes.postact_upper[i].tolist(),
        } for i in range(len(boxes.preact_lower))],
    }


def write_sector_samples(net: FFNN, sector: SectorBound, path,
                         samples: int = 200, seed: int = 0) -> Path:
    """CSV of (y, Phi(y), gamma1 y, gamma2 y) over the box for plotting.

    Scalar inputs get a uniform grid; higher dimensions get seeded uniform
    samples.
    """
    box = sector.box
    if box.dim == 1:
        ys = np.linspace(box.lower[0], box.upper[0], samples)[None, :]
    else:
        ys = box.sample(np.random.default_rng(seed), samples)
    outs = forward(net, ys)
    lo = sector.gamma1 @ ys
    hi = sector.gamma2 @ ys
    p, m = box.dim, outs.shape[0]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"y{i+1}" for i in range(p)]
                        + [f"phi{j+1}" for j in range(m)]
                        + [f"lower{j+1}" for j in range(m)]
                        + [f"upper{j+1}" for j in range(m)])
        for k in range(ys.shape[1]):
            writer.writerow(list(ys[:, k]) + list(outs[:, k])
                            + list(lo[:, k]) + list(hi[:, k]))
    return path


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    "Header t,x1..xn,y1..yp,u1..um; one row per step."
    n = traj.states.shape[1]
    p = traj.outputs.shape[1]
    m = traj.controls.shape[1]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i+1}" for i in range(n)]
                        + [f"y{i+1}" for i in range(p)]
                        + [f"u{i+1}" for i in range(m)])
        for k in range(traj.times.shape[0]):
            writer.writerow([traj.times[k]] + list(traj.states[k])
                            + list(traj.outputs[k]) + list(traj.controls[k]))
    return path


def write_tile_norms_csv(tile, path, stride: int = 1) -> Path:
    "Per-trajectory state norms over time for one Monte-Carlo tile."
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        k = tile.norms.shape[1]
        writer.writerow(["t"] + [f"norm{i+1}" for i in range(k)] + ["median"])
        for idx in range(0, tile.times.shape[0], stride):
            writer.writerow([tile.times[idx]] + list(tile.norms[idx])
                            + [tile.median_norms[idx]])
    return path


def write_convergence_report(report: ConvergenceReport, path) -> Path:
    return write_json(report.to_dict(), path)


def write_bench_report(rows: list, json_path, csv_path) -> tuple[Path, Path]:
    """Benchmark table rows: {h, tau, iqc_status, iqc_seconds,
    positivity_status, positivity_seconds}."""
    jpath = write_json({"rows": rows}, json_path)
    cpath = Path(csv_path)
    cpath.parent.mkdir(parents=True, exist_ok=True)
    fields = ["h", "tau", "iqc_status", "iqc_seconds",
              "positivity_status", "positivity_seconds"]
    with open(cpath, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in fields})
    return jpath, cpath
