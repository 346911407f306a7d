"""Command-line front end.

Subcommands: sector, certify, simulate, bench.  Reports go to files under
--out; diagnostics go to stderr (verbosity via the POSCERT_LOG environment
variable).  Exit codes: 0 success/certified, 1 not certified, 2 error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import figures, reports
from .certificates import certify
from .errors import (
    ConfigurationError,
    DomainError,
    PreconditionError,
    ShapeError,
    ValidationError,
)
from .ffnn import InputBox, forward, load_ffnn, network_sector, propagate_boxes
from .lure import load_system
from .simulate import SimConfig, monte_carlo, simulate

log = logging.getLogger("poscert")

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 1
EXIT_ERROR = 2

USAGE_ERRORS = (ValidationError, ShapeError, DomainError, ConfigurationError,
                PreconditionError, ValueError, OSError, json.JSONDecodeError)


def parse_box(text: str) -> InputBox:
    "Parse 'lo,hi[,lo,hi,...]' into a box (one lo,hi pair per channel)."
    parts = [float(x) for x in text.split(",")]
    if len(parts) < 2 or len(parts) % 2:
        raise ValidationError("--box", "expected comma-separated lo,hi pairs")
    lower = np.array(parts[0::2])
    upper = np.array(parts[1::2])
    return InputBox(lower, upper)


def parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip() != ""]


def snap_to_grid(taus, step):
    "Round delays to integer step multiples; the integrator requires it."
    snapped = []
    for tau in taus:
        s = round(tau / step) * step
        if abs(s - tau) > 1e-12:
            log.info("snapped delay %g to step grid: %g", tau, s)
        snapped.append(s)
    return snapped


def cmd_sector(args) -> int:
    net = load_ffnn(args.nn)
    box = parse_box(args.box)
    sector = network_sector(net, box)
    boxes = propagate_boxes(net, box)
    out = Path(args.out)
    reports.write_json(reports.sector_document(sector, boxes), out / "sector.json")
    csv_path = reports.write_sector_samples(net, sector, out / "sector_samples.csv",
                                            samples=args.samples, seed=args.seed)
    log.info("sector report written to %s", out)
    if not args.no_plot:
        if box.dim == 1:
            ys = np.linspace(box.lower[0], box.upper[0], args.samples)[None, :]
        else:
            ys = box.sample(np.random.default_rng(args.seed), args.samples)
        figures.sector_figure(ys, forward(net, ys), sector.gamma1 @ ys,
                              sector.gamma2 @ ys, out / "sector.png")
    print(csv_path)
    return EXIT_OK


def cmd_certify(args) -> int:
    sysm = load_system(args.system)
    net = load_ffnn(args.nn)
    box = parse_box(args.box)
    sector = network_sector(net, box)
    cert = certify(sysm, sector, args.config)
    out = Path(args.out)
    path = reports.write_certificate_report(cert, out / "certificate.json")
    log.info("certificate: %s (%.3g ms)", cert.verdict, cert.wall_time * 1e3)
    print(path)
    return EXIT_OK if cert.certified else EXIT_NOT_CERTIFIED


def cmd_simulate(args) -> int:
    sysm = load_system(args.system)
    net = None if args.open_loop else load_ffnn(args.nn)
    taus = parse_floats(args.taus) if args.taus else list(sysm.taus)
    if not taus:
        taus = [0.0]
    taus = snap_to_grid(taus, args.step)
    hist = parse_floats(args.history_box)
    if len(hist) != 2:
        raise ValidationError("--history-box", "expected lo,hi")
    report = monte_carlo(sysm, net, args.plants, args.histories, taus,
                         seed=args.seed, history_lower=hist[0], history_upper=hist[1],
                         step=args.step, horizon=args.horizon)
    out = Path(args.out)
    reports.write_convergence_report(report, out / "convergence.json")
    stride = max(1, report.tiles[0].times.shape[0] // 600) if report.tiles else 1
    for k, tile in enumerate(report.tiles):
        reports.write_tile_norms_csv(tile, out / f"tile_{k:02d}_norms.csv", stride)
        if args.horizon > 0:
            cfg = SimConfig(step=args.step, horizon=args.horizon,
                            history=tile.representative_history,
                            plant_sample=tile.plant_sample, seed=args.seed)
            traj = simulate(_with_tau(sysm, tile.tau), net, cfg)
            reports.write_trajectory_csv(traj, out / f"tile_{k:02d}_trajectory.csv")
    if not args.no_plot and report.tiles:
        figures.convergence_figure(report.tiles, out / "tiles.png")
        traced = [(f"plant {t.plant_index}, tau={t.tau:g}", t.times, t.outputs)
                  for t in report.tiles if t.outputs is not None]
        if traced:
            figures.outputs_figure(traced, out / "outputs.png")
    log.info("simulation reports written to %s", out)
    print(out / "convergence.json")
    return EXIT_OK


def _with_tau(sysm, tau):
    from .lure import DelayedLureSystem, DelayTerm
    return DelayedLureSystem(sysm.a0,
                             tuple(DelayTerm(t.a, t.b, tau) for t in sysm.terms),
                             sysm.c)


def _run_iqc(iqc_cmd: str, system: str, nn: str, box: str, step: float,
             tau: float, out_dir: Path, row_index: int) -> dict:
    "Invoke the verification baseline as a subprocess; 'unavailable' on failure."
    result_path = out_dir / f"iqc_result_{row_index}.json"
    cmd = iqc_cmd.split() + ["--system", system, "--nn", nn, "--box", box,
                             "--step", str(step), "--tau", str(tau),
                             "--out", str(result_path)]
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=600)
    except (OSError, subprocess.TimeoutExpired) as exc:
        log.warning("baseline unavailable: %s", exc)
        return {"status": "unavailable", "wall_time_seconds": None}
    if proc.returncode != 0 or not result_path.exists():
        log.warning("baseline failed (exit %s): %s", proc.returncode,
                    proc.stderr.strip()[:500])
        return {"status": "unavailable", "wall_time_seconds": None}
    with open(result_path) as fh:
        return json.load(fh)


def cmd_bench(args) -> int:
    sysm = load_system(args.system)
    net = load_ffnn(args.nn)
    box = parse_box(args.box)
    sector = network_sector(net, box)
    rows = []
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    row_specs = []
    for chunk in args.rows.split(";"):
        h, tau = (float(x) for x in chunk.split(","))
        row_specs.append((h, tau))
    for idx, (h, tau) in enumerate(row_specs):
        cert = certify(_with_tau(sysm, tau), sector, "auto")
        if args.iqc_cmd:
            iqc = _run_iqc(args.iqc_cmd, args.system, args.nn, args.box,
                           h, tau, out, idx)
        else:
            iqc = {"status": "unavailable", "wall_time_seconds": None}
        rows.append({
            "h": h,
            "tau": tau,
            "iqc_status": iqc.get("status", "unavailable"),
            "iqc_seconds": iqc.get("wall_time_seconds"),
            "positivity_status": cert.verdict,
            "positivity_seconds": cert.wall_time,
        })
        log.info("row h=%g tau=%g: iqc=%s (%s s), positivity=%s (%.2e s)",
                 h, tau, rows[-1]["iqc_status"], rows[-1]["iqc_seconds"],
                 cert.verdict, cert.wall_time)
    jpath, _ = reports.write_bench_report(rows, out / "bench.json", out / "bench.csv")
    if not args.no_plot:
        figures.bench_figure(rows, out / "bench.png")
    print(jpath)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poscert",
        description="Stability certification of NN feedback loops around "
                    "positive plants with delays and interval uncertainty.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system=True):
        if system:
            p.add_argument("--system", required=True, help="system JSON path")
        p.add_argument("--nn", required=True, help="network JSON path")
        p.add_argument("--box", required=True,
                       help="output box as lo,hi pairs, e.g. 0,4.5")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out", help="report directory")
        p.add_argument("--no-plot", action="store_true",
                       help="skip figure rendering")

    p = sub.add_parser("sector", help="network sector bound over a box")
    common(p, system=False)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_sector)

    p = sub.add_parser("certify", help="positivity stability certificate")
    common(p)
    p.add_argument("--config", default="auto",
                   choices=["auto", "c1", "c2", "c3"])
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("simulate", help="Monte-Carlo closed-loop simulation")
    common(p)
    p.add_argument("--plants", type=int, default=4)
    p.add_argument("--histories", type=int, default=100)
    p.add_argument("--taus", default=None,
                   help="comma list of delays; defaults to the system's")
    p.add_argument("--history-box", default="0,1",
                   help="per-component history range lo,hi")
    p.add_argument("--horizon", type=float, default=60.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--open-loop", action="store_true",
                   help="simulate with the feedback disabled")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="runtime comparison against the baseline")
    common(p)
    p.add_argument("--rows", default="0.1,0.7;0.01,0.07",
                   help="semicolon list of h,tau rows")
    p.add_argument("--iqc-cmd", default=None,
                   help="command prefix for the baseline verifier")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("POSCERT_LOG", "warning").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
