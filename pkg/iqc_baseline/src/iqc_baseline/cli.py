"""Subprocess entry point.

Consumes the shared system/network JSON files, runs the SDP feasibility
test, and writes {status, wall_time_seconds, dims} to the output path.
Exit code 0 covers both feasible and infeasible outcomes (the verdict is the
result, not an error); malformed inputs exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .discretize import InputError
from .loading import IntervalSystem, load_network, load_system
from .pipeline import verify_system


def parse_box(text: str):
    parts = [float(x) for x in text.split(",")]
    if len(parts) < 2 or len(parts) % 2:
        raise InputError("--box expects comma-separated lo,hi pairs")
    return np.array(parts[0::2]), np.array(parts[1::2])


def retarget(sys: IntervalSystem, tau: float) -> IntervalSystem:
    terms = tuple((a_lo, a_hi, b, tau) for a_lo, a_hi, b, _ in sys.terms)
    return IntervalSystem(sys.a0_lower, sys.a0_upper, terms, sys.c)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iqc-verify",
        description="Discrete-time IQC/SDP stability verification of an "
                    "NN feedback loop with delays and interval uncertainty.")
    parser.add_argument("--system", required=True)
    parser.add_argument("--nn", required=True)
    parser.add_argument("--box", required=True,
                        help="operating box as lo,hi pairs, e.g. 0,4.5")
    parser.add_argument("--step", type=float, required=True,
                        help="discretization step h")
    parser.add_argument("--tau", type=float, default=None,
                        help="override every delay with this value")
    parser.add_argument("--eps", type=float, default=1e-6)
    parser.add_argument("--solver", default=None)
    parser.add_argument("--out", required=True, help="result JSON path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sys_model = load_system(args.system)
        net = load_network(args.nn)
        lo, hi = parse_box(args.box)
        if args.tau is not None:
            sys_model = retarget(sys_model, args.tau)
        result = verify_system(sys_model, net, args.step, lo, hi,
                               eps=args.eps, solver=args.solver)
    except (InputError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(result.to_dict(), fh, indent=2)
        fh.write("\n")
    print(f"{result.status} in {result.wall_time_seconds:.3f}s "
          f"(states={result.dims['states']}, ports={result.dims['ports']}, "
          f"sdp_vars={result.dims['sdp_vars']})", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
