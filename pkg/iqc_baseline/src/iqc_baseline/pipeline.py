"""End-to-end verification pipeline: load, discretize, assemble, solve."""

from __future__ import annotations

from dataclasses import dataclass

from .assemble import ExtendedRealization, assemble_extended
from .discretize import DiscreteSystem, discretize
from .filters import CompositeFilter, build_composite_filter
from .lft import DiscretePlantLft, build_plant_lft
from .loading import IntervalSystem, Network
from .nn_qc import NetworkQc, build_nn_qc, propagate_boxes
from .verify import VerificationResult, verify_lmi


@dataclass(frozen=True)
class VerificationSetup:
    disc: DiscreteSystem
    lft: DiscretePlantLft
    composite: CompositeFilter
    ext: ExtendedRealization
    qc: NetworkQc


def build_setup(sys: IntervalSystem, net: Network, h: float,
                y_lower, y_upper) -> VerificationSetup:
    disc = discretize(sys, h)
    lft = build_plant_lft(disc)
    composite = build_composite_filter(lft, disc.delays)
    ext = assemble_extended(lft, composite)
    qc = build_nn_qc(net, propagate_boxes(net, y_lower, y_upper))
    return VerificationSetup(disc, lft, composite, ext, qc)


def verify_system(sys: IntervalSystem, net: Network, h: float,
                  y_lower, y_upper, eps: float = 1e-6,
                  solver: str | None = None) -> VerificationResult:
    setup = build_setup(sys, net, h, y_lower, y_upper)
    return verify_lmi(setup.ext, setup.lft, net, setup.qc, sys.c,
                      eps=eps, solver=solver)
