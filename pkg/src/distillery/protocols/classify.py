from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..densmat import NPT_TOL, DensityOperator, min_pt_eigenvalue
from ..weyl import BellSpectrum, bell_diagonal_matrix, bell_spectrum, check_prime
from .base import IterationResult
from .fimax import fimax_spectrum_step, fimax_step
from .recurrence import BASELINES, baseline_spectrum_step, baseline_step, supports

PROTOCOLS = ("fimax",) + BASELINES
FIXPOINT_TOL = 1e-10
FIDELITY_MARGIN = 1e-9

FIDELITY_THRESHOLD_REACHED = "fidelity_threshold_reached"
OUTPUT_PPT = "output_ppt"
FIXPOINT_REACHED = "fixpoint_reached"
ITERATION_CAP = "iteration_cap"


@dataclass(frozen=True)
class DistillVerdict:
    distillable: bool
    iterations_used: int
    final_fidelity: float
    reason: str
    trace: tuple[float, ...] = field(default=())


def protocol_step(rho: DensityOperator, protocol: str, round_index: int = 0,
                  method: str = "fast") -> IterationResult:
    """Dispatch one round of ``protocol`` (``"fimax"`` or a baseline name)."""
    if protocol == "fimax":
        return fimax_step(rho, method)
    if protocol in BASELINES:
        return baseline_step(rho, protocol, round_index, method)
    raise ValueError(f"unknown protocol {protocol!r}")


def check_supported(protocol: str, d: int) -> None:
    if protocol != "fimax" and not supports(protocol, d):
        raise ValueError(f"protocol {protocol!r} is not available for d={d}")


def _spectrum_step(protocol: str, p: np.ndarray, d: int, round_index: int) -> np.ndarray:
    if protocol == "fimax":
        return fimax_spectrum_step(BellSpectrum(d, p))[0]
    return baseline_spectrum_step(protocol, p, d, round_index)[0]


def classify_spectrum(p, d: int, protocol: str, max_iters: int = 10) -> DistillVerdict:
    """Classifier for an input whose Bell-diagonal projection has spectrum ``p``.

    Every protocol starts by projecting onto Bell-diagonal form, so the
    verdict for any state only depends on its Bell overlaps.
    """
    d = check_prime(d)
    check_supported(protocol, d)
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    threshold = 1.0 / d + FIDELITY_MARGIN
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    p = p / p.sum()
    prev = bell_diagonal_matrix(d, p)
    trace = []
    for it in range(1, max_iters + 1):
        p = np.clip(_spectrum_step(protocol, p, d, it - 1), 0.0, None)
        fid = float(p[0])
        trace.append(fid)
        if fid > threshold:
            return DistillVerdict(True, it, fid, FIDELITY_THRESHOLD_REACHED, tuple(trace))
        cur = bell_diagonal_matrix(d, p)
        if min_pt_eigenvalue(cur, (d, d)) >= -NPT_TOL:
            return DistillVerdict(False, it, fid, OUTPUT_PPT, tuple(trace))
        if np.max(np.abs(cur - prev)) < FIXPOINT_TOL:
            return DistillVerdict(False, it, fid, FIXPOINT_REACHED, tuple(trace))
        prev = cur
    return DistillVerdict(False, max_iters, float(p[0]), ITERATION_CAP, tuple(trace))


def classify_distillability(rho: DensityOperator, protocol: str = "fimax",
                            max_iters: int = 10) -> DistillVerdict:
    """Iterate ``protocol`` on ``rho`` until the outcome is clear.

    Stops as distillable once the fidelity with ``|Omega_00>`` exceeds
    ``1/d + 1e-9``; as undistillable once the output is PPT (tolerance
    1e-9) or stops changing (max-norm step below 1e-10); otherwise runs
    until ``max_iters`` rounds and reports ``iteration_cap``.
    """
    d = rho.dims[0]
    return classify_spectrum(bell_spectrum(rho).p, d, protocol, max_iters)
