"""Share-of-distillable-states experiments and their reports."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .densmat import NPT_TOL, min_pt_eigenvalue
from .protocols.classify import FIDELITY_MARGIN, check_supported, classify_spectrum
from .protocols.fimax import fimax_select, fimax_spectrum_step
from .sampling import (
    FilterExhausted,
    FilterResult,
    SampleConfig,
    sample_family,
    sample_gbds_system,
)
from .weyl import (
    BellSpectrum,
    bell_diagonal_matrix,
    bell_overlaps,
    bell_pos,
    two_copy_error_distribution,
)

CSV_COLUMNS = ["family", "d", "restriction", "protocol", "share", "n", "seed"]
GBDS_COLUMNS = ["share_max", "share_min", "share_mean", "share_median"]


@dataclass
class ShareReport:
    config: SampleConfig
    protocols: list[str]
    per_protocol: dict[str, dict]
    sample_count: int
    acceptance_rate: float
    seed: int
    checks: dict[str, int] = field(default_factory=dict)
    gbds_shares: dict[str, list[float]] | None = None
    runtime: float = 0.0
    complete: bool = True

    def share(self, protocol: str) -> float:
        return self.per_protocol[protocol]["share"]

    def to_dict(self, include_runtime: bool = False) -> dict:
        out = {
            "config": asdict(self.config),
            "protocols": list(self.protocols),
            "sample_count": self.sample_count,
            "acceptance_rate": self.acceptance_rate,
            "seed": self.seed,
            "complete": self.complete,
            "per_protocol": self.per_protocol,
            "checks": self.checks,
        }
        if self.gbds_shares is not None:
            out["gbds_shares"] = self.gbds_shares
        if include_runtime:
            out["runtime"] = self.runtime
        return out


class ShareExperimentExhausted(FilterExhausted):
    """Filter exhaustion during an experiment; carries the partial report."""

    def __init__(self, message: str, result: FilterResult, report: ShareReport):
        super().__init__(message, result)
        self.report = report


def worker_count() -> int:
    env = os.environ.get("DISTILLERY_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _classify_block(ov: np.ndarray, d: int, protocols, max_iters: int) -> dict[str, np.ndarray]:
    return {
        p: np.array([classify_spectrum(o, d, p, max_iters).distillable for o in ov], dtype=bool)
        for p in protocols
    }


def classify_overlaps(ov: np.ndarray, d: int, protocols, max_iters: int = 10,
                      workers: int | None = None) -> dict[str, np.ndarray]:
    """Distillability flags per protocol for a stack of Bell spectra."""
    workers = workers or worker_count()
    if workers == 1 or len(ov) < 64:
        return _classify_block(ov, d, protocols, max_iters)
    blocks = np.array_split(ov, workers)
    with ThreadPoolExecutor(workers) as pool:
        parts = list(pool.map(lambda b: _classify_block(b, d, protocols, max_iters), blocks))
    return {p: np.concatenate([part[p] for part in parts]) for p in protocols}


def one_step_dichotomy_violations(ov: np.ndarray, d: int) -> int:
    """Count states whose first FIMAX output is neither above 1/d nor PPT."""
    bad = 0
    for o in ov:
        out = fimax_spectrum_step(BellSpectrum(d, o / o.sum()))[0]
        if out[0] > 1.0 / d - FIDELITY_MARGIN:
            continue
        if min_pt_eigenvalue(bell_diagonal_matrix(d, out), (d, d)) >= -NPT_TOL:
            continue
        bad += 1
    return bad


def _checks(ov, d, flags) -> dict[str, int]:
    checks = {}
    if "fimax" in flags:
        checks["dichotomy_violations"] = one_step_dichotomy_violations(ov, d)
        others = [p for p in flags if p != "fimax"]
        if others:
            any_base = np.any([flags[p] for p in others], axis=0)
            checks["superset_violations"] = int(np.sum(any_base & ~flags["fimax"]))
    return checks


def _per_protocol(flags: dict[str, np.ndarray]) -> dict[str, dict]:
    return {
        p: {"share": float(f.mean()) if len(f) else 0.0, "distillable": int(f.sum()), "n": len(f)}
        for p, f in flags.items()
    }


def run_share_experiment(config: SampleConfig, protocols=("fimax",), max_iters: int = 10,
                         workers: int | None = None) -> ShareReport:
    """Sample, filter and classify one state family for the given protocols.

    Raises
    ------
    ShareExperimentExhausted
        If the low-fidelity filter runs out of attempts; ``.report`` holds
        the statistics for whatever was accepted before that.
    """
    protocols = list(protocols)
    for p in protocols:
        check_supported(p, config.d)
    start = time.perf_counter()
    d = config.d
    if config.family == "gbds":
        return _run_gbds(config, protocols, max_iters, workers, start)
    try:
        result = sample_family(config)
        exhausted = None
    except FilterExhausted as exc:
        result, exhausted = exc.result, exc
    ov = bell_overlaps(result.states, d)
    flags = classify_overlaps(ov, d, protocols, max_iters, workers)
    report = ShareReport(
        config=config,
        protocols=protocols,
        per_protocol=_per_protocol(flags),
        sample_count=result.accepted,
        acceptance_rate=result.acceptance_rate,
        seed=config.seed,
        checks=_checks(ov, d, flags),
        runtime=time.perf_counter() - start,
        complete=exhausted is None,
    )
    if exhausted is not None:
        raise ShareExperimentExhausted(str(exhausted), result, report)
    return report


def _run_gbds(config, protocols, max_iters, workers, start) -> ShareReport:
    d = config.d
    per_basis = {p: [] for p in protocols}
    all_flags = {p: [] for p in protocols}
    all_ov = []
    attempts = accepted = 0
    exhausted = None
    for b in range(config.gbds_bases):
        try:
            _, result = sample_gbds_system(
                d, config.seed, b, config.gbds_states_per_basis, config.restriction,
                config.attempt_budget(config.gbds_states_per_basis),
            )
        except FilterExhausted as exc:
            result, exhausted = exc.result, exc
        attempts += result.attempts
        accepted += result.accepted
        ov = bell_overlaps(result.states, d)
        flags = classify_overlaps(ov, d, protocols, max_iters, workers)
        all_ov.append(ov)
        for p in protocols:
            if len(ov):
                per_basis[p].append(float(flags[p].mean()))
            all_flags[p].append(flags[p])
        if exhausted is not None:
            break
    flags = {p: np.concatenate(v) for p, v in all_flags.items()}
    ov = np.concatenate(all_ov)
    stats = _per_protocol(flags)
    for p in protocols:
        shares = np.array(per_basis[p]) if per_basis[p] else np.zeros(1)
        stats[p].update(
            share_max=float(shares.max()),
            share_min=float(shares.min()),
            share_mean=float(shares.mean()),
            share_median=float(np.median(shares)),
            bases=len(per_basis[p]),
        )
    report = ShareReport(
        config=config,
        protocols=protocols,
        per_protocol=stats,
        sample_count=accepted,
        acceptance_rate=accepted / attempts if attempts else 0.0,
        seed=config.seed,
        checks=_checks(ov, d, flags),
        gbds_shares=per_basis,
        runtime=time.perf_counter() - start,
        complete=exhausted is None,
    )
    if exhausted is not None:
        raise ShareExperimentExhausted(str(exhausted), exhausted.result, report)
    return report


def emit_report(report: ShareReport, fmt: str = "json", include_runtime: bool = False) -> bytes:
    """Serialize a report as JSON or CSV.

    Wall-clock runtime is left out unless asked for, so that repeated runs
    with one seed give byte-identical output.
    """
    if fmt == "json":
        return (json.dumps(report.to_dict(include_runtime), indent=2) + "\n").encode()
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    gbds = report.config.family == "gbds"
    cols = CSV_COLUMNS + (GBDS_COLUMNS if gbds else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    cfg = report.config
    for p in report.protocols:
        st = report.per_protocol[p]
        row = [cfg.family, cfg.d, cfg.restriction, p, repr(st["share"]), st["n"], cfg.seed]
        if gbds:
            row += [repr(st[c]) for c in GBDS_COLUMNS]
        writer.writerow(row)
    return buf.getvalue().encode()


# -- worked example ----------------------------------------------------------


def example_spectrum() -> BellSpectrum:
    """The qutrit example: weight 5/9 on Omega_{2,1}, 1/18 everywhere else.

    The printed matrix shows 0.56 and 0.06, which round these values.
    """
    d = 3
    p = np.full(d * d, 1.0 / 18)
    p[bell_pos(2, 1, d)] = 5.0 / 9
    return BellSpectrum(d, p)


def reproduce_example() -> dict:
    """Every intermediate of one FIMAX round on the qutrit example."""
    spec = example_spectrum()
    d = spec.d
    choice = fimax_select(two_copy_error_distribution(spec), d)
    out, prob, _, corr, pre = fimax_spectrum_step(spec)
    return {
        "input_spectrum": spec.p.tolist(),
        "input_fidelity": spec.at(0, 0),
        "overlap_omega_21": spec.at(2, 1),
        "generator": list(choice.generator),
        "s_max": choice.s_max,
        "coset": [list(e) for e in choice.coset.elements],
        "p_eps": choice.success_prob,
        "p_coset": choice.coset_prob,
        "score": choice.score,
        "pre_correction_spectrum": pre.tolist(),
        "correction": [corr.k, corr.l],
        "final_spectrum": out.tolist(),
        "f_out": float(out[0]),
        "success_prob": prob,
    }


EXAMPLE_TARGETS = {
    "p_eps": (0.5, 1e-6),
    "p_coset": (0.315, 5e-4),
    "f_out": (0.63, 5e-3),
}


def check_example(record: dict) -> list[str]:
    """Mismatches between the record and the expected example values."""
    problems = []
    for key, (target, tol) in EXAMPLE_TARGETS.items():
        if abs(record[key] - target) > tol:
            problems.append(f"{key} = {record[key]:.6f}, expected {target} +/- {tol}")
    g = tuple(record["generator"])
    if g not in {(1, 0, 1, 0), (2, 0, 2, 0)}:
        problems.append(f"generator {g} is not in the class of (1,0,1,0)")
    if record["s_max"] != 1:
        problems.append(f"s_max = {record['s_max']}, expected 1")
    if tuple(record["correction"]) != (0, 1):
        problems.append(f"correction {record['correction']}, expected (0, 1)")
    expected = np.array([0.63, 0.13, 0.13] + [0.02] * 6)
    final = np.array(record["final_spectrum"])
    if np.max(np.abs(final - expected)) > 5e-3:
        problems.append(f"final spectrum {np.round(final, 4).tolist()} differs from {expected.tolist()}")
    return problems
